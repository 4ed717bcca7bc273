import numpy as np
import pytest

from pauliprop.circuits import Circuit, Layer, identity_circuit, random_clifford, random_clifford_t, random_matchgate_circuit
from pauliprop.gates import gate
from pauliprop.network import (
    OperatorGraph,
    circuit_graph,
    component_of,
    crossing_edges,
    export_dot,
    export_edges_csv,
    max_out_degree,
    mean_out_degree,
    omega_graph,
    per_layer_degree,
    read_edges_csv,
    summary,
    weak_components,
)
from pauliprop.oracle import build_full_omega
from pauliprop.pauli import PauliString, index_encode


def node(label):
    return index_encode(PauliString.from_label(label))


def test_identity_graph_self_loops():
    g = circuit_graph(identity_circuit(2, 2))
    assert g.n_edges == 16
    assert np.array_equal(g.sources, g.targets)
    assert mean_out_degree(g) == 1.0
    comps = weak_components(g)
    assert len(comps) == 16 and all(len(c) == 1 for c in comps)


@pytest.mark.parametrize("seed", range(4))
def test_clifford_single_out_edge(seed):
    g = circuit_graph(random_clifford(4, 4, seed))
    assert np.all(g.out_degrees() == 1) and np.all(g.in_degrees() == 1)
    assert mean_out_degree(g) == 1.0 and max_out_degree(g) == 1


def test_clifford_components_are_cycles():
    g = circuit_graph(random_clifford(3, 5, 2))
    for comp in weak_components(g):
        # a permutation restricted to a weak component is one cycle
        start = min(comp)
        seen, cur = [start], start
        while True:
            cur = int(g.targets[g.sources == cur][0])
            if cur == start:
                break
            seen.append(cur)
        assert set(seen) == comp


def test_threshold_one_empties_t_graph():
    o = build_full_omega(Circuit(1, (Layer.of(gate("T", 1)),)))
    g = omega_graph(o, threshold=1.0)
    assert g.n_edges == 0  # entries never exceed 1 in magnitude
    assert omega_graph(o, threshold=0.99).n_edges == 2  # the unit entries on I and Z
    with pytest.raises(ValueError):
        omega_graph(o, threshold=-1)


def test_clifford_t_degree_grows():
    degs = [mean_out_degree(circuit_graph(random_clifford_t(4, 4, s))) for s in range(6)]
    assert all(d >= 1 for d in degs) and max(degs) > 2


@pytest.mark.parametrize("n", [3, 4])
def test_matchgate_block_size(n):
    g = circuit_graph(random_matchgate_circuit(n, 4, 0))
    z = "I" * (n - 1) + "Z"
    assert len(component_of(g, node(z))) == n * n


def test_matchgate_haar_ensemble_block():
    g = circuit_graph(random_matchgate_circuit(4, 4, 0, ensemble="haar"))
    assert len(component_of(g, node("IIIZ"))) == 4 * 7


@pytest.mark.parametrize("L", [1, 2, 5, 8])
def test_matchgate_partition_invariant(L):
    g = circuit_graph(random_matchgate_circuit(3, L, 1))
    ref = weak_components(circuit_graph(random_matchgate_circuit(3, 1, 1)))
    assert crossing_edges(g, ref) == 0


def test_crossing_edges_counts_bridges():
    g = OperatorGraph(1, np.array([0, 1, 2]), np.array([0, 2, 3]), np.array([1.0, 0.5, 0.5]))
    assert crossing_edges(g, [{0}, {1}, {2, 3}]) == 1


def test_summary_and_per_layer():
    c = random_clifford_t(3, 3, 1)
    s = summary(circuit_graph(c))
    assert set(s) == {"d_mean", "d_max", "components"}
    assert sum(s["components"]) == 64
    assert per_layer_degree(c) >= 1.0
    with pytest.raises(ValueError):
        per_layer_degree(Circuit(3, ()))


def test_dot_export():
    empty = OperatorGraph(1, np.array([], dtype=int), np.array([], dtype=int), np.array([]))
    text = export_dot(empty)
    assert text.startswith("digraph") and text.rstrip().endswith("}")
    one = OperatorGraph(1, np.array([1]), np.array([3]), np.array([0.5]))
    lines = [ln for ln in export_dot(one).splitlines() if "->" in ln]
    assert len(lines) == 1 and 'weight="0.5"' in lines[0]
    assert 'label="X"' in export_dot(one) and 'label="Y"' in export_dot(one)


def test_edges_csv_roundtrip():
    g = circuit_graph(random_clifford_t(2, 2, 0))
    rows = read_edges_csv(export_edges_csv(g))
    assert len(rows) == g.n_edges
    assert rows[0] == (int(g.sources[0]), int(g.targets[0]), float(g.weights[0]))
    with pytest.raises(ValueError):
        read_edges_csv("a,b\n")
