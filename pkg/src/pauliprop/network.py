"""Directed operator graphs from transfer matrices.

Nodes are the ``4^N`` Pauli strings in ``index_encode`` order.  An edge
``k -> j`` means that basis string ``k`` spawns string ``j``, i.e.
``|Omega_jk| > threshold``.  The identity node is a fixed point with a
self-loop, and it is left out of the degree statistics.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .circuits import Circuit
from .oracle import FullOmega, build_full_omega
from .pauli import index_decode
from .propagation import NoiseModel

DEFAULT_THRESHOLD = 1e-9


@dataclass(frozen=True)
class OperatorGraph:
    n_qubits: int
    sources: np.ndarray  # k
    targets: np.ndarray  # j
    weights: np.ndarray  # |Omega_jk|
    threshold: float = DEFAULT_THRESHOLD

    @property
    def n_nodes(self) -> int:
        return 4**self.n_qubits

    @property
    def n_edges(self) -> int:
        return int(self.sources.size)

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.sources, minlength=self.n_nodes)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.targets, minlength=self.n_nodes)

    def adjacency(self) -> scipy.sparse.csr_matrix:
        """Sparse matrix with entry (k, j) = weight of the edge ``k -> j``."""
        return scipy.sparse.csr_matrix(
            (self.weights, (self.sources, self.targets)), shape=(self.n_nodes, self.n_nodes)
        )

    def label(self, node: int) -> str:
        return index_decode(int(node), self.n_qubits).label


def omega_graph(o: FullOmega, threshold: float = DEFAULT_THRESHOLD) -> OperatorGraph:
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    w = np.abs(o.entries)
    js, ks = np.nonzero(w > threshold)
    order = np.lexsort((js, ks))
    js, ks = js[order], ks[order]
    return OperatorGraph(o.n_qubits, ks.astype(np.intp), js.astype(np.intp), w[js, ks], threshold)


def circuit_graph(c: Circuit, noise: NoiseModel | None = None, threshold: float = DEFAULT_THRESHOLD) -> OperatorGraph:
    return omega_graph(build_full_omega(c, noise), threshold)


def _non_identity_degrees(g: OperatorGraph) -> np.ndarray:
    return g.out_degrees()[1:]


def mean_out_degree(g: OperatorGraph) -> float:
    return float(_non_identity_degrees(g).mean())


def max_out_degree(g: OperatorGraph) -> int:
    return int(_non_identity_degrees(g).max())


def weak_components(g: OperatorGraph) -> list[set[int]]:
    """Weakly connected components, largest first (ties by smallest node)."""
    _, labels = connected_components(g.adjacency(), directed=True, connection="weak")
    comps: dict[int, list[int]] = {}
    for node, lab in enumerate(labels.tolist()):
        comps.setdefault(lab, []).append(node)
    out = sorted(comps.values(), key=lambda nodes: (-len(nodes), nodes[0]))
    return [set(nodes) for nodes in out]


def component_of(g: OperatorGraph, node: int) -> set[int]:
    for comp in weak_components(g):
        if node in comp:
            return comp
    raise ValueError(f"node {node} not in graph")


def crossing_edges(g: OperatorGraph, components: list[set[int]]) -> int:
    """Number of edges of ``g`` joining two different parts of ``components``."""
    label = np.full(g.n_nodes, -1)
    for i, comp in enumerate(components):
        label[list(comp)] = i
    return int(np.count_nonzero(label[g.sources] != label[g.targets]))


def per_layer_degree(c: Circuit, threshold: float = DEFAULT_THRESHOLD) -> float:
    """Growth-rate estimate: geometric mean of single-layer mean out-degrees."""
    if not c.layers:
        raise ValueError("empty circuit")
    means = [mean_out_degree(circuit_graph(Circuit(c.n_qubits, (layer,)), threshold=threshold)) for layer in c.layers]
    return float(np.exp(np.mean(np.log(means))))


def summary(g: OperatorGraph) -> dict:
    return {
        "d_mean": mean_out_degree(g),
        "d_max": max_out_degree(g),
        "components": [len(c) for c in weak_components(g)],
    }


# ---------------------------------------------------------------------------
# export


def export_dot(g: OperatorGraph, name: str = "omega") -> str:
    top = float(g.weights.max()) if g.n_edges else 1.0
    lines = [f"digraph {name} {{"]
    used = sorted(set(g.sources.tolist()) | set(g.targets.tolist()))
    for node in used:
        lines.append(f'  n{node} [label="{g.label(node)}"];')
    for k, j, w in zip(g.sources.tolist(), g.targets.tolist(), g.weights.tolist()):
        alpha = w / top if top > 0 else 0.0
        lines.append(f'  n{k} -> n{j} [weight="{w:.17g}", opacity="{alpha:.6f}", color="#000000{int(round(255 * alpha)):02x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_edges_csv(g: OperatorGraph) -> str:
    buf = io.StringIO()
    buf.write("from,to,weight\n")
    for k, j, w in zip(g.sources.tolist(), g.targets.tolist(), g.weights.tolist()):
        buf.write(f"{k},{j},{w:.17g}\n")
    return buf.getvalue()


def read_edges_csv(text: str) -> list[tuple[int, int, float]]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != "from,to,weight":
        raise ValueError("not an edge CSV")
    out = []
    for ln in lines[1:]:
        k, j, w = ln.split(",")
        out.append((int(k), int(j), float(w)))
    return out
