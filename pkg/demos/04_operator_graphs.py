# Operator graphs: an edge k -> j whenever string k spawns string j.
from pauliprop.circuits import random_clifford, random_clifford_t, random_matchgate_circuit
from pauliprop.network import circuit_graph, component_of, export_dot, summary
from pauliprop.pauli import PauliString, index_encode

for name, c in [
    ("clifford+T", random_clifford_t(4, 4, seed=1)),
    ("clifford", random_clifford(4, 4, seed=1)),
    ("matchgate", random_matchgate_circuit(4, 4, seed=1)),
]:
    g = circuit_graph(c)
    s = summary(g)
    print(f"{name:11s} mean out-degree {s['d_mean']:.2f}, max {s['d_max']}, {len(s['components'])} components")

# matchgates keep Z_4 inside a block of N^2 = 16 strings
g = circuit_graph(random_matchgate_circuit(4, 4, seed=1))
z4 = index_encode(PauliString.from_label("IIIZ"))
block = sorted(g.label(k) for k in component_of(g, z4))
print(len(block), "strings:", " ".join(block))

dot = export_dot(circuit_graph(random_clifford(2, 2, seed=0)))
print(dot.splitlines()[0], "...", len(dot.splitlines()), "lines")
