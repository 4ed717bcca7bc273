# How single gates act on Pauli strings, and the full transfer matrix.
import numpy as np

from pauliprop.circuits import random_clifford, random_clifford_t
from pauliprop.gates import conjugate, gate
from pauliprop.oracle import build_full_omega, check_orthogonality
from pauliprop.pauli import PauliString

X3 = PauliString.from_label("IIX")
for p, c in conjugate(gate("T", 3), X3):
    print(f"T^dag X T  ->  {c:+.6f} {p}")  # a T gate splits X in two

for p, c in conjugate(gate("H", 1), PauliString.from_label("ZI")):
    print(f"H^dag Z H  ->  {c:+.1f} {p}")  # a Clifford gate maps a string to one string

# Omega for a whole circuit: real and orthogonal without noise
omega = build_full_omega(random_clifford_t(3, 10, seed=0))
print("orthogonality error:", check_orthogonality(omega))

# for a Clifford circuit every column has exactly one entry, +1 or -1
cliff = build_full_omega(random_clifford(3, 10, seed=0)).entries
print("nonzeros per column:", set((np.abs(cliff) > 1e-9).sum(axis=0).tolist()))
