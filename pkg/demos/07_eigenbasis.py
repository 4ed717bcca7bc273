# In the eigenbasis of the whole-circuit unitary the transfer matrix is diagonal.
import numpy as np

from pauliprop.circuits import Circuit, Layer, random_clifford_t
from pauliprop.gates import gate
from pauliprop.oracle import eigenbasis_analysis

r = eigenbasis_analysis(random_clifford_t(2, 5, seed=4))
print("largest off-diagonal entry:", r.offdiag_max)
print("diagonal vs exp(-i(E_m - E_n)t):", r.diag_error)
print("effective energies:", np.round(r.energies, 4))

# a single T gate has eigenphases +-pi/8
t = eigenbasis_analysis(Circuit(1, (Layer.of(gate("T", 1)),)))
print("T energies:", t.energies, " diagonal phases:", np.round(np.angle(np.diag(t.omega)), 4))
