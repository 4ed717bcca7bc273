# Error from pruning during propagation vs truncating once at the end.
import numpy as np

from pauliprop.circuits import random_clifford_t
from pauliprop.oracle import schrodinger_expectation
from pauliprop.propagation import NoiseModel, default_observable, expectation_zero_state, global_truncate, propagate

obs = default_observable(4)
eps = 0.01
for gamma in (0.0, 0.005):
    noise = NoiseModel(gamma)
    c = random_clifford_t(4, 200, seed=2)
    exact = schrodinger_expectation(c, obs, noise)  # dense density matrix
    _, pruned = propagate(c, obs, eps, noise)
    full, _ = propagate(c, obs, 0.0, noise)
    glob = expectation_zero_state(global_truncate(full, eps))
    print(f"gamma={gamma}: exact {exact:+.4f}  pruned error {pruned.expectation - exact:+.4f}  global error {glob - exact:+.4f}")

    # weight lost to pruning shows up in the norm
    print("   sum lambda^2 after pruning:", np.round(pruned.norms[-1], 4))
