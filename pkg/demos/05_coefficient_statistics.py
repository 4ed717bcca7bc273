# Coefficients of a deeply scrambled operator follow Porter-Thomas.
import numpy as np

from pauliprop.circuits import random_clifford_t
from pauliprop.propagation import NoiseModel, default_observable, propagate
from pauliprop.statistics import (
    fit_neps,
    negative_fraction,
    ordered_spectrum,
    pt1_curve,
    pt2_curve,
    rms_residual,
)

out, trace = propagate(random_clifford_t(4, 200, seed=0), default_observable(4))
spectrum = ordered_spectrum(out)
print("rms residual vs single-variable PT:", rms_residual(spectrum, "pt1"))
print("rms residual vs two-variable PT:   ", rms_residual(spectrum, "pt2"))
print("fraction of negative coefficients: ", negative_fraction(out))

n = np.array([64, 128, 192])
print("sorted lambda^2:", spectrum.values[n])
print("pt1 curve:      ", pt1_curve(n, spectrum.D, spectrum.Lambda))
print("pt2 curve:      ", pt2_curve(n, spectrum.D, spectrum.Lambda))

# the growth/decay law for N_eps, fitted to a noisy trace
_, noisy = propagate(random_clifford_t(4, 200, seed=0), default_observable(4), eps=0.01, noise=NoiseModel(0.01))
fit = fit_neps(noisy, D=256)
print({k: round(v, 4) for k, v in fit.as_dict().items()})
