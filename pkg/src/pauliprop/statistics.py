"""Coefficient distributions and the growth/decay law for N_eps.

The reference curves for the ascending squared coefficients are:

* single-variable Porter-Thomas, ``lambda^2(n) = (2 Lambda / D) erfinv(n / D)^2``,
  whose density is ``sqrt(D / (2 pi Lambda)) exp(-p D / (2 Lambda)) / sqrt(p)``;
* two-variable Porter-Thomas, ``lambda^2(n) = -(Lambda / D) ln(1 - n / D)``.

``n`` runs over ``0..D-1``.  Both curves diverge at ``n = D``, where
they return ``inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.optimize
import scipy.special

from .propagation import OperatorSum, PropagationTrace

TOP_EXCLUDE = 0.01


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class OrderedSpectrum:
    values: np.ndarray  # ascending
    D: int
    Lambda: float

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.values.size)

    def rescaled(self) -> OrderedSpectrum:
        """Values divided by ``Lambda`` (so ``Lambda = 1``)."""
        return OrderedSpectrum(self.values / self.Lambda, self.D, 1.0)


def ordered_spectrum(s: OperatorSum | np.ndarray, signed: bool = False, D: int | None = None) -> OrderedSpectrum:
    """Ascending ``lambda^2`` (or signed ``lambda``), padded with zeros to length ``D``."""
    if isinstance(s, OperatorSum):
        lam = s.values()
        D = 4**s.n_qubits if D is None else D
    else:
        lam = np.asarray(s, dtype=float)
        D = lam.size if D is None else D
    if lam.size > D:
        raise ValueError(f"{lam.size} coefficients do not fit in D = {D}")
    vals = lam if signed else lam**2
    padded = np.concatenate([vals, np.zeros(D - lam.size)])
    return OrderedSpectrum(np.sort(padded, kind="stable"), D, float(lam @ lam))


def _as_index(n) -> np.ndarray:
    return np.asarray(n, dtype=float)


def _check_range(n: np.ndarray, D: int) -> None:
    if np.any(n < 0) or np.any(n > D):
        raise ValueError("n must lie in [0, D]")


def pt1_curve(n, D: int, Lambda: float = 1.0):
    """Ordered single-variable Porter-Thomas values; ``inf`` at ``n = D``."""
    n = _as_index(n)
    _check_range(n, D)
    with np.errstate(over="ignore"):
        out = (2.0 * Lambda / D) * scipy.special.erfinv(n / D) ** 2
    return out if out.ndim else float(out)


def pt2_curve(n, D: int, Lambda: float = 1.0):
    """Ordered two-variable Porter-Thomas values; ``inf`` at ``n = D``."""
    n = _as_index(n)
    _check_range(n, D)
    with np.errstate(divide="ignore"):
        out = -(Lambda / D) * np.log1p(-n / D)
    return out if out.ndim else float(out)


def pt_density(p, D: int, Lambda: float = 1.0):
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("density is defined for p > 0")
    out = math.sqrt(D / (2.0 * math.pi * Lambda)) * np.exp(-p * D / (2.0 * Lambda)) / np.sqrt(p)
    return out if out.ndim else float(out)


_CURVES: dict[str, Callable] = {"pt1": pt1_curve, "pt2": pt2_curve}


def rms_residual(spectrum: OrderedSpectrum, curve: str | Callable = "pt1", Lambda: float | None = None) -> float:
    """RMS of ``value_n - curve(n)`` over ``n < D - ceil(0.01 D)``."""
    if len(spectrum) != spectrum.D:
        raise ValueError("rms_residual needs a full-length spectrum")
    fn = _CURVES[curve] if isinstance(curve, str) else curve
    lam = spectrum.Lambda if Lambda is None else Lambda
    keep = spectrum.D - math.ceil(TOP_EXCLUDE * spectrum.D)
    n = np.arange(keep)
    diff = spectrum.values[:keep] - fn(n, spectrum.D, lam)
    return float(np.sqrt(np.mean(diff**2)))


def negative_fraction(s: OperatorSum) -> float:
    v = s.values()
    return float(np.count_nonzero(v < 0) / v.size) if v.size else 0.0


# ---------------------------------------------------------------------------
# growth / decay fit


def neps_model(L, d_bar: float, decay: float, a: float, scale: float, D: int):
    """``scale * D exp(-decay L) d^L / (D - 1 + a d^L)``, with ``decay = eps gamma tau``."""
    L = np.asarray(L, dtype=float)
    log_growth = L * math.log(d_bar)
    # D d^L / (D - 1 + a d^L) = D / ((D - 1) d^-L + a)
    return scale * D * np.exp(-decay * L) / ((D - 1) * np.exp(-log_growth) + a)


@dataclass(frozen=True)
class NepsFit:
    d_bar: float
    decay: float  # eps * gamma * tau
    a: float
    scale: float
    residual: float
    tau: float  # decay / (eps * gamma), nan when either is zero

    def predict(self, L, D: int):
        return neps_model(L, self.d_bar, self.decay, self.a, self.scale, D)

    def as_dict(self) -> dict:
        return {
            "d_bar": self.d_bar,
            "tau": self.tau,
            "decay": self.decay,
            "a": self.a,
            "scale": self.scale,
            "residual": self.residual,
        }


def _fit_series(trace_or_counts) -> tuple[np.ndarray, np.ndarray, float, float]:
    if isinstance(trace_or_counts, PropagationTrace):
        counts = trace_or_counts.n_eps.astype(float)
        gamma = trace_or_counts.noise.gamma
        eps = trace_or_counts.count_eps
    else:
        counts = np.asarray(trace_or_counts, dtype=float)
        gamma = eps = math.nan
    depth = np.arange(1, counts.size + 1, dtype=float)
    return depth, counts, gamma, eps


def fit_neps(trace, D: int, *, decay: bool | None = None, gamma: float | None = None, eps: float | None = None) -> NepsFit:
    """Log-domain least-squares fit of the growth/decay law.

    Parameters
    ----------
    trace
        A :class:`PropagationTrace` (its ``n_eps`` column is used) or a
        plain sequence of counts indexed by depth ``1..L``.
    D
        Order of the graph, ``4^N`` for a universal circuit.
    decay
        Whether the exponential-decay factor is free.  By default it is
        free when ``gamma > 0`` and fixed to 1 otherwise.

    Zero counts carry no information in the log domain and are skipped.
    A flat curve cannot separate slow growth from instant saturation and
    is reported as ``d_bar = 1``.
    The optimizer is Nelder-Mead over ``(log(d - 1), log a, log scale[,
    decay])`` with several starting points; the decay term is dropped when fixed.
    """
    depth, counts, tr_gamma, tr_eps = _fit_series(trace)
    gamma = tr_gamma if gamma is None else gamma
    eps = tr_eps if eps is None else eps
    if counts.size < 10:
        raise FitError("need at least 10 trace points")
    pos = counts > 0
    if np.count_nonzero(pos) < 3:
        raise FitError("trace is degenerate (fewer than 3 nonzero counts)")
    if decay is None:
        decay = bool(gamma and gamma > 0)
    x, y = depth[pos], np.log(counts[pos])
    if np.ptp(y) == 0.0:
        # flat curve: growth and saturation are indistinguishable, report no growth
        level = float(counts[pos][0])
        return NepsFit(d_bar=1.0, decay=0.0, a=1.0, scale=level, residual=0.0, tau=math.nan)

    def unpack(theta):
        d = 1.0 + math.exp(theta[0])
        r = theta[3] if decay else 0.0
        return d, r, math.exp(theta[1]), math.exp(theta[2])

    def loss(theta):
        d, r, a, s = unpack(theta)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            res = y - np.log(neps_model(x, d, r, a, s, D))
        val = float(res @ res)
        return val if math.isfinite(val) else 1e300

    # starting points: growth rate from the early slope, decay from the late slope
    k = max(3, min(10, x.size // 4))
    slope0 = np.polyfit(x[:k], y[:k], 1)[0]
    tail = -np.polyfit(x[-k:], y[-k:], 1)[0]
    starts = []
    for g in (max(slope0, 1e-3), 0.05, 0.5):
        for a0 in (1.0, 0.1, 10.0):
            s0 = max(math.exp(y.max()) * a0 / D, 1e-12)
            th = [math.log(math.expm1(g)), math.log(a0), math.log(s0)]
            if decay:
                th.append(max(tail, 0.0))
            starts.append(th)
    best = None
    for th in starts:
        res = scipy.optimize.minimize(
            loss,
            np.array(th),
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 20000, "maxfev": 40000},
        )
        if best is None or res.fun < best.fun:
            best = res
    d, r, a, s = unpack(best.x)
    resid = math.sqrt(best.fun / x.size)
    tau = r / (eps * gamma) if (eps and gamma and eps > 0 and gamma > 0) else math.nan
    return NepsFit(d_bar=d, decay=float(r), a=a, scale=s, residual=resid, tau=float(tau))
