"""Dense brute-force references.

Everything here works with explicit ``2^N x 2^N`` matrices built by
Kronecker products, independent of the sparse engine.  The transfer
matrices are limited to ``N <= 6`` and density-matrix evolution to
``N <= 10``.

Dense convention: qubit 1 is the most significant tensor factor, so
``|0...0>`` is basis state 0 and ``kron(P_1, ..., P_N)`` is the matrix of
the string ``P_1 ... P_N``.
"""

from __future__ import annotations

import itertools
import struct
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .circuits import Circuit, Layer
from .gates import PAULI_MATRICES, Gate
from .pauli import PauliString
from .propagation import NOISELESS, NoiseModel, OperatorSum

MAX_OMEGA_QUBITS = 6
MAX_STATE_QUBITS = 10
MAX_EIGEN_QUBITS = 4
OMEGA_MAGIC = b"OMG1"


class SizeLimitError(ValueError):
    """Dense construction would exceed the memory bound."""


def _require(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise SizeLimitError(f"{what} is limited to N <= {limit}, got N = {n}")


# ---------------------------------------------------------------------------
# dense building blocks


def pauli_matrix(p: PauliString) -> np.ndarray:
    m = np.eye(1, dtype=complex)
    for q in range(1, p.n_qubits + 1):
        m = np.kron(m, PAULI_MATRICES[p.letter(q)])
    return m


def operator_matrix(s: OperatorSum) -> np.ndarray:
    d = 2**s.n_qubits
    out = np.zeros((d, d), dtype=complex)
    for p, c in s.items():
        out += c * pauli_matrix(p)
    return out


def embed_gate(g: Gate, n: int) -> np.ndarray:
    """Full ``2^n x 2^n`` unitary of ``g`` acting on its support."""
    r = g.arity
    u = g.matrix.reshape((2,) * (2 * r))
    eye = np.eye(2**n, dtype=complex).reshape((2,) * (2 * n))
    axes = [q - 1 for q in g.support]
    out = np.tensordot(u, eye, axes=(list(range(r, 2 * r)), axes))
    # tensordot puts the gate's output axes first; move them back into place
    rest = [a for a in range(n) if a not in axes]
    perm = [0] * (2 * n)
    for i, a in enumerate(axes):
        perm[a] = i
    for i, a in enumerate(rest):
        perm[a] = r + i
    for a in range(n, 2 * n):
        perm[a] = a
    out = np.transpose(out, perm)
    return out.reshape(2**n, 2**n)


def layer_unitary(layer: Layer, n: int) -> np.ndarray:
    u = np.eye(2**n, dtype=complex)
    for g in layer.gates:
        u = embed_gate(g, n) @ u
    return u


def circuit_unitary(c: Circuit) -> np.ndarray:
    u = np.eye(2**c.n_qubits, dtype=complex)
    for layer in c.layers:
        u = layer_unitary(layer, c.n_qubits) @ u
    return u


@lru_cache(maxsize=None)
def _code_to_index(n: int) -> np.ndarray:
    """Map per-qubit letter codes (I, X, Y, Z = 0..3, qubit 1 first) to index_encode."""
    xbit = (0, 1, 1, 0)
    zbit = (0, 0, 1, 1)
    out = np.empty(4**n, dtype=np.intp)
    for flat, codes in enumerate(itertools.product(range(4), repeat=n)):
        idx = 0
        for q, c in enumerate(codes):
            idx |= xbit[c] << q
            idx |= zbit[c] << (n + q)
        out[flat] = idx
    return out


_PAULI_STACK = np.array([PAULI_MATRICES[k] for k in "IXYZ"])


def pauli_coefficients(m: np.ndarray) -> np.ndarray:
    """Scaled inner products ``Tr(P_j M) / 2^N`` for a batch of matrices.

    Accepts shape ``(d, d)`` or ``(B, d, d)``.  The result is indexed by
    :func:`pauli.index_encode` along the last axis.
    """
    m = np.asarray(m, dtype=complex)
    single = m.ndim == 2
    if single:
        m = m[None]
    batch, d = m.shape[0], m.shape[1]
    n = d.bit_length() - 1
    # axes: batch, r_1..r_n, c_1..c_n
    t = m.reshape((batch,) + (2,) * (2 * n))
    # contract row/col pair of each qubit with S[p, r, c] = P_p[c, r] / 2
    s = np.transpose(_PAULI_STACK, (0, 2, 1)) / 2
    for q in range(n):
        # current layout: batch, p_1..p_q, r_{q+1}..r_n, c_{q+1}..c_n
        r_axis = 1 + q
        c_axis = 1 + q + (n - q)
        t = np.tensordot(t, s, axes=([r_axis, c_axis], [1, 2]))
        # new p axis is last; move it to position 1 + q
        t = np.moveaxis(t, -1, 1 + q)
    flat = t.reshape(batch, 4**n)
    out = np.empty_like(flat)
    out[:, _code_to_index(n)] = flat
    return out[0] if single else out


@lru_cache(maxsize=8)
def _dense_basis(n: int) -> np.ndarray:
    """All ``4^n`` Pauli matrices ordered by ``index_encode``."""
    mats = np.empty((4**n, 2**n, 2**n), dtype=complex)
    letters = "IXZY"
    for idx in range(4**n):
        m = np.eye(1, dtype=complex)
        for q in range(n):
            code = ((idx >> q) & 1) | (((idx >> (n + q)) & 1) << 1)
            m = np.kron(m, PAULI_MATRICES[letters[code]])
        mats[idx] = m
    return mats


def unitary_omega(u: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Real ``4^N x 4^N`` transfer matrix of a dense unitary."""
    d = u.shape[0]
    n = d.bit_length() - 1
    basis = _dense_basis(n)
    D = 4**n
    out = np.empty((D, D))
    ud = u.conj().T
    for start in range(0, D, chunk):
        conj = ud[None] @ basis[start : start + chunk] @ u[None]
        coeffs = pauli_coefficients(conj)
        if np.max(np.abs(coeffs.imag)) > 1e-9:
            raise ValueError("transfer matrix has a non-negligible imaginary part")
        out[:, start : start + chunk] = coeffs.real.T
    return out


def damping_diagonal(n: int, noise: NoiseModel) -> np.ndarray:
    q = np.array([bin(k & ((1 << n) - 1)).count("1") for k in range(4**n)])
    return np.exp(-2.0 * noise.gamma * noise.t * q)


# ---------------------------------------------------------------------------
# full transfer matrix


@dataclass(frozen=True)
class FullOmega:
    n_qubits: int
    entries: np.ndarray

    def column(self, k: int) -> np.ndarray:
        return self.entries[:, k]

    def to_bytes(self) -> bytes:
        header = OMEGA_MAGIC + struct.pack("<I", self.n_qubits)
        return header + np.ascontiguousarray(self.entries, dtype="<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> FullOmega:
        if data[:4] != OMEGA_MAGIC:
            raise ValueError("bad FullOmega magic")
        (n,) = struct.unpack("<I", data[4:8])
        D = 4**n
        arr = np.frombuffer(data, dtype="<f8", offset=8)
        if arr.size != D * D:
            raise ValueError("FullOmega payload has the wrong length")
        return cls(n, arr.reshape(D, D).astype(float))

    def edges_csv(self, threshold: float = 1e-9) -> str:
        js, ks = np.nonzero(np.abs(self.entries) > threshold)
        lines = ["j,k,omega"]
        lines += [f"{j},{k},{self.entries[j, k]:.17g}" for j, k in zip(js.tolist(), ks.tolist())]
        return "\n".join(lines) + "\n"


def build_full_omega(c: Circuit, noise: NoiseModel | None = None) -> FullOmega:
    """``Omega^(1) D Omega^(2) D ... Omega^(L) D`` as a dense matrix.

    Without dephasing the product is computed in one go from the full
    circuit unitary, which gives the same matrix.
    """
    n = c.n_qubits
    _require(n, MAX_OMEGA_QUBITS, "build_full_omega")
    noise = noise or NOISELESS
    if noise.gamma == 0:
        return FullOmega(n, unitary_omega(circuit_unitary(c)))
    return FullOmega(n, layered_omega(c, noise))


def layered_omega(c: Circuit, noise: NoiseModel | None = None) -> np.ndarray:
    """Explicit per-layer product (used with dephasing)."""
    n = c.n_qubits
    _require(n, MAX_OMEGA_QUBITS, "layered_omega")
    noise = noise or NOISELESS
    diag = damping_diagonal(n, noise)
    total = np.eye(4**n)
    for layer in c.layers:
        total = total @ (unitary_omega(layer_unitary(layer, n)) * diag[None, :])
    return total


def check_orthogonality(o: FullOmega | np.ndarray) -> float:
    """``max |(Omega^T Omega - I)_jl|``."""
    m = o.entries if isinstance(o, FullOmega) else np.asarray(o)
    return float(np.max(np.abs(m.T @ m - np.eye(m.shape[0]))))


def omega_apply(o: FullOmega, s: OperatorSum) -> np.ndarray:
    """Coefficient vector of the propagated observable (index_encode order)."""
    from .pauli import index_encode

    lam = np.zeros(4**o.n_qubits)
    for p, v in s.items():
        lam[index_encode(p)] = v
    return o.entries @ lam


# ---------------------------------------------------------------------------
# density-matrix evolution


def zero_state(n: int) -> np.ndarray:
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def dephase(rho: np.ndarray, n: int, noise: NoiseModel) -> np.ndarray:
    """Z-dephasing for time ``t`` on each qubit, Kraus form ``(1-p) rho + p Z rho Z``."""
    if noise.gamma == 0:
        return rho
    p = 0.5 * (1.0 - np.exp(-2.0 * noise.gamma * noise.t))
    idx = np.arange(2**n)
    for q in range(1, n + 1):
        sign = 1.0 - 2.0 * ((idx >> (n - q)) & 1)
        z_rho_z = sign[:, None] * rho * sign[None, :]
        rho = (1.0 - p) * rho + p * z_rho_z
    return rho


def evolve_density(c: Circuit, noise: NoiseModel | None = None, rho: np.ndarray | None = None) -> np.ndarray:
    n = c.n_qubits
    _require(n, MAX_STATE_QUBITS, "density-matrix evolution")
    noise = noise or NOISELESS
    rho = zero_state(n) if rho is None else rho
    for layer in c.layers:
        u = layer_unitary(layer, n)
        rho = u @ rho @ u.conj().T
        rho = dephase(rho, n, noise)
    return rho


def schrodinger_expectation(c: Circuit, observable: OperatorSum, noise: NoiseModel | None = None) -> float:
    """``Tr(rho_L A)`` from ``|0...0>`` with dephasing after every layer."""
    if observable.n_qubits != c.n_qubits:
        raise ValueError("observable and circuit qubit counts differ")
    rho = evolve_density(c, noise)
    return float(np.real(np.trace(rho @ operator_matrix(observable))))


def check_density_matrix(rho: np.ndarray) -> tuple[float, float, float]:
    """(Hermiticity error, |trace - 1|, minimum eigenvalue)."""
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = float(abs(np.trace(rho) - 1.0))
    lo = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return herm, tr, lo


# ---------------------------------------------------------------------------
# eigen-dyad basis


@dataclass(frozen=True)
class EigenbasisReport:
    offdiag_max: float
    diag_error: float
    energies: np.ndarray
    degenerate: bool
    omega: np.ndarray


def eigenbasis_analysis(c: Circuit, t_total: float = 1.0) -> EigenbasisReport:
    """Transfer matrix of the circuit in the dyad basis ``|E_n><E_m|``.

    ``U = exp(-i H_eff t)``.  The eigenvectors come from the complex Schur
    form, which stays orthonormal inside degenerate eigenspaces.  The
    energies use principal-branch phases in ``(-pi, pi]``.
    """
    n = c.n_qubits
    _require(n, MAX_EIGEN_QUBITS, "eigenbasis_offdiagonal")
    u = circuit_unitary(c)
    tri, q = scipy.linalg.schur(u, output="complex")
    vals = np.diag(tri)
    energies = -np.angle(vals) / t_total
    d = u.shape[0]
    gaps = np.abs(vals[:, None] - vals[None, :])[~np.eye(d, dtype=bool)]
    degenerate = bool(gaps.size and gaps.min() < 1e-10)
    if degenerate:
        warnings.warn("degenerate eigenvalues: the dyad basis is not unique", RuntimeWarning, stacklevel=2)
    # dyads B_(n,m) = |E_n><E_m|, flattened row-major; j = n * d + m
    dyads = np.einsum("an,bm->nmab", q, q.conj()).reshape(d * d, d, d)
    conj = u.conj().T[None] @ dyads @ u[None]
    omega = dyads.conj().reshape(d * d, d * d) @ conj.reshape(d * d, d * d).T
    diag = np.diag(omega)
    off = omega - np.diag(diag)
    e_n = np.repeat(energies, d)
    e_m = np.tile(energies, d)
    expected = np.exp(-1j * (e_m - e_n) * t_total)
    return EigenbasisReport(
        offdiag_max=float(np.max(np.abs(off))),
        diag_error=float(np.max(np.abs(diag - expected))),
        energies=energies,
        degenerate=degenerate,
        omega=omega,
    )


def eigenbasis_offdiagonal(c: Circuit, t_total: float = 1.0) -> float:
    """Largest off-diagonal magnitude of the dyad-basis transfer matrix.

    Raises ``AssertionError`` if the diagonal differs from
    ``exp(-i (E_m - E_n) t)`` by more than 1e-8.
    """
    report = eigenbasis_analysis(c, t_total)
    if report.diag_error > 1e-8:
        raise AssertionError(f"diagonal phases deviate by {report.diag_error:.3g}")
    return report.offdiag_max
