"""Gates and their action on Pauli strings by conjugation.

Every gate carries a dense unitary on its support.  The local transfer
matrix ``omega[j, k] = Tr(P_j U^dag P_k U) / 2^r`` (``r`` = arity) is
computed numerically for all gate kinds, named Cliffords included, and
column ``k`` gives the expansion of ``U^dag P_k U``.

Phase conventions: ``S = exp(i Z pi/4)`` and ``T = exp(i Z pi/8)``.  With
this ``T``, ``T^dag X T = (X + Y)/sqrt(2)``; the common ``diag(1, e^{i pi/4})``
gives ``(X - Y)/sqrt(2)`` instead.  For two-qubit gates, ``support[0]`` is
the most significant factor of the matrix (the CNOT control).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .pauli import PauliString

UNITARY_TOL = 1e-10
ZERO_TOL = 1e-12

NAMED_KINDS = ("I", "X", "Y", "Z", "H", "S", "T", "CZ", "CNOT")
MATRIX_KINDS = ("matchgate", "u1", "u2")
CLIFFORD_KINDS = ("I", "X", "Y", "Z", "H", "S", "CZ", "CNOT")


class GateError(ValueError):
    """Invalid gate: bad support, non-unitary matrix, determinant mismatch."""


_SQ2 = np.sqrt(0.5)
PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_NAMED_1Q = {
    "I": PAULI_MATRICES["I"],
    "X": PAULI_MATRICES["X"],
    "Y": PAULI_MATRICES["Y"],
    "Z": PAULI_MATRICES["Z"],
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "S": np.diag([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)]),
    "T": np.diag([np.exp(1j * np.pi / 8), np.exp(-1j * np.pi / 8)]),
}
_NAMED_2Q = {
    "I": np.eye(4, dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}


def _unitarity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and _unitarity_error(m) <= tol


def validate_matchgate(a, b) -> bool:
    """Both blocks unitary and ``|det a - det b| <= 1e-10``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        return False
    if not (is_unitary(a) and is_unitary(b)):
        return False
    return abs(np.linalg.det(a) - np.linalg.det(b)) <= UNITARY_TOL


def matchgate_matrix(a, b) -> np.ndarray:
    """Embed the outer block ``a`` on {|00>, |11>} and inner ``b`` on {|01>, |10>}."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    u = np.zeros((4, 4), dtype=complex)
    u[np.ix_([0, 3], [0, 3])] = a
    u[np.ix_([1, 2], [1, 2])] = b
    return u


def _local_paulis(arity: int) -> list[np.ndarray]:
    """Dense local Pauli strings in local index order ``x | z << arity``."""
    out = []
    for idx in range(4**arity):
        m = np.eye(1, dtype=complex)
        for i in range(arity):
            xb = (idx >> i) & 1
            zb = (idx >> (arity + i)) & 1
            m = np.kron(m, PAULI_MATRICES["IXZY"[xb | zb << 1]])
        out.append(m)
    return out


_LOCAL_PAULIS = {1: _local_paulis(1), 2: _local_paulis(2)}


@dataclass(frozen=True)
class LocalOmega:
    """Real transfer matrix of one gate over local Pauli strings."""

    arity: int
    entries: np.ndarray

    def column(self, k: int) -> list[tuple[int, float]]:
        col = self.entries[:, k]
        return [(int(j), float(col[j])) for j in np.flatnonzero(np.abs(col) > ZERO_TOL)]


def omega_from_unitary(u: np.ndarray) -> np.ndarray:
    """``entries[j, k] = Tr(P_j U^dag P_k U) / d`` over local Pauli strings."""
    d = u.shape[0]
    arity = d.bit_length() - 1
    paulis = _LOCAL_PAULIS[arity]
    stack = np.array(paulis)
    conj = np.einsum("ba,kbc,cd->kad", u.conj(), stack, u)
    # Tr(P_j M_k) = sum_ab P_j[b, a] M_k[a, b]
    vals = np.einsum("jba,kab->jk", stack, conj) / d
    if np.max(np.abs(vals.imag)) > UNITARY_TOL:
        raise GateError("transfer matrix has a non-negligible imaginary part")
    out = vals.real.copy()
    out[np.abs(out) <= ZERO_TOL] = 0.0
    return out


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate on 1 or 2 qubits (1-based indices).

    ``kind`` is one of the named kinds, ``"matchgate"`` (blocks ``a`` and
    ``b``), or ``"u1"``/``"u2"`` for generic unitaries.
    """

    kind: str
    support: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)
    a: np.ndarray | None = field(default=None, repr=False)
    b: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        support = tuple(int(q) for q in self.support)
        object.__setattr__(self, "support", support)
        if len(support) not in (1, 2):
            raise GateError(f"gate support must have 1 or 2 qubits, got {support}")
        if len(set(support)) != len(support):
            raise GateError(f"gate support indices must be distinct, got {support}")
        if min(support) < 1:
            raise GateError(f"qubit indices are 1-based, got {support}")
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        d = 2 ** len(support)
        if m.shape != (d, d):
            raise GateError(f"{self.kind}: matrix shape {m.shape} does not match support {support}")
        if not is_unitary(m):
            raise GateError(f"{self.kind}: matrix is not unitary (error {_unitarity_error(m):.3g})")
        if self.kind == "matchgate":
            if self.a is None or self.b is None:
                raise GateError("matchgate requires blocks a and b")
            if not validate_matchgate(self.a, self.b):
                raise GateError("matchgate blocks must be unitary with equal determinants")

    @property
    def arity(self) -> int:
        return len(self.support)

    @property
    def is_identity(self) -> bool:
        return self.kind == "I"

    @cached_property
    def omega(self) -> LocalOmega:
        if self.kind in NAMED_KINDS:
            entries = _named_omega(self.kind, self.arity)
        else:
            entries = omega_from_unitary(self.matrix)
        entries.setflags(write=False)
        return LocalOmega(self.arity, entries)

    @cached_property
    def table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Padded sparse columns: (counts[k], rows[k, :], values[k, :])."""
        ent = self.omega.entries
        n = ent.shape[0]
        nz = np.abs(ent) > ZERO_TOL
        counts = nz.sum(axis=0)
        width = int(counts.max())
        rows = np.zeros((n, width), dtype=np.int64)
        vals = np.zeros((n, width))
        for k in range(n):
            js = np.flatnonzero(nz[:, k])
            rows[k, : len(js)] = js
            vals[k, : len(js)] = ent[js, k]
        return counts, rows, vals

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        same = self.kind == other.kind and self.support == other.support
        return same and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.kind, self.support, self.matrix.tobytes()))


_NAMED_OMEGA_CACHE: dict[tuple[str, int], np.ndarray] = {}


def _named_omega(kind: str, arity: int) -> np.ndarray:
    key = (kind, arity)
    if key not in _NAMED_OMEGA_CACHE:
        _NAMED_OMEGA_CACHE[key] = omega_from_unitary(named_matrix(kind, arity))
    return _NAMED_OMEGA_CACHE[key].copy()


def named_matrix(kind: str, arity: int | None = None) -> np.ndarray:
    if kind in _NAMED_2Q and (arity == 2 or (arity is None and kind != "I")):
        return _NAMED_2Q[kind].copy()
    if kind in _NAMED_1Q and arity in (None, 1):
        return _NAMED_1Q[kind].copy()
    raise GateError(f"no named gate {kind!r} with arity {arity}")


def gate(kind: str, *support: int) -> Gate:
    """A named gate, e.g. ``gate("H", 1)`` or ``gate("CNOT", 1, 2)``."""
    if kind not in NAMED_KINDS:
        raise GateError(f"unknown named gate {kind!r}")
    return Gate(kind, support, named_matrix(kind, len(support)))


def unitary_gate(matrix, *support: int) -> Gate:
    """Generic one- or two-qubit unitary (kind ``u1`` / ``u2``)."""
    kind = "u1" if len(support) == 1 else "u2"
    return Gate(kind, support, np.asarray(matrix, dtype=complex))


def matchgate(a, b, q1: int, q2: int) -> Gate:
    a = np.array(a, dtype=complex)
    b = np.array(b, dtype=complex)
    if not validate_matchgate(a, b):
        raise GateError("matchgate blocks must be unitary with equal determinants")
    a.setflags(write=False)
    b.setflags(write=False)
    return Gate("matchgate", (q1, q2), matchgate_matrix(a, b), a=a, b=b)


def local_omega(g: Gate) -> LocalOmega:
    return g.omega


def local_index(g: Gate, p: PauliString) -> int:
    """Local Pauli index of ``p`` restricted to the gate support."""
    r = g.arity
    k = 0
    for i, q in enumerate(g.support):
        k |= ((p.x_mask >> (q - 1)) & 1) << i
        k |= ((p.z_mask >> (q - 1)) & 1) << (r + i)
    return k


def replace_local(g: Gate, p: PauliString, j: int) -> PauliString:
    """Copy of ``p`` with its support restriction replaced by local string ``j``."""
    r = g.arity
    x, z = p.x_mask, p.z_mask
    for i, q in enumerate(g.support):
        bit = 1 << (q - 1)
        x = (x & ~bit) | (((j >> i) & 1) << (q - 1))
        z = (z & ~bit) | (((j >> (r + i)) & 1) << (q - 1))
    return PauliString(p.n_qubits, x, z)


def conjugate(g: Gate, p: PauliString, coeff: float = 1.0) -> list[tuple[PauliString, float]]:
    """Expand ``coeff * U^dag p U`` as a list of (string, coefficient)."""
    if max(g.support) > p.n_qubits:
        raise GateError(f"gate support {g.support} out of range for {p.n_qubits} qubits")
    k = local_index(g, p)
    return [(replace_local(g, p, j), coeff * w) for j, w in g.omega.column(k)]
