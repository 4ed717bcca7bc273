"""Bit-packed N-qubit Pauli strings.

A Pauli string is stored in symplectic form as two integer masks.  Bit
``q - 1`` of ``x_mask`` is set when qubit ``q`` carries an X component
(X or Y) and bit ``q - 1`` of ``z_mask`` when it carries a Z component
(Z or Y).  Qubits are labelled 1..N and qubit 1 is the leftmost letter of
the text form, e.g. ``"XIZY"``.

Strings are unnormalized; the scaled inner product ``Tr(A^dag B) / 2^N``
makes them orthonormal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

MAX_QUBITS = 32

_LETTERS = "IXZY"  # indexed by x_bit | z_bit << 1


@dataclass(frozen=True, slots=True)
class PauliString:
    """Tensor product of single-qubit Paulis in symplectic form."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must lie in [1, {MAX_QUBITS}], got {self.n_qubits}")
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError(f"masks do not fit in {self.n_qubits} bits")

    @classmethod
    def identity(cls, n_qubits: int) -> PauliString:
        return cls(n_qubits)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse text such as ``"XIZY"`` (qubit 1 leftmost)."""
        label = label.strip().upper()
        if not label:
            raise ValueError("empty Pauli label")
        x = z = 0
        for i, ch in enumerate(label):
            if ch not in _LETTERS:
                raise ValueError(f"invalid Pauli letter {ch!r} at position {i + 1} in {label!r}")
            code = _LETTERS.index(ch)
            x |= (code & 1) << i
            z |= (code >> 1) << i
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> PauliString:
        """One non-identity letter on ``qubit`` (1-based)."""
        if not 1 <= qubit <= n_qubits:
            raise ValueError(f"qubit {qubit} outside [1, {n_qubits}]")
        chars = ["I"] * n_qubits
        chars[qubit - 1] = letter
        return cls.from_label("".join(chars))

    def letter(self, qubit: int) -> str:
        bit = qubit - 1
        return _LETTERS[((self.x_mask >> bit) & 1) | (((self.z_mask >> bit) & 1) << 1)]

    @property
    def label(self) -> str:
        return "".join(self.letter(q) for q in range(1, self.n_qubits + 1))

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


class PhasedString(NamedTuple):
    """A Pauli string times a fourth root of unity."""

    phase: complex
    string: PauliString


def _check_same_size(p1: PauliString, p2: PauliString) -> None:
    if p1.n_qubits != p2.n_qubits:
        raise ValueError(f"qubit-count mismatch: {p1.n_qubits} vs {p2.n_qubits}")


_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)


def multiply(p1: PauliString, p2: PauliString) -> PhasedString:
    """Product ``p1 @ p2`` as ``phase * string``.

    Writing each factor as ``i^{x.z} X^x Z^z``, the product picks up
    ``(-1)^{z1.x2}`` from moving ``Z^z1`` past ``X^x2``; re-expressing
    ``X^x Z^z`` in the Pauli basis removes ``i^{x.z}`` again.
    """
    _check_same_size(p1, p2)
    x = p1.x_mask ^ p2.x_mask
    z = p1.z_mask ^ p2.z_mask
    k = (
        (p1.x_mask & p1.z_mask).bit_count()
        + (p2.x_mask & p2.z_mask).bit_count()
        + 2 * (p1.z_mask & p2.x_mask).bit_count()
        - (x & z).bit_count()
    )
    return PhasedString(_PHASES[k % 4], PauliString(p1.n_qubits, x, z))


def weight(p: PauliString) -> int:
    """Number of X or Y factors (the dephasing exponent)."""
    return p.x_mask.bit_count()


def support_size(p: PauliString) -> int:
    """Number of non-identity factors."""
    return (p.x_mask | p.z_mask).bit_count()


def is_diagonal(p: PauliString) -> bool:
    """True for products of I and Z only."""
    return p.x_mask == 0


def commutes(p1: PauliString, p2: PauliString) -> bool:
    _check_same_size(p1, p2)
    return ((p1.x_mask & p2.z_mask).bit_count() + (p1.z_mask & p2.x_mask).bit_count()) % 2 == 0


def index_encode(p: PauliString) -> int:
    """Bijection onto ``[0, 4^N)``: ``x_mask | z_mask << N``; identity is 0."""
    return p.x_mask | (p.z_mask << p.n_qubits)


def index_decode(index: int, n_qubits: int) -> PauliString:
    if not 0 <= index < 4**n_qubits:
        raise ValueError(f"index {index} outside [0, 4^{n_qubits})")
    mask = (1 << n_qubits) - 1
    return PauliString(n_qubits, index & mask, index >> n_qubits)


def all_strings(n_qubits: int):
    """All ``4^N`` strings in index order."""
    return [index_decode(i, n_qubits) for i in range(4**n_qubits)]
