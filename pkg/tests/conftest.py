"""Independent dense helpers shared by the tests.

These build matrices straight from Pauli labels with numpy Kronecker
products and never touch the package's own dense code.
"""

from __future__ import annotations

import itertools
from functools import lru_cache, reduce

import numpy as np
import pytest

SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def label_matrix(label: str) -> np.ndarray:
    return reduce(np.kron, (SIGMA[c] for c in label))


def all_labels(n: int) -> list[str]:
    return ["".join(t) for t in itertools.product("IXYZ", repeat=n)]


@lru_cache(maxsize=None)
def _label_stack(n: int) -> np.ndarray:
    return np.array([label_matrix(lab) for lab in all_labels(n)])


def expand(m: np.ndarray, n: int) -> dict[str, float]:
    """Real Pauli coefficients of a Hermitian matrix, keyed by label."""
    coeffs = np.einsum("kab,ba->k", _label_stack(n), m) / 2**n
    assert np.abs(coeffs.imag).max() < 1e-10
    return {lab: c for lab, c in zip(all_labels(n), coeffs.real.tolist()) if abs(c) > 1e-12}


def embed(u: np.ndarray, support: tuple[int, ...], n: int) -> np.ndarray:
    """Place a 1- or 2-qubit unitary on ``support`` (1-based, first = high bit) by brute force."""
    d = 2**n
    full = np.zeros((d, d), dtype=complex)
    r = len(support)
    for row in range(d):
        for col in range(d):
            bits_r = [(row >> (n - q)) & 1 for q in range(1, n + 1)]
            bits_c = [(col >> (n - q)) & 1 for q in range(1, n + 1)]
            if any(bits_r[q - 1] != bits_c[q - 1] for q in range(1, n + 1) if q not in support):
                continue
            lr = sum(bits_r[q - 1] << (r - 1 - i) for i, q in enumerate(support))
            lc = sum(bits_c[q - 1] << (r - 1 - i) for i, q in enumerate(support))
            full[row, col] = u[lr, lc]
    return full


def dense_circuit_unitary(circuit) -> np.ndarray:
    n = circuit.n_qubits
    u = np.eye(2**n, dtype=complex)
    for layer in circuit.layers:
        for g in layer.gates:
            u = embed(np.asarray(g.matrix), g.support, n) @ u
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance lines collected by test_acceptance.py and echoed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
