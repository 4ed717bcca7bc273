"""Layered circuits, seeded random families, and JSON (de)serialization.

A :class:`Layer` is one unitary ``U_l`` followed by one round of
dephasing.  It is made of ordered *moments*.  Gates inside a moment have
disjoint supports, and the moments run in stored order.  For example, a
Clifford+T layer has three moments: the single-qubit gates, the CZ slots
on pairs (1,2),(3,4),..., then the CZ slots on pairs (2,3),(4,5),...
A matchgate layer has ``n - 1`` single-gate moments applied along the chain.

Random streams
--------------
Every random draw comes from its own PCG64 stream built as
``SeedSequence(seed, spawn_key=(family, layer, slot))``, with 0-based
``layer`` and ``slot``.  Slots ``0..n-1`` are the single-qubit positions.
Slot ``n - 1 + i`` is the pair ``(i, i + 1)``.  The circuit for
``(family, n, L, seed)`` is therefore stable when ``L`` grows, and it is
reproducible anywhere PCG64 and SeedSequence are available.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .gates import (
    MATRIX_KINDS,
    NAMED_KINDS,
    Gate,
    GateError,
    gate,
    matchgate,
    unitary_gate,
)
from .pauli import MAX_QUBITS

FORMAT_VERSION = 1

FAMILIES = ("clifford", "clifford_t", "matchgate")
_FAMILY_TAG = {"clifford": 1, "clifford_t": 2, "matchgate": 3}


class CircuitFormatError(ValueError):
    """Malformed circuit document or invalid circuit structure."""


@dataclass(frozen=True)
class Layer:
    moments: tuple[tuple[Gate, ...], ...]

    def __post_init__(self):
        moments = tuple(tuple(m) for m in self.moments)
        object.__setattr__(self, "moments", moments)
        for mi, moment in enumerate(moments):
            seen: set[int] = set()
            for g in moment:
                overlap = seen.intersection(g.support)
                if overlap:
                    raise CircuitFormatError(
                        f"moment {mi}: qubit {min(overlap)} used by two gates of one moment"
                    )
                seen.update(g.support)

    @classmethod
    def of(cls, *gates: Gate) -> Layer:
        """Single-moment layer."""
        return cls((tuple(gates),))

    @property
    def gates(self) -> tuple[Gate, ...]:
        """All gates in application (Schrodinger) order."""
        return tuple(g for m in self.moments for g in m)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    layers: tuple[Layer, ...]

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise CircuitFormatError(f"n_qubits must lie in [1, {MAX_QUBITS}]")
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        for li, layer in enumerate(layers):
            for g in layer.gates:
                if max(g.support) > self.n_qubits:
                    raise CircuitFormatError(
                        f"layer {li}: gate {g.kind} support {g.support} outside [1, {self.n_qubits}]"
                    )

    def __len__(self) -> int:
        return len(self.layers)

    def gate_kinds(self) -> set[str]:
        return {g.kind for layer in self.layers for g in layer.gates}

    def truncated(self, n_layers: int) -> Circuit:
        return Circuit(self.n_qubits, self.layers[:n_layers])


def identity_circuit(n: int, L: int) -> Circuit:
    return Circuit(n, tuple(Layer.of(*(gate("I", q) for q in range(1, n + 1))) for _ in range(L)))


# ---------------------------------------------------------------------------
# random families


def slot_rng(seed: int, family: str, layer: int, slot: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(_FAMILY_TAG[family], layer, slot))
    return np.random.Generator(np.random.PCG64(ss))


def haar_unitary(rng: np.random.Generator, d: int = 2) -> np.ndarray:
    """Haar-random ``d x d`` unitary from QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_special_unitary(rng: np.random.Generator, d: int = 2) -> np.ndarray:
    u = haar_unitary(rng, d)
    return u / np.linalg.det(u) ** (1.0 / d)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    theta = rng.uniform(0.0, 2.0 * np.pi)
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _check_size(n: int, L: int) -> None:
    if n < 2:
        raise ValueError(f"random families need n >= 2 qubits, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"n must be <= {MAX_QUBITS}")
    if L < 0:
        raise ValueError("L must be non-negative")


def _clifford_like(n: int, L: int, seed: int, family: str, single: Sequence[str]) -> Circuit:
    _check_size(n, L)
    layers = []
    for l in range(L):
        ones = []
        for q in range(1, n + 1):
            kind = single[int(slot_rng(seed, family, l, q - 1).integers(len(single)))]
            ones.append(gate(kind, q))
        odd, even = [], []
        for i in range(1, n):
            draw = int(slot_rng(seed, family, l, n - 1 + i).integers(2))
            g = gate("CZ", i, i + 1) if draw else gate("I", i, i + 1)
            (odd if i % 2 == 1 else even).append(g)
        moments = [tuple(ones), tuple(odd)]
        if even:
            moments.append(tuple(even))
        layers.append(Layer(tuple(moments)))
    return Circuit(n, tuple(layers))


def random_clifford_t(n: int, L: int, seed: int) -> Circuit:
    """Each qubit draws from {I, H, T}, then each adjacent pair from {I, CZ}."""
    return _clifford_like(n, L, seed, "clifford_t", ("I", "H", "T"))


def random_clifford(n: int, L: int, seed: int) -> Circuit:
    """As :func:`random_clifford_t` with single-qubit draws from {I, H}."""
    return _clifford_like(n, L, seed, "clifford", ("I", "H"))


def random_matchgate_circuit(n: int, L: int, seed: int, ensemble: str = "real") -> Circuit:
    """A random matchgate on (1,2), (2,3), ..., (n-1,n) in sequence, per layer.

    ``ensemble="real"`` draws both blocks as uniform SO(2) rotations.
    ``ensemble="haar"`` draws Haar SU(2) blocks; those generate every
    quadratic Majorana string, so the block containing ``Z_n`` has
    ``n(2n - 1)`` strings rather than ``n^2``.
    """
    _check_size(n, L)
    if ensemble not in ("real", "haar"):
        raise ValueError(f"unknown matchgate ensemble {ensemble!r}")
    layers = []
    for l in range(L):
        moments = []
        for i in range(1, n):
            rng = slot_rng(seed, "matchgate", l, n - 1 + i)
            if ensemble == "real":
                a, b = random_rotation(rng), random_rotation(rng)
            else:
                a, b = haar_special_unitary(rng), haar_special_unitary(rng)
            moments.append((matchgate(a, b, i, i + 1),))
        layers.append(Layer(tuple(moments)))
    return Circuit(n, tuple(layers))


def random_circuit(family: str, n: int, L: int, seed: int) -> Circuit:
    if family == "clifford":
        return random_clifford(n, L, seed)
    if family == "clifford_t":
        return random_clifford_t(n, L, seed)
    if family == "matchgate":
        return random_matchgate_circuit(n, L, seed)
    raise ValueError(f"unknown circuit family {family!r}; expected one of {FAMILIES}")


# ---------------------------------------------------------------------------
# serialization


def _matrix_to_json(m: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(m).ravel()]


def _matrix_from_json(data: Any, dim: int, where: str) -> np.ndarray:
    if not isinstance(data, list) or len(data) != dim * dim:
        raise CircuitFormatError(f"{where}: expected {dim * dim} [re, im] pairs")
    vals = []
    for e in data:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, (int, float)) for v in e)):
            raise CircuitFormatError(f"{where}: matrix entries must be [re, im] number pairs")
        vals.append(complex(e[0], e[1]))
    return np.array(vals, dtype=complex).reshape(dim, dim)


def gate_to_dict(g: Gate) -> dict:
    d: dict[str, Any] = {"kind": g.kind, "support": list(g.support)}
    if g.kind == "matchgate":
        d["a"] = _matrix_to_json(g.a)
        d["b"] = _matrix_to_json(g.b)
    elif g.kind in ("u1", "u2"):
        d["matrix"] = _matrix_to_json(g.matrix)
    return d


def gate_from_dict(d: Any, where: str = "gate") -> Gate:
    if not isinstance(d, dict):
        raise CircuitFormatError(f"{where}: gate must be an object")
    kind = d.get("kind")
    if kind not in NAMED_KINDS and kind not in MATRIX_KINDS:
        raise CircuitFormatError(f"{where}: unknown gate kind {kind!r}")
    support = d.get("support")
    if not (isinstance(support, list) and support and all(isinstance(q, int) for q in support)):
        raise CircuitFormatError(f"{where}: support must be a non-empty list of integers")
    try:
        if kind == "matchgate":
            if len(support) != 2:
                raise CircuitFormatError(f"{where}: matchgate needs two qubits")
            return matchgate(
                _matrix_from_json(d.get("a"), 2, f"{where}.a"),
                _matrix_from_json(d.get("b"), 2, f"{where}.b"),
                *support,
            )
        if kind in ("u1", "u2"):
            dim = 2 if kind == "u1" else 4
            if len(support) != dim // 2:
                raise CircuitFormatError(f"{where}: {kind} needs {dim // 2} qubit(s)")
            return unitary_gate(_matrix_from_json(d.get("matrix"), dim, f"{where}.matrix"), *support)
        return gate(kind, *support)
    except GateError as exc:
        raise CircuitFormatError(f"{where}: {exc}") from exc


def circuit_to_dict(c: Circuit) -> dict:
    layers = []
    for layer in c.layers:
        moments = [[gate_to_dict(g) for g in m] for m in layer.moments]
        layers.append(moments[0] if len(moments) == 1 else moments)
    return {"version": FORMAT_VERSION, "n_qubits": c.n_qubits, "layers": layers}


def serialize(c: Circuit) -> str:
    """JSON text.  Single-moment layers are a flat gate list, others a list of moments."""
    return json.dumps(circuit_to_dict(c), separators=(",", ":"))


def _layer_from_json(entry: Any, li: int) -> Layer:
    where = f"layers[{li}]"
    if not isinstance(entry, list):
        raise CircuitFormatError(f"{where}: layer must be a list")
    if all(isinstance(e, dict) for e in entry):
        moments = [[gate_from_dict(g, f"{where}[{gi}]") for gi, g in enumerate(entry)]]
    elif all(isinstance(e, list) for e in entry):
        moments = [
            [gate_from_dict(g, f"{where}[{mi}][{gi}]") for gi, g in enumerate(m)]
            for mi, m in enumerate(entry)
        ]
    else:
        raise CircuitFormatError(f"{where}: mixes gates and moment lists")
    try:
        return Layer(tuple(tuple(m) for m in moments))
    except CircuitFormatError as exc:
        raise CircuitFormatError(f"{where}: {exc}") from exc


def circuit_from_dict(doc: Any) -> Circuit:
    if not isinstance(doc, dict):
        raise CircuitFormatError("circuit document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise CircuitFormatError(f"unsupported circuit version {doc.get('version')!r}")
    n = doc.get("n_qubits")
    if not isinstance(n, int) or n < 1:
        raise CircuitFormatError("n_qubits must be a positive integer")
    layers = doc.get("layers")
    if not isinstance(layers, list):
        raise CircuitFormatError("layers must be a list")
    return Circuit(n, tuple(_layer_from_json(e, li) for li, e in enumerate(layers)))


def deserialize(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return circuit_from_dict(doc)


def load_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def save_circuit(c: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(c))


def concat(circuits: Iterable[Circuit]) -> Circuit:
    circuits = list(circuits)
    n = circuits[0].n_qubits
    return Circuit(n, tuple(l for c in circuits for l in c.layers))
