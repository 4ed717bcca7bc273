"""Heisenberg-picture propagation of sparse Pauli sums.

The observable is walked through the circuit from the last layer to the
first.  For each layer the engine does the following:

1. Damp every retained coefficient by ``exp(-2 gamma q t)``, where ``q``
   is its X/Y count.
2. Expand each retained string ``k`` into its full layer column
   ``Omega_jk``.  The column is built by conjugating with the layer's gates
   in reverse order and merging paths that meet on the same string.
   Column entries with ``|Omega_jk| <= 1e-12`` count as exact zeros.
3. Keep a spawned contribution only when ``|lambda_k Omega_jk| > eps``.
4. Sum the surviving contributions that land on the same string.

With ``eps = 0`` and ``gamma = 0`` this is exact Heisenberg evolution.
After step 4, a merged coefficient is kept whatever its size, unless it
is exactly zero.  Strings are handled as integer keys
``x_mask | z_mask << N``, the same encoding as :func:`pauli.index_encode`.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np

from .circuits import Circuit, Layer
from .gates import ZERO_TOL, Gate
from .pauli import PauliString, index_decode, index_encode

_CHUNK_MIN = 4096


@dataclass(frozen=True)
class NoiseModel:
    """Lindblad-Z dephasing on every qubit, applied once per layer."""

    gamma: float = 0.0
    t: float = 1.0

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be a finite value >= 0, got {self.gamma}")
        if not (self.t > 0 and math.isfinite(self.t)):
            raise ValueError(f"t must be a finite value > 0, got {self.t}")

    def damping(self, q):
        """Factor ``exp(-2 gamma q t)`` for X/Y count ``q``."""
        return np.exp(-2.0 * self.gamma * self.t * np.asarray(q, dtype=float))


NOISELESS = NoiseModel()


class OperatorSum:
    """Sparse real combination of Pauli strings on ``n_qubits`` qubits."""

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping[PauliString, float] | None = None):
        self.n_qubits = int(n_qubits)
        clean: dict[PauliString, float] = {}
        for p, c in (terms or {}).items():
            if p.n_qubits != self.n_qubits:
                raise ValueError(f"term {p} has {p.n_qubits} qubits, expected {self.n_qubits}")
            c = float(c)
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient for {p}")
            if c != 0.0:
                clean[p] = c
        self._terms = clean

    @classmethod
    def from_label(cls, label: str, coeff: float = 1.0) -> OperatorSum:
        p = PauliString.from_label(label)
        return cls(p.n_qubits, {p: coeff})

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[PauliString | str, float]]) -> OperatorSum:
        acc: dict[PauliString, float] = {}
        for p, c in terms:
            if isinstance(p, str):
                p = PauliString.from_label(p)
            acc[p] = acc.get(p, 0.0) + c
        return cls(n_qubits, acc)

    @classmethod
    def from_arrays(cls, n_qubits: int, keys: np.ndarray, values: np.ndarray) -> OperatorSum:
        out = cls(n_qubits)
        out._terms = {
            index_decode(int(k), n_qubits): float(v) for k, v in zip(keys.tolist(), values.tolist()) if v != 0.0
        }
        return out

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(keys, values)`` sorted by key."""
        keys = np.array([index_encode(p) for p in self._terms], dtype=np.uint64)
        vals = np.array(list(self._terms.values()), dtype=float)
        order = np.argsort(keys, kind="stable")
        return keys[order], vals[order]

    @property
    def terms(self) -> Mapping[PauliString, float]:
        return MappingProxyType(self._terms)

    def coefficient(self, p: PauliString | str) -> float:
        if isinstance(p, str):
            p = PauliString.from_label(p)
        return self._terms.get(p, 0.0)

    def items(self):
        return self._terms.items()

    def values(self) -> np.ndarray:
        return np.fromiter(self._terms.values(), dtype=float, count=len(self._terms))

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self._terms)

    def __eq__(self, other):
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def __repr__(self) -> str:
        body = ", ".join(f"{p.label}: {c:.6g}" for p, c in list(self._terms.items())[:8])
        more = ", ..." if len(self._terms) > 8 else ""
        return f"OperatorSum({self.n_qubits}, {{{body}{more}}})"


def as_operator_sum(observable, n_qubits: int | None = None) -> OperatorSum:
    if isinstance(observable, OperatorSum):
        return observable
    if isinstance(observable, PauliString):
        return OperatorSum(observable.n_qubits, {observable: 1.0})
    if isinstance(observable, str):
        return OperatorSum.from_label(observable)
    raise TypeError(f"cannot use {type(observable).__name__} as an observable")


def default_observable(n_qubits: int) -> OperatorSum:
    """``Z`` on the last qubit."""
    return OperatorSum.from_label("I" * (n_qubits - 1) + "Z")


# ---------------------------------------------------------------------------
# scalar functionals


def norm(s: OperatorSum) -> float:
    """``sum lambda^2``."""
    v = s.values()
    return float(v @ v)


def count_significant(s: OperatorSum, eps: float) -> int:
    """Number of coefficients with ``|lambda| >= eps``."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return int(np.count_nonzero(np.abs(s.values()) >= eps))


def global_truncate(s: OperatorSum, eps: float) -> OperatorSum:
    """Drop every coefficient with ``|lambda| < eps``."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return OperatorSum(s.n_qubits, {p: c for p, c in s.items() if abs(c) >= eps})


def expectation_zero_state(s: OperatorSum) -> float:
    """``<0...0| A |0...0>``: the sum of coefficients on I/Z-only strings."""
    return float(math.fsum(c for p, c in s.items() if p.x_mask == 0))


def apply_dephasing(s: OperatorSum, noise: NoiseModel) -> OperatorSum:
    if noise.gamma == 0:
        return s
    return OperatorSum(
        s.n_qubits, {p: c * float(noise.damping(p.x_mask.bit_count())) for p, c in s.items()}
    )


# ---------------------------------------------------------------------------
# trace


@dataclass(frozen=True)
class LayerRecord:
    layer: int  # 1-based layer just applied; runs L, L-1, ..., 1
    depth: int  # layers applied so far
    retained: int
    n_eps: int
    norm: float
    expectation: float
    expectation_significant: float


@dataclass
class PropagationTrace:
    """Per-layer statistics in application order.

    ``retained`` is the size of the merged term map.  ``n_eps`` counts
    coefficients with ``|lambda| >= count_eps``.  ``expectation_significant``
    is the zero-state expectation of those coefficients only, i.e. of the
    globally truncated operator.  After ``depth`` layers the retained
    operator equals the observable propagated through the last ``depth``
    layers, so the records describe the nested circuits made of layers
    ``l..L``.
    """

    eps: float
    count_eps: float
    noise: NoiseModel
    records: list[LayerRecord] = field(default_factory=list)
    expectation: float = 0.0

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def retained(self) -> np.ndarray:
        return self.column("retained")

    @property
    def n_eps(self) -> np.ndarray:
        return self.column("n_eps")

    @property
    def norms(self) -> np.ndarray:
        return self.column("norm")

    @property
    def expectations(self) -> np.ndarray:
        return self.column("expectation")

    def to_csv(self) -> str:
        lines = ["layer,retained,n_eps,lambda_norm"]
        lines += [f"{r.layer},{r.retained},{r.n_eps},{r.norm:.17g}" for r in self.records]
        lines.append(f"expectation,{self.expectation:.17g}")
        return "\n".join(lines) + "\n"


def read_trace_csv(text: str) -> tuple[list[tuple[int, int, int, float]], float]:
    rows, expectation = [], math.nan
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != "layer,retained,n_eps,lambda_norm":
        raise ValueError("not a trace CSV")
    for ln in lines[1:]:
        parts = ln.split(",")
        if parts[0] == "expectation":
            expectation = float(parts[1])
        else:
            rows.append((int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])))
    return rows, expectation


# ---------------------------------------------------------------------------
# engine


def _local_codes(g: Gate, n: int, keys: np.ndarray) -> np.ndarray:
    r = g.arity
    loc = np.zeros(keys.shape, dtype=np.uint64)
    for i, q in enumerate(g.support):
        loc |= ((keys >> (q - 1)) & 1) << i
        loc |= ((keys >> (n + q - 1)) & 1) << (r + i)
    return loc.astype(np.intp)


def _scatter_codes(g: Gate, n: int, codes: np.ndarray) -> tuple[np.ndarray, np.uint64]:
    r = g.arity
    codes = codes.astype(np.uint64)
    out = np.zeros(codes.shape, dtype=np.uint64)
    clear = 0
    for i, q in enumerate(g.support):
        out |= ((codes >> i) & 1) << (q - 1)
        out |= ((codes >> (r + i)) & 1) << (n + q - 1)
        clear |= (1 << (q - 1)) | (1 << (n + q - 1))
    return out, np.uint64(((1 << (2 * n)) - 1) ^ clear)


def _apply_gate(g: Gate, n: int, keys, amps, src):
    counts, rows, vals = g.table
    loc = _local_codes(g, n, keys)
    if rows.shape[1] == 1:
        new_loc = rows[loc, 0]
        w = vals[loc, 0]
        bits, keep = _scatter_codes(g, n, new_loc)
        return (keys & keep) | bits, amps * w, src
    cnt = counts[loc]
    rep = np.repeat(np.arange(keys.size), cnt)
    starts = np.cumsum(cnt) - cnt
    pos = np.arange(rep.size) - np.repeat(starts, cnt)
    lk = loc[rep]
    bits, keep = _scatter_codes(g, n, rows[lk, pos])
    return (keys[rep] & keep) | bits, amps[rep] * vals[lk, pos], src[rep]


def _group_sum(order: np.ndarray, new_group: np.ndarray, values: np.ndarray):
    starts = np.concatenate(([0], np.flatnonzero(new_group) + 1))
    return starts, np.add.reduceat(values[order], starts) if order.size else values[:0]


def merge_keys(keys: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sum ``values`` over equal ``keys``; output sorted by key."""
    if keys.size == 0:
        return keys, values
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    starts, sums = _group_sum(order, sk[1:] != sk[:-1], values)
    return sk[starts], sums


def _merge_by_source(src, keys, amps):
    if keys.size == 0:
        return src, keys, amps
    order = np.lexsort((keys, src))
    ss, sk = src[order], keys[order]
    new = (ss[1:] != ss[:-1]) | (sk[1:] != sk[:-1])
    starts, sums = _group_sum(order, new, amps)
    keep = np.abs(sums) > ZERO_TOL
    return ss[starts][keep], sk[starts][keep], sums[keep]


def _moment_is_permutation(moment) -> bool:
    return all(g.is_identity or g.table[1].shape[1] == 1 for g in moment)


def _expand_columns(layer: Layer, n: int, keys: np.ndarray, offset: int):
    """Layer columns for ``keys``: (source index, target key, Omega_jk)."""
    src = np.arange(offset, offset + keys.size)
    amps = np.ones(keys.size)
    cur = keys.copy()
    for moment in reversed(layer.moments):
        for g in reversed(moment):
            if not g.is_identity:
                cur, amps, src = _apply_gate(g, n, cur, amps, src)
        if not _moment_is_permutation(moment):
            src, cur, amps = _merge_by_source(src, cur, amps)
    return src, cur, amps


def _layer_columns(layer: Layer, n: int, keys: np.ndarray, workers: int):
    if workers <= 1 or keys.size < _CHUNK_MIN:
        return _expand_columns(layer, n, keys, 0)
    bounds = np.linspace(0, keys.size, workers + 1).astype(int)
    jobs = [(keys[a:b], a) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda job: _expand_columns(layer, n, *job), jobs))
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


def propagate_layer(layer: Layer, n: int, keys, lam, eps: float, noise: NoiseModel, workers: int = 1):
    """One reverse step on array form: damping, expansion, pruning, merge."""
    if noise.gamma > 0:
        xmask = np.uint64((1 << n) - 1)
        lam = lam * noise.damping(np.bitwise_count(keys & xmask))
    src, tgt, amps = _layer_columns(layer, n, keys, workers)
    contrib = lam[src] * amps
    keep = np.abs(contrib) > eps
    new_keys, new_lam = merge_keys(tgt[keep], contrib[keep])
    nz = new_lam != 0.0
    return new_keys[nz], new_lam[nz]


def resolve_workers(workers: int | None) -> int:
    """``None`` reads ``PAULIPROP_THREADS`` (0 or unset means one per CPU)."""
    if workers is None:
        raw = os.environ.get("PAULIPROP_THREADS", "0").strip() or "0"
        workers = int(raw)
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def propagate(
    circuit: Circuit,
    observable,
    eps: float = 0.0,
    noise: NoiseModel | None = None,
    *,
    count_eps: float | None = None,
    workers: int | None = 1,
) -> tuple[OperatorSum, PropagationTrace]:
    """Propagate ``observable`` through ``circuit`` in reverse layer order.

    Parameters
    ----------
    eps
        Pruning threshold: a spawned contribution survives only when
        ``|lambda_k Omega_jk| > eps``.
    noise
        Dephasing applied to the retained terms before each layer's
        conjugation.  Zero layers means zero damping.
    count_eps
        Threshold for the ``n_eps`` column of the trace (``>=`` test).
        Defaults to ``eps``.  Running with ``eps=0`` and a positive
        ``count_eps`` gives the globally truncated statistics.
    workers
        Threads for the column expansion.  The result is bit-identical
        for any worker count.

    Returns
    -------
    (OperatorSum, PropagationTrace)
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    obs = as_operator_sum(observable)
    if obs.n_qubits != circuit.n_qubits:
        raise ValueError(f"observable has {obs.n_qubits} qubits, circuit has {circuit.n_qubits}")
    noise = noise or NOISELESS
    count_eps = eps if count_eps is None else count_eps
    workers = resolve_workers(workers)
    n = circuit.n_qubits
    xmask = np.uint64((1 << n) - 1)
    keys, lam = obs.to_arrays()
    trace = PropagationTrace(eps=eps, count_eps=count_eps, noise=noise)
    L = len(circuit.layers)
    for depth, li in enumerate(range(L - 1, -1, -1), start=1):
        keys, lam = propagate_layer(circuit.layers[li], n, keys, lam, eps, noise, workers)
        diag = (keys & xmask) == 0
        sig = np.abs(lam) >= count_eps
        trace.records.append(
            LayerRecord(
                layer=li + 1,
                depth=depth,
                retained=int(keys.size),
                n_eps=int(np.count_nonzero(sig)),
                norm=float(lam @ lam),
                expectation=float(math.fsum(lam[diag].tolist())),
                expectation_significant=float(math.fsum(lam[diag & sig].tolist())),
            )
        )
    out = OperatorSum.from_arrays(n, keys, lam)
    trace.expectation = expectation_zero_state(out)
    return out, trace


def heisenberg_expectation(circuit: Circuit, observable, eps: float = 0.0, noise: NoiseModel | None = None) -> float:
    return propagate(circuit, observable, eps, noise)[1].expectation
