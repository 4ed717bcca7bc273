"""Command-line front end: ``pauliprop {simulate,scan,graph,dist,check}``.

Every command writes into ``--out`` (default ``.``) using fixed file
names, so identical arguments give byte-identical files.

Exit codes: 0 success, 1 usage or configuration error, 2 a check failed,
3 a size limit was hit.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import network, statistics
from .circuits import FAMILIES, Circuit, CircuitFormatError, load_circuit, random_circuit
from .oracle import (
    MAX_OMEGA_QUBITS,
    SizeLimitError,
    build_full_omega,
    check_orthogonality,
    schrodinger_expectation,
)
from .pauli import MAX_QUBITS, PauliString
from .propagation import (
    NoiseModel,
    OperatorSum,
    PropagationTrace,
    expectation_zero_state,
    global_truncate,
    propagate,
)

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_LIMIT = 0, 1, 2, 3
MODES = ("pruned", "global", "exact")
CHECK_TOL = 1e-8
ORTHO_TOL = 1e-9


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str
    n_qubits: int
    layers: int
    seed: int
    eps: float
    gamma: float
    t: float
    observable: str
    mode: str
    out: Path
    circuit_path: Path | None = None
    with_error: bool = False
    grid_gamma: tuple[float, ...] = ()
    grid_eps: tuple[float, ...] = ()
    count: int = 20

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.gamma, self.t)


# ---------------------------------------------------------------------------
# argument handling


def _grid(text: str | None, flag: str) -> tuple[float, ...] | None:
    if text is None:
        return None
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError(f"{flag} is empty; give a comma-separated list such as 0,0.005,0.02")
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None
    uniq = list(dict.fromkeys(vals))
    if len(uniq) < len(vals):
        warnings.warn(f"{flag}: duplicate values removed", stacklevel=2)
    return tuple(uniq)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="clifford_t", choices=(*FAMILIES, "file"))
    common.add_argument("--qubits", type=int, default=4, help="N (ignored for --family file)")
    common.add_argument("--layers", type=int, default=20, help="L")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--eps", type=float, default=0.0, help="pruning threshold")
    common.add_argument("--gamma", type=float, default=0.0, help="dephasing rate")
    common.add_argument("--time", type=float, default=1.0, help="time per layer")
    common.add_argument("--observable", default=None, help="Pauli label, default Z on the last qubit")
    common.add_argument("--mode", default="pruned", choices=MODES)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--circuit", default=None, help="circuit JSON for --family file")

    p = argparse.ArgumentParser(prog="pauliprop", description="Pauli-string propagation experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", parents=[common], help="propagate one circuit and write trace.csv")
    sim.add_argument("--with-error", action="store_true", help="also run eps=0 and write error.csv")
    scan = sub.add_parser("scan", parents=[common], help="sweep gamma and eps")
    scan.add_argument("--grid-gamma", default=None)
    scan.add_argument("--grid-eps", default=None)
    sub.add_parser("graph", parents=[common], help="operator graph of the full transfer matrix")
    sub.add_parser("dist", parents=[common], help="coefficient distribution and N_eps fit")
    chk = sub.add_parser("check", parents=[common], help="oracle cross-checks, exit 2 on failure")
    chk.add_argument("--count", type=int, default=20, help="seeds per family")
    return p


def parse_config(argv: list[str] | None = None) -> RunConfig:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            raise UsageError("invalid command line") from None
        raise
    if ns.eps < 0:
        raise UsageError("--eps must be >= 0")
    if ns.gamma < 0:
        raise UsageError("--gamma must be >= 0")
    if not ns.time > 0:
        raise UsageError("--time must be > 0")
    if ns.layers < 0:
        raise UsageError("--layers must be >= 0")
    if ns.family == "file" and not ns.circuit:
        raise UsageError("--family file requires --circuit FILE")
    grid_gamma = grid_eps = ()
    if ns.command == "scan":
        grid_gamma = _grid(ns.grid_gamma, "--grid-gamma") or (ns.gamma,)
        grid_eps = _grid(ns.grid_eps, "--grid-eps") or (ns.eps,)
        if any(g < 0 for g in grid_gamma) or any(e < 0 for e in grid_eps):
            raise UsageError("grid values must be >= 0")
    count = getattr(ns, "count", 20)
    if count < 1:
        raise UsageError("--count must be >= 1")
    return RunConfig(
        command=ns.command,
        family=ns.family,
        n_qubits=ns.qubits,
        layers=ns.layers,
        seed=ns.seed,
        eps=ns.eps,
        gamma=ns.gamma,
        t=ns.time,
        observable=ns.observable or "",
        mode=ns.mode,
        out=Path(ns.out),
        circuit_path=Path(ns.circuit) if ns.circuit else None,
        with_error=getattr(ns, "with_error", False),
        grid_gamma=grid_gamma,
        grid_eps=grid_eps,
        count=count,
    )


def make_circuit(cfg: RunConfig) -> Circuit:
    if cfg.family == "file":
        try:
            return load_circuit(cfg.circuit_path)
        except FileNotFoundError:
            raise UsageError(f"circuit file not found: {cfg.circuit_path}") from None
        except CircuitFormatError as exc:
            raise UsageError(f"{cfg.circuit_path}: {exc}") from None
    if cfg.n_qubits > MAX_QUBITS:
        raise SizeLimitError(f"at most {MAX_QUBITS} qubits are supported, got {cfg.n_qubits}")
    try:
        return random_circuit(cfg.family, cfg.n_qubits, cfg.layers, cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def make_observable(cfg: RunConfig, n: int) -> OperatorSum:
    label = cfg.observable or "I" * (n - 1) + "Z"
    try:
        p = PauliString.from_label(label)
    except ValueError as exc:
        raise UsageError(f"--observable: {exc}") from None
    if p.n_qubits != n:
        raise UsageError(f"--observable has {p.n_qubits} letters but the circuit has {n} qubits")
    return OperatorSum.from_terms(n, [(p, 1.0)])


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json(obj) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, list):
            return [clean(x) for x in v]
        return v

    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# commands


def run_mode(c: Circuit, obs: OperatorSum, eps: float, noise: NoiseModel, mode: str) -> tuple[PropagationTrace, float]:
    """Trace plus final expectation for one mode."""
    if mode == "pruned":
        _, tr = propagate(c, obs, eps, noise, workers=None)
        return tr, tr.expectation
    final, tr = propagate(c, obs, 0.0, noise, count_eps=eps, workers=None)
    if mode == "global":
        return tr, expectation_zero_state(global_truncate(final, eps))
    return tr, schrodinger_expectation(c, obs, noise)


def cmd_simulate(cfg: RunConfig) -> int:
    c = make_circuit(cfg)
    obs = make_observable(cfg, c.n_qubits)
    tr, value = run_mode(c, obs, cfg.eps, cfg.noise, cfg.mode)
    text = tr.to_csv()
    if cfg.mode != "pruned":
        text = text.rsplit("expectation,", 1)[0] + f"expectation,{fmt(value)}\n"
    _write(cfg.out / "trace.csv", text)
    print(f"expectation {fmt(value)}")
    if cfg.with_error:
        _, ref = propagate(c, obs, 0.0, cfg.noise, workers=None)
        approx = tr.expectations if cfg.mode == "pruned" else tr.column("expectation_significant")
        rows = ["depth,expectation,reference,error"]
        for rec, a, b in zip(tr.records, approx, ref.expectations):
            rows.append(f"{rec.depth},{fmt(a)},{fmt(b)},{fmt(a - b)}")
        _write(cfg.out / "error.csv", "\n".join(rows) + "\n")
        print(f"error {fmt(value - ref.expectation)}")
    return EXIT_OK


def scan_filename(gamma: float, eps: float) -> str:
    return f"trace_gamma{gamma!r}_eps{eps!r}.csv"


def cmd_scan(cfg: RunConfig) -> int:
    c = make_circuit(cfg)
    obs = make_observable(cfg, c.n_qubits)
    summary = ["gamma,eps,layer,n_eps"]
    for g in cfg.grid_gamma:
        for e in cfg.grid_eps:
            tr, value = run_mode(c, obs, e, NoiseModel(g, cfg.t), cfg.mode)
            _write(cfg.out / scan_filename(g, e), tr.to_csv())
            summary += [f"{g!r},{e!r},{r.layer},{r.n_eps}" for r in tr.records]
            print(f"gamma={g!r} eps={e!r} expectation {fmt(value)}")
    _write(cfg.out / "summary.csv", "\n".join(summary) + "\n")
    return EXIT_OK


def cmd_graph(cfg: RunConfig) -> int:
    c = make_circuit(cfg)
    g = network.circuit_graph(c, cfg.noise)
    _write(cfg.out / "graph.dot", network.export_dot(g))
    _write(cfg.out / "edges.csv", network.export_edges_csv(g))
    info = network.summary(g)
    _write(cfg.out / "graph.json", _json(info))
    print(f"d_mean {fmt(info['d_mean'])} d_max {info['d_max']} components {len(info['components'])}")
    return EXIT_OK


def cmd_dist(cfg: RunConfig) -> int:
    c = make_circuit(cfg)
    obs = make_observable(cfg, c.n_qubits)
    count_eps = cfg.eps if cfg.eps > 0 else 0.01
    final, tr = propagate(c, obs, cfg.eps, cfg.noise, count_eps=count_eps, workers=None)
    D = 4**c.n_qubits
    spectrum = statistics.ordered_spectrum(final, D=D)
    n = np.arange(D)
    pt1 = statistics.pt1_curve(n, D, spectrum.Lambda)
    pt2 = statistics.pt2_curve(n, D, spectrum.Lambda)
    rows = ["n,lambda_sq,pt1,pt2"]
    rows += [f"{i},{fmt(v)},{fmt(a)},{fmt(b)}" for i, v, a, b in zip(n.tolist(), spectrum.values.tolist(), pt1.tolist(), pt2.tolist())]
    _write(cfg.out / "distribution.csv", "\n".join(rows) + "\n")

    report = {
        "residual_pt1": statistics.rms_residual(spectrum, "pt1"),
        "residual_pt2": statistics.rms_residual(spectrum, "pt2"),
        "negative_fraction": statistics.negative_fraction(final),
        "Lambda": spectrum.Lambda,
        "count_eps": count_eps,
    }
    try:
        report.update(statistics.fit_neps(tr, D).as_dict())
    except statistics.FitError as exc:
        print(f"warning: N_eps fit skipped: {exc}", file=sys.stderr)
        report.update(dict.fromkeys(("d_bar", "tau", "decay", "a", "scale", "residual")))
    _write(cfg.out / "fit.json", _json(report))
    print(f"residual_pt1 {fmt(report['residual_pt1'])} residual_pt2 {fmt(report['residual_pt2'])}")
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    if cfg.family == "file":
        circuits = [("file", make_circuit(cfg))]
    else:
        if cfg.n_qubits > MAX_OMEGA_QUBITS:
            raise SizeLimitError(f"check is limited to N <= {MAX_OMEGA_QUBITS}, got N = {cfg.n_qubits}")
        circuits = [
            (f"{fam}/seed{s}", random_circuit(fam, cfg.n_qubits, cfg.layers, cfg.seed + s))
            for fam in FAMILIES
            for s in range(cfg.count)
        ]
    worst_eq = worst_ortho = 0.0
    for name, c in circuits:
        obs = make_observable(cfg, c.n_qubits)
        _, tr = propagate(c, obs, 0.0, cfg.noise, workers=None)
        err = abs(tr.expectation - schrodinger_expectation(c, obs, cfg.noise))
        ortho = check_orthogonality(build_full_omega(c))
        worst_eq, worst_ortho = max(worst_eq, err), max(worst_ortho, ortho)
        if err > CHECK_TOL or ortho > ORTHO_TOL:
            print(f"FAIL {name}: oracle {fmt(err)} orthogonality {fmt(ortho)}")
    ok_eq, ok_ortho = worst_eq <= CHECK_TOL, worst_ortho <= ORTHO_TOL
    print(f"{'PASS' if ok_eq else 'FAIL'} oracle equivalence over {len(circuits)} circuits: max {fmt(worst_eq)} (tol {CHECK_TOL:g})")
    print(f"{'PASS' if ok_ortho else 'FAIL'} orthogonality over {len(circuits)} circuits: max {fmt(worst_ortho)} (tol {ORTHO_TOL:g})")
    return EXIT_OK if ok_eq and ok_ortho else EXIT_CHECK


COMMANDS = {
    "simulate": cmd_simulate,
    "scan": cmd_scan,
    "graph": cmd_graph,
    "dist": cmd_dist,
    "check": cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"pauliprop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if "PAULIPROP_THREADS" in os.environ:
        try:
            int(os.environ["PAULIPROP_THREADS"])
        except ValueError:
            print("pauliprop: error: PAULIPROP_THREADS must be an integer", file=sys.stderr)
            return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"pauliprop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeLimitError as exc:
        print(f"pauliprop: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ValueError, OSError) as exc:
        print(f"pauliprop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
