"""Heisenberg-picture Pauli-string propagation for noisy random circuits.

The sparse engine lives in :mod:`pauliprop.propagation`; dense reference
implementations for small systems are in :mod:`pauliprop.oracle`.
"""

from .circuits import (
    FAMILIES,
    Circuit,
    CircuitFormatError,
    Layer,
    deserialize,
    load_circuit,
    random_circuit,
    random_clifford,
    random_clifford_t,
    random_matchgate_circuit,
    save_circuit,
    serialize,
)
from .gates import Gate, GateError, gate, matchgate, unitary_gate
from .network import OperatorGraph, circuit_graph, omega_graph, weak_components
from .oracle import (
    FullOmega,
    SizeLimitError,
    build_full_omega,
    check_orthogonality,
    eigenbasis_analysis,
    eigenbasis_offdiagonal,
    schrodinger_expectation,
)
from .pauli import PauliString, commutes, index_decode, index_encode, multiply, weight
from .propagation import (
    NoiseModel,
    OperatorSum,
    PropagationTrace,
    count_significant,
    default_observable,
    global_truncate,
    norm,
    propagate,
)
from .statistics import fit_neps, ordered_spectrum, pt1_curve, pt2_curve, rms_residual

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "Circuit",
    "CircuitFormatError",
    "FullOmega",
    "Gate",
    "GateError",
    "Layer",
    "NoiseModel",
    "OperatorGraph",
    "OperatorSum",
    "PauliString",
    "PropagationTrace",
    "SizeLimitError",
    "build_full_omega",
    "check_orthogonality",
    "circuit_graph",
    "commutes",
    "count_significant",
    "default_observable",
    "deserialize",
    "eigenbasis_analysis",
    "eigenbasis_offdiagonal",
    "fit_neps",
    "gate",
    "global_truncate",
    "index_decode",
    "index_encode",
    "load_circuit",
    "matchgate",
    "multiply",
    "norm",
    "omega_graph",
    "ordered_spectrum",
    "propagate",
    "pt1_curve",
    "pt2_curve",
    "random_circuit",
    "random_clifford",
    "random_clifford_t",
    "random_matchgate_circuit",
    "rms_residual",
    "save_circuit",
    "schrodinger_expectation",
    "serialize",
    "unitary_gate",
    "weak_components",
    "weight",
]
