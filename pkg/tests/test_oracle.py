import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from conftest import all_labels, dense_circuit_unitary, embed, expand, label_matrix
from pauliprop.circuits import Circuit, Layer, identity_circuit, random_circuit, random_clifford, random_clifford_t
from pauliprop.gates import gate, unitary_gate
from pauliprop.oracle import (
    FullOmega,
    SizeLimitError,
    build_full_omega,
    check_density_matrix,
    check_orthogonality,
    circuit_unitary,
    dephase,
    eigenbasis_analysis,
    eigenbasis_offdiagonal,
    embed_gate,
    evolve_density,
    layered_omega,
    omega_apply,
    operator_matrix,
    pauli_coefficients,
    schrodinger_expectation,
    unitary_omega,
)
from pauliprop.pauli import PauliString, index_encode
from pauliprop.propagation import NoiseModel, OperatorSum, propagate

P = PauliString.from_label


def test_embed_gate_matches_bruteforce():
    rng = np.random.default_rng(0)
    for support in [(1,), (3,), (1, 2), (3, 1), (2, 4)]:
        u = unitary_group.rvs(2 ** len(support), random_state=rng)
        g = unitary_gate(u, *support)
        assert np.allclose(embed_gate(g, 4), embed(u, support, 4))


def test_circuit_unitary_matches_bruteforce():
    c = random_clifford_t(3, 6, 1)
    assert np.allclose(circuit_unitary(c), dense_circuit_unitary(c))


def test_pauli_coefficients_order():
    rng = np.random.default_rng(2)
    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    coeffs = pauli_coefficients(m)
    for lab in all_labels(3):
        ref = np.trace(label_matrix(lab) @ m) / 8
        assert coeffs[index_encode(P(lab))] == pytest.approx(ref)


def test_identity_omega():
    o = build_full_omega(identity_circuit(2, 3))
    assert np.array_equal(o.entries, np.eye(16))


@pytest.mark.parametrize("seed", range(5))
def test_clifford_omega_signed_permutation(seed):
    o = build_full_omega(random_clifford(3, 6, seed)).entries
    nz = np.abs(o) > 1e-9
    assert np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)
    assert np.allclose(np.abs(o[nz]), 1.0)


@pytest.mark.parametrize("family", ["clifford", "clifford_t", "matchgate"])
def test_orthogonality(family):
    for seed in range(5):
        assert check_orthogonality(build_full_omega(random_circuit(family, 3, 10, seed))) <= 1e-9
    assert check_orthogonality(build_full_omega(identity_circuit(3, 1))) == 0.0


def test_noise_breaks_orthogonality_but_stays_real():
    o = build_full_omega(random_clifford_t(2, 4, 0), NoiseModel(0.05))
    assert check_orthogonality(o) > 1e-3
    assert o.entries.dtype == np.float64


def test_layered_product_equals_unitary_path():
    c = random_clifford_t(2, 5, 3)
    assert np.allclose(layered_omega(c), build_full_omega(c).entries, atol=1e-12)


def test_omega_columns_match_expansion():
    c = random_clifford_t(2, 3, 9)
    u = dense_circuit_unitary(c)
    o = build_full_omega(c)
    for lab in all_labels(2):
        ref = expand(u.conj().T @ label_matrix(lab) @ u, 2)
        col = o.column(index_encode(P(lab)))
        for lab2 in all_labels(2):
            assert col[index_encode(P(lab2))] == pytest.approx(ref.get(lab2, 0.0), abs=1e-12)


def test_omega_apply_matches_sparse_engine():
    c = random_clifford_t(3, 8, 4)
    noise = NoiseModel(0.01)
    obs = OperatorSum.from_terms(3, [("IIZ", 0.6), ("XYI", 0.8)])
    dense = omega_apply(build_full_omega(c, noise), obs)
    out, _ = propagate(c, obs, noise=noise)
    sparse = np.zeros(64)
    for p, v in out.items():
        sparse[index_encode(p)] = v
    assert np.allclose(dense, sparse, atol=1e-12)


def test_full_omega_bytes_roundtrip():
    o = build_full_omega(random_clifford_t(2, 3, 0))
    data = o.to_bytes()
    assert data[:4] == b"OMG1" and len(data) == 8 + 8 * 256
    back = FullOmega.from_bytes(data)
    assert np.array_equal(back.entries, o.entries)
    with pytest.raises(ValueError):
        FullOmega.from_bytes(b"XXXX" + data[4:])
    assert o.edges_csv().splitlines()[0] == "j,k,omega"


def test_size_limits():
    with pytest.raises(SizeLimitError):
        build_full_omega(identity_circuit(7, 1))
    with pytest.raises(SizeLimitError):
        evolve_density(identity_circuit(11, 1))
    with pytest.raises(SizeLimitError):
        eigenbasis_analysis(identity_circuit(5, 1))


def test_expectation_examples():
    assert schrodinger_expectation(identity_circuit(4, 2), OperatorSum.from_label("IIIZ")) == 1.0
    c = Circuit(1, (Layer.of(gate("H", 1)),))
    assert schrodinger_expectation(c, OperatorSum.from_label("Z")) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("gamma", [0.0, 0.005, 0.02])
def test_heisenberg_schrodinger_duality(gamma):
    noise = NoiseModel(gamma)
    worst = 0.0
    for seed in range(50):
        family = ("clifford", "clifford_t", "matchgate")[seed % 3]
        c = random_circuit(family, 3, 12, seed)
        h = propagate(c, "IIZ", noise=noise)[1].expectation
        s = schrodinger_expectation(c, OperatorSum.from_label("IIZ"), noise)
        worst = max(worst, abs(h - s))
    assert worst <= 1e-9


def test_dephase_matches_lindblad_limit():
    # the channel keeps Z-diagonal parts and kills coherences
    rng = np.random.default_rng(5)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    rho = np.outer(v, v.conj()) / (v.conj() @ v)
    out = dephase(rho, 2, NoiseModel(20.0, 1.0))  # 2 gamma t = 40
    coeffs = expand(out, 2)
    for lab, c in coeffs.items():
        if any(ch in "XY" for ch in lab):
            assert abs(c) < 1e-17
    assert np.allclose(np.diag(out), np.diag(rho))


def test_dephase_single_coherence_factor():
    rho = np.full((2, 2), 0.5, dtype=complex)
    out = dephase(rho, 1, NoiseModel(0.1, 1.0))
    assert out[0, 1] == pytest.approx(0.5 * math.exp(-0.2))


def test_evolve_density_is_valid_state():
    rho = evolve_density(random_clifford_t(3, 15, 2), NoiseModel(0.02))
    herm, tr, lo = check_density_matrix(rho)
    assert herm < 1e-12 and tr < 1e-12 and lo > -1e-12


def test_operator_matrix():
    s = OperatorSum.from_terms(2, [("XZ", 0.5), ("YY", -1.0)])
    assert np.allclose(operator_matrix(s), 0.5 * label_matrix("XZ") - label_matrix("YY"))


def test_eigenbasis_identity():
    with pytest.warns(RuntimeWarning, match="degenerate"):
        r = eigenbasis_analysis(identity_circuit(2, 1))
    assert r.degenerate and r.offdiag_max < 1e-15
    assert np.allclose(np.diag(r.omega), 1.0)


def test_eigenbasis_single_t():
    c = Circuit(1, (Layer.of(gate("T", 1)),))
    r = eigenbasis_analysis(c)
    assert r.offdiag_max < 1e-12 and r.diag_error < 1e-12
    phases = sorted(np.round(np.angle(np.diag(r.omega)), 12).tolist())
    assert phases == pytest.approx(sorted([0.0, 0.0, math.pi / 4, -math.pi / 4]), abs=1e-12)
    assert sorted(r.energies.tolist()) == pytest.approx([-math.pi / 8, math.pi / 8])


@pytest.mark.parametrize("seed", range(5))
def test_eigenbasis_random(seed):
    assert eigenbasis_offdiagonal(random_clifford_t(2, 5, seed)) <= 1e-8


def test_eigenbasis_time_scaling():
    c = random_clifford_t(2, 5, 1)
    r1, r2 = eigenbasis_analysis(c, 1.0), eigenbasis_analysis(c, 2.0)
    assert np.allclose(r1.energies, 2.0 * r2.energies)
    assert r2.diag_error < 1e-8


def test_unitary_omega_random_orthogonal():
    u = unitary_group.rvs(8, random_state=4)
    o = unitary_omega(u)
    assert np.abs(o.T @ o - np.eye(64)).max() < 1e-10
