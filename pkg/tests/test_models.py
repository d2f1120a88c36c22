import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import S0, S1, S2, S3, taylor_expm
from pseudotopo.errors import AxisNotUnit, DimensionMismatch, IndexOutOfRange, ModelError, WrongModel
from pseudotopo.models import (
    ModelId,
    ModelSpec,
    band_symmetry,
    build_H,
    build_h,
    build_metric,
    chiral_operators,
    clifford_rep,
    dirac_matrices,
    find_chiral_operator,
    metric_spectrum,
    o3_generators,
    pauli,
    rotation_matrix,
    symmetry_generators_3d,
    symmetry_residuals_3d,
)

D1, D2, D3 = ModelId.DIRAC_1D, ModelId.DIRAC_2D, ModelId.DIRAC_3D
ALL = (D1, D2, D3)


def anti(a, b):
    return a @ b + b @ a


def test_pauli_matrices_and_index_guard():
    assert np.array_equal(pauli(2), S2)
    assert np.allclose(pauli(1) @ pauli(2), 1j * pauli(3))
    with pytest.raises(IndexOutOfRange):
        pauli(4)


def test_clifford_algebra():
    xi = clifford_rep()
    for a in range(5):
        for b in range(5):
            assert np.allclose(anti(xi[a], xi[b]), 2 * (a == b) * np.eye(4))


def test_o3_generators_closed_form_and_algebra():
    J = o3_generators()
    # direct products of the fixed representation
    assert np.allclose(J[0], -np.kron(S2, S3) / 2)
    assert np.allclose(J[1], -np.kron(S3, S3) / 2)
    assert np.allclose(J[2], -np.kron(S1, S0) / 2)
    eps = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}
    for (a, b, c), s in eps.items():
        assert np.allclose(J[a] @ J[b] - J[b] @ J[a], -1j * s * J[c])
    for a in range(3):
        assert np.allclose(np.sort(np.linalg.eigvalsh(J[a])), [-0.5, -0.5, 0.5, 0.5])


def test_dirac_matrices():
    a1, a2, a3, beta, g5 = dirac_matrices()
    for a in (a1, a2, a3):
        assert np.allclose(anti(a, beta), 0)
        assert np.allclose(a @ g5, g5 @ a)
    assert np.allclose(anti(beta, g5), 0)


def test_rotation_matrix_is_complex_orthogonal():
    n = np.array([0.6, 0.0, 0.8])
    R = rotation_matrix(n, 0.9)
    assert np.allclose(R @ R.T, np.eye(3))
    assert np.allclose(R @ n, n)


def test_h_examples():
    assert np.allclose(build_h(ModelSpec(D1, 1.0), [0.0]), S3)
    assert np.allclose(build_h(ModelSpec(D1, 2.0), [1.5]), 1.5 * S2 + 2 * S3)


def test_H_1d_closed_form():
    # deformation consistent with eta = exp(-phi sigma2)
    H = build_H(ModelSpec(D1, 1.0, 1.0), [0.0])
    expected = np.array([[np.cosh(1), 1j * np.sinh(1)], [1j * np.sinh(1), -np.cosh(1)]])
    assert np.allclose(H, expected, atol=1e-15)


def test_H_reduces_to_h_at_zero_phi(rng):
    for model in ALL:
        spec = ModelSpec(model, 0.7, 0.0)
        p = rng.uniform(-2, 2, spec.space_dim)
        assert np.allclose(build_H(spec, p), build_h(spec, p), atol=1e-15)


def test_metric_matches_independent_exponential():
    for model in ALL:
        spec = ModelSpec(model, 1.0, 1.3)
        met = build_metric(spec)
        from pseudotopo.models import metric_generator

        G = metric_generator(spec)
        assert np.allclose(met.eta_plus, taylor_expm(-1.3 * G), atol=1e-12)
        assert np.allclose(met.rho @ met.rho, met.eta_plus, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(met.eta_plus)) > 0


def test_1d_metric_closed_form():
    met = build_metric(ModelSpec(D1, 1.0, 0.8))
    assert np.allclose(met.rho, np.cosh(0.4) * S0 - np.sinh(0.4) * S2, atol=1e-14)


def test_metric_spectra():
    phi = 1.1
    assert np.allclose(metric_spectrum(ModelSpec(D1, 1.0, phi)), [np.exp(-phi), np.exp(phi)])
    # n.J has eigenvalues +-1/2
    eig2 = np.linalg.eigvalsh(build_metric(ModelSpec(D2, 1.0, phi)).eta_plus)
    assert np.allclose(eig2, [np.exp(-phi / 2)] * 2 + [np.exp(phi / 2)] * 2)
    assert np.allclose(metric_spectrum(ModelSpec(D2, 1.0, phi)), eig2)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ALL), st.floats(-3, 3).filter(lambda m: abs(m) > 1e-3),
       st.floats(-2.5, 2.5), st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_similarity_and_pseudo_hermiticity(model, m, phi, p3):
    spec = ModelSpec(model, m, phi)
    p = np.array(p3[: spec.space_dim])
    met = build_metric(spec)
    H, h = build_H(spec, p), build_h(spec, p)
    scale = np.exp(abs(phi))
    assert np.max(np.abs(met.rho @ H @ met.rho_inv - h)) < 1e-12 * scale * (1 + np.abs(p).sum() + abs(m))
    eta_inv = np.linalg.inv(met.eta_plus)
    assert np.max(np.abs(H.conj().T - met.eta_plus @ H @ eta_inv)) < 1e-11 * scale**2 * (1 + np.abs(p).sum() + abs(m))


def test_stacked_momenta():
    spec = ModelSpec(D3, 1.0, 0.5)
    ps = np.arange(12.0).reshape(2, 2, 3)
    assert build_H(spec, ps).shape == (2, 2, 4, 4)
    assert np.allclose(build_H(spec, ps)[1, 0], build_H(spec, ps[1, 0]))


def test_spec_validation():
    with pytest.raises(AxisNotUnit, match="axis not unit length"):
        ModelSpec(D2, 1.0, 0.0, (1.0, 1.0, 0.0))
    with pytest.raises(ModelError):
        ModelSpec(D1, float("nan"))
    with pytest.raises(ModelError):
        ModelSpec("DIRAC_4D", 1.0)
    with pytest.raises(ModelError):
        ModelSpec(D1, 1.0, 25.0)
    with pytest.raises(DimensionMismatch):
        build_h(ModelSpec(D2, 1.0), [0.0])


def test_chiral_operators():
    assert np.allclose(find_chiral_operator(ModelSpec(D1, 1.0)), S1)
    assert np.allclose(find_chiral_operator(ModelSpec(D2, 1.0)), np.kron(S3, S0))
    assert np.allclose(find_chiral_operator(ModelSpec(D3, 1.0)), np.kron(S2, S0))


@pytest.mark.parametrize("model", ALL)
def test_pseudo_anti_hermiticity(model, rng):
    spec = ModelSpec(model, 1.0, 1.2)
    sym = chiral_operators(spec)
    for p in rng.uniform(-3, 3, (10, spec.space_dim)):
        H, h = build_H(spec, p), build_h(spec, p)
        assert np.allclose(anti(sym.gamma_D, h), 0, atol=1e-13)
        assert np.allclose(anti(sym.gamma_eta, H), 0, atol=1e-12)
        assert np.max(np.abs(H.conj().T + sym.kappa @ H @ np.linalg.inv(sym.kappa))) < 1e-10


def test_band_symmetry_commutes_with_h(rng):
    spec = ModelSpec(D2, 1.0, 0.0)
    S = band_symmetry(spec)
    for p in rng.uniform(-3, 3, (5, 2)):
        h = build_h(spec, p)
        assert np.allclose(S @ h, h @ S)
    assert band_symmetry(ModelSpec(D1, 1.0)) is None


def test_3d_symmetries(rng):
    spec = ModelSpec(D3, 1.0, 1.0)
    p = rng.uniform(-2, 2, 3)
    res = symmetry_residuals_3d(spec, p)
    assert res["time_reversal"] < 1e-12
    assert res["parity_deformed"] < 1e-12
    assert res["parity_standard"] > 1e-2
    at_zero = symmetry_residuals_3d(ModelSpec(D3, 1.0, 0.0), p)
    assert at_zero["parity_standard"] < 1e-14
    with pytest.raises(WrongModel):
        symmetry_generators_3d(ModelSpec(D1, 1.0))


def test_spec_examples_for_eigenvalues():
    from pseudotopo.linalg import gen_eig, herm_eig, principal_sqrt_pd

    ev2 = herm_eig(build_h(ModelSpec(D2, 1.0), [1.0, 1.0])).values
    assert np.allclose(ev2, [-np.sqrt(3)] * 2 + [np.sqrt(3)] * 2)
    assert np.allclose(herm_eig(build_h(ModelSpec(D3, 4.0), [0, 0, 3.0])).values, [-5, -5, 5, 5])
    vals = gen_eig(build_H(ModelSpec(D1, 1.0, 1.0), [0.0])).values
    assert np.allclose(vals, [-1, 1]) and np.max(np.abs(vals.imag)) < 1e-10
    vals = gen_eig(build_H(ModelSpec(D3, 2.0, 0.7), [0.0, 0.0, 0.0])).values
    assert np.allclose(vals, [-2, -2, 2, 2], atol=1e-9)
    met = build_metric(ModelSpec(D1, 1.0, 1.0))
    assert np.allclose(principal_sqrt_pd(met.eta_plus), taylor_expm(-0.5 * S2), atol=1e-12)


def test_metric_examples():
    for model in ALL:
        met = build_metric(ModelSpec(model, 1.0, 0.0))
        assert np.allclose(met.eta_plus, np.eye(met.rho.shape[0]))
    g5 = dirac_matrices()[4]
    rho3 = build_metric(ModelSpec(D3, 1.0, 0.9)).rho
    assert np.allclose(rho3, np.cosh(0.45) * np.eye(4) - np.sinh(0.45) * g5, atol=1e-12)


def test_2d_z_axis_is_hermitian():
    spec = ModelSpec(D2, 1.3, 1.7, (0.0, 0.0, 1.0))
    p = [0.4, -0.9]
    assert np.allclose(build_H(spec, p), build_h(spec, p), atol=1e-14)


def test_j3_commutes_with_xi4():
    J = o3_generators()
    xi = clifford_rep()
    assert np.allclose(J[2] @ xi[3], xi[3] @ J[2])
    # with this representation J3 = (i/2) xi1 xi2
    assert np.allclose(J[2], 0.5j * xi[0] @ xi[1])


@pytest.mark.parametrize("model", ALL)
def test_symmetry_set_invariants(model):
    spec = ModelSpec(model, 1.0, 0.8)
    sym = chiral_operators(spec)
    met = build_metric(spec)
    n = spec.dim
    assert np.allclose(sym.gamma_D @ sym.gamma_D, np.eye(n), atol=1e-12)
    assert np.allclose(sym.kappa, met.eta_plus @ sym.gamma_eta, atol=1e-12)
    # the search prefers operators anticommuting with the metric generator
    assert np.allclose(met.rho @ sym.gamma_D @ met.rho, sym.gamma_D, atol=1e-12)


def test_1d_gamma_eta_closed_form():
    spec = ModelSpec(D1, 1.0, 1.1)
    sym = chiral_operators(spec)
    assert np.allclose(sym.gamma_eta, S1 @ build_metric(spec).eta_plus, atol=1e-12)


def test_commutator_grows_with_phi(rng):
    p = rng.uniform(-1, 1, 3)
    sizes = []
    for phi in (0.0, 0.5, 1.0):
        H = build_H(ModelSpec(D3, 1.0, phi), p)
        sizes.append(np.max(np.abs(H @ H.conj().T - H.conj().T @ H)))
    assert sizes[0] < 1e-14 and sizes[0] < sizes[1] < sizes[2]
