import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import taylor_expm
from pseudotopo.errors import DimensionMismatch, GaplessModel, SingularMetric
from pseudotopo.linalg import multiset_distance
from pseudotopo.models import ModelId, ModelSpec, build_H, build_h, build_metric
from pseudotopo.pseudoherm import (
    bloch_solve,
    bloch_solve_direct,
    check_pseudo_hermiticity,
    eta_inner,
    eta_norm,
    evolve,
    fix_phase,
    map_observable,
    normality_check,
    similarity_map,
)

D1, D2, D3 = ModelId.DIRAC_1D, ModelId.DIRAC_2D, ModelId.DIRAC_3D
ALL = (D1, D2, D3)


def closed_form_filled_state(m, phi, p):
    """Filled eigenstate of H in 1D: rho^-1 (ip - m + l, -(ip - m) + l) / (2 l)."""
    lam = np.hypot(p, m)
    psi = np.array([1j * p - m + lam, -(1j * p - m) + lam]) / (2 * lam)
    return build_metric(ModelSpec(D1, m, phi)).rho_inv @ psi


def test_bloch_examples():
    sol = bloch_solve(ModelSpec(D1, 1.0, 0.0), [0.0])
    assert np.allclose(sol.energies, [-1, 1])
    assert np.allclose(sol.filled_D[:, 0], [0, 1])
    sol = bloch_solve(ModelSpec(D1, 1.0, 1.0), [1.0])
    assert np.allclose(sol.energies, [-np.sqrt(2), np.sqrt(2)])
    assert sol.filled_count == 1


def test_filled_state_matches_closed_form():
    spec = ModelSpec(D1, 1.0, 1.0)
    sol = bloch_solve(spec, [1.0])
    ref = closed_form_filled_state(1.0, 1.0, 1.0)
    eta = build_metric(spec).eta_plus
    assert abs(eta_norm(ref, eta) - 1) < 1e-12
    assert abs(abs(eta_inner(ref, sol.filled_eta[:, 0], eta)) - 1) < 1e-9


@pytest.mark.parametrize("model", ALL)
def test_orthonormality_split(model, rng):
    spec = ModelSpec(model, 1.0, 1.0)
    sol = bloch_solve(spec, rng.uniform(-2, 2, spec.space_dim))
    eta = build_metric(spec).eta_plus
    n = spec.dim
    assert np.allclose(sol.vectors_D.conj().T @ sol.vectors_D, np.eye(n), atol=1e-12)
    assert np.allclose(sol.vectors_eta.conj().T @ eta @ sol.vectors_eta, np.eye(n), atol=1e-12)
    defect = np.max(np.abs(sol.vectors_eta.conj().T @ sol.vectors_eta - np.eye(n)))
    assert defect > 1e-4
    assert sol.filled_count == n // 2


@pytest.mark.parametrize("model", ALL)
def test_direct_solution_agrees(model, rng):
    spec = ModelSpec(model, 0.8, 1.4)
    p = rng.uniform(-2, 2, spec.space_dim)
    values, vecs = bloch_solve_direct(spec, p)
    sol = bloch_solve(spec, p)
    assert multiset_distance(values, sol.energies) < 1e-10
    eta = build_metric(spec).eta_plus
    assert np.allclose(vecs.conj().T @ eta @ vecs, np.eye(spec.dim), atol=1e-10)
    H = build_H(spec, p)
    assert np.allclose(H @ sol.vectors_eta, sol.vectors_eta * sol.energies, atol=1e-10)


def test_gapless_detected():
    with pytest.raises(GaplessModel):
        bloch_solve(ModelSpec(D1, 0.0), [0.0])


def test_pseudo_hermiticity_checks():
    spec = ModelSpec(D1, 1.0, 1.0)
    met = build_metric(spec)
    assert check_pseudo_hermiticity(build_H(spec, [0.4]), met.eta_plus) < 1e-13
    with pytest.raises(DimensionMismatch):
        check_pseudo_hermiticity(np.eye(2), np.eye(4))
    with pytest.raises(SingularMetric):
        check_pseudo_hermiticity(np.eye(2), np.diag([1.0, 1e-17]))
    h, defect = similarity_map(build_H(spec, [0.4]), met)
    assert defect < 1e-13 and np.allclose(h, build_h(spec, [0.4]))


@pytest.mark.parametrize("model", ALL)
def test_expectation_values_agree(model, rng):
    spec = ModelSpec(model, 1.0, 0.9)
    met = build_metric(spec)
    n = spec.dim
    for _ in range(20):
        O_eta = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        O_D = map_observable(O_eta, met, "toD")
        phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        psi = met.rho @ phi
        assert np.isclose(eta_inner(phi, O_eta @ phi, met.eta_plus), np.vdot(psi, O_D @ psi))
        assert np.allclose(map_observable(O_D, met, "toEta"), O_eta)
    with pytest.raises(ValueError):
        map_observable(np.eye(n), met, "sideways")


def test_fix_phase():
    v = np.array([[0.1, 2j], [-3.0, 0.5]])
    out = fix_phase(v)
    assert out[1, 0] == pytest.approx(3.0) and out[0, 1] == pytest.approx(2.0)
    assert np.allclose(np.abs(out), np.abs(v))


def test_evolution_matches_oracle_and_conserves_eta_norm(rng):
    spec = ModelSpec(D1, 1.0, 1.0)
    eta = build_metric(spec).eta_plus
    v0 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    assert np.allclose(evolve(spec, [0.5], 0.0, v0), v0)
    std_drift = 0.0
    for t in (1.0, 5.0, 10.0):
        v = evolve(spec, [0.5], t, v0)
        assert np.allclose(v, taylor_expm(-1j * t * build_H(spec, [0.5])) @ v0, atol=1e-10)
        assert abs(eta_norm(v, eta) - eta_norm(v0, eta)) < 1e-8
        std_drift = max(std_drift, abs(np.linalg.norm(v) - np.linalg.norm(v0)))
    assert std_drift > 1e-3


def test_normality_check():
    spec = ModelSpec(D1, 1.0, 1.0)
    comm, qdef = normality_check(build_H(spec, [0.3]))
    assert comm > 1e-3 and qdef > 1e-3
    assert max(normality_check(build_h(spec, [0.3]))) < 1e-12
    assert normality_check(build_H(ModelSpec(D1, 1.0, 0.0), [0.3]))[0] < 1e-14


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ALL), st.floats(0.2, 3), st.floats(-2, 2), st.integers(0, 2**32 - 1))
def test_isospectrality_property(model, m, phi, seed):
    spec = ModelSpec(model, m, phi)
    p = np.random.default_rng(seed).uniform(-5, 5, spec.space_dim)
    ev_H = np.linalg.eigvals(build_H(spec, p))
    assert np.max(np.abs(ev_H.imag)) < 1e-9 * np.exp(abs(phi))
    assert multiset_distance(ev_H, np.linalg.eigvalsh(build_h(spec, p))) < 1e-9 * np.exp(abs(phi))
