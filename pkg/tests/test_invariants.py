import numpy as np
import pytest

from pseudotopo.errors import GaplessModel, ModelError, NotConverged, StepTooSmall, WrongModel
from pseudotopo.invariants import (
    QuadratureSpec,
    berry_connection_point,
    connection_closed_form_1d,
    cs1,
    curvature_2d,
    disc_flux_closed_form,
    invariant_report,
    q_closed_form_1d,
    q_matrices,
    winding_number,
)
from pseudotopo.models import ModelId, ModelSpec

D1, D2, D3 = ModelId.DIRAC_1D, ModelId.DIRAC_2D, ModelId.DIRAC_3D


def test_quadrature_validation():
    with pytest.raises(ModelError):
        QuadratureSpec(n_points=15)
    with pytest.raises(ModelError):
        QuadratureSpec(n_points=17)
    with pytest.raises(ModelError):
        QuadratureSpec(scheme="simpson")
    with pytest.raises(StepTooSmall):
        QuadratureSpec(fd_step=1e-9)


def test_connection_examples():
    spec = ModelSpec(D1, 1.0, 0.3)
    A0 = berry_connection_point(spec, [0.0]).A[0, 0, 0]
    assert abs(A0 - (-0.5j)) < 1e-8
    A50 = berry_connection_point(spec, [50.0]).A[0, 0, 0]
    assert abs(A50) <= 1.0 / (2 * 50**2) * 1.001
    conn = berry_connection_point(ModelSpec(D1, 1.0, 1.5), [0.37])
    assert conn.difference < 1e-8
    with pytest.raises(StepTooSmall):
        berry_connection_point(spec, [0.0], delta=1e-9)
    with pytest.raises(GaplessModel):
        berry_connection_point(ModelSpec(D1, 0.0), [0.0])


def test_connection_closed_form_on_a_grid():
    ps = np.linspace(-8, 8, 33)
    for m in (0.5, -2.0):
        A = berry_connection_point(ModelSpec(D1, m, 1.0), ps).A[:, 0, 0, 0]
        # central-difference truncation error scales as (delta / m)^2
        assert np.max(np.abs(A - connection_closed_form_1d(m, ps))) < (1e-4 / abs(m)) ** 2


@pytest.mark.parametrize("model", [D2, D3])
def test_connection_equality_higher_dim(model, rng):
    spec = ModelSpec(model, 1.0, 1.0)
    ps = rng.uniform(-4, 4, (20, spec.space_dim))
    conn = berry_connection_point(spec, ps)
    assert conn.A.shape == (20, spec.space_dim, 2, 2)
    assert conn.difference < 1e-8


@pytest.mark.parametrize("m,phi", [(1.0, 0.7), (-2.0, 1.2), (0.5, 0.0)])
def test_cs1_and_winding(m, phi):
    spec = ModelSpec(D1, m, phi)
    assert abs(cs1(spec) - np.sign(m) / 4) < 1e-6
    assert abs(winding_number(spec) - np.sign(m) / 2) < 1e-8


def test_cs1_truncated_line_matches_arctan_oracle():
    # (i/2pi) int_{-L}^{L} -i m / (2 (p^2 + m^2)) dp = sign(m) arctan(L/|m|) / (2 pi)
    m, L = 1.5, 50.0
    quad = QuadratureSpec(n_points=4096, cutoff=L, scheme="trapezoid-on-momentum", tol=1e-1)
    rep = invariant_report(ModelSpec(D1, m, 0.8), quad)
    assert abs(rep.cs1 - np.arctan(L / m) / (2 * np.pi)) < 1e-6


def test_momentum_scheme_reports_tail_as_not_converged():
    quad = QuadratureSpec(n_points=2048, cutoff=50.0, scheme="trapezoid-on-momentum")
    with pytest.raises(NotConverged):
        cs1(ModelSpec(D1, 1.0, 0.0), quad)


def test_invariant_report_equality_residuals():
    rep = invariant_report(ModelSpec(D1, -1.0, 2.0))
    assert abs(rep.winding - 2 * rep.cs1) < 2e-6
    assert rep.equality_residuals["connection_nodes"] < 1e-8
    assert rep.equality_residuals["q_modulus"] < 1e-10
    assert rep.convergence_estimate < 1e-6


def test_invariant_guards():
    with pytest.raises(GaplessModel):
        cs1(ModelSpec(D1, 0.0))
    with pytest.raises(WrongModel):
        winding_number(ModelSpec(D3, 1.0))
    with pytest.raises(WrongModel):
        invariant_report(ModelSpec(D3, 1.0))


def test_q_matrix_examples():
    qm = q_matrices(ModelSpec(D1, 1.0, 0.0), [0.0])
    assert np.allclose(qm.Q_D, np.diag([1, -1]))
    qm = q_matrices(ModelSpec(D1, 1.0, 1.0), [1.0])
    q = qm.offdiag[0, 0]
    assert abs(abs(q) - 1) < 1e-12
    assert abs(np.angle(q) + np.pi / 4) < 1e-10
    assert abs(q - q_closed_form_1d(1.0, 1.0)) < 1e-10
    for key in ("P_idempotency", "Q_involution", "similarity", "eta_hermiticity", "diagonal_blocks"):
        assert qm.residuals[key] < 1e-10


@pytest.mark.parametrize("model", [D2, D3])
def test_q_matrices_higher_dim(model, rng):
    spec = ModelSpec(model, 1.0, 1.0)
    qm = q_matrices(spec, rng.uniform(-2, 2, spec.space_dim))
    assert max(qm.residuals.values()) < 1e-10
    assert qm.offdiag.shape == (2, 2)


def test_curvature_2d():
    quad = QuadratureSpec(n_points=128, tol=1e-5)
    c1 = curvature_2d(ModelSpec(D2, 1.0, 1.0), quad)
    c0 = curvature_2d(ModelSpec(D2, 1.0, 0.0), quad)
    assert c1.difference < 1e-8
    assert np.max(np.abs(c1.per_band_H - c0.per_band_H)) < 1e-8
    assert abs(np.sum(c1.per_band_H)) < 1e-6
    flux = disc_flux_closed_form(1.0, 50.0)
    assert np.allclose(np.abs(c1.per_band_H), flux, atol=1e-5)
    assert abs(c1.filled_H - np.sum(c1.filled_per_band)) < 1e-6


def test_curvature_tail_shrinks_with_cutoff():
    small = curvature_2d(ModelSpec(D2, 1.0, 0.5), QuadratureSpec(n_points=64, cutoff=20.0, tol=1e-3))
    large = curvature_2d(ModelSpec(D2, 1.0, 0.5), QuadratureSpec(n_points=64, cutoff=80.0, tol=1e-3))
    assert 0.5 - abs(large.per_band_H[0]) < 0.5 - abs(small.per_band_H[0])


def test_curvature_guards():
    with pytest.raises(ModelError):
        curvature_2d(ModelSpec(D2, 1.0), QuadratureSpec(n_points=32, cutoff=10.0))
    with pytest.raises(NotConverged):
        curvature_2d(ModelSpec(D2, 1.0), QuadratureSpec(n_points=16, tol=1e-8))
    with pytest.raises(WrongModel):
        curvature_2d(ModelSpec(D1, 1.0))
