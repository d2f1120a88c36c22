"""Berry connections and topological invariants in both Hilbert spaces.

Every quantity is computed twice: from the eigenstates of the hermitian ``h``
with the standard inner product, and from the eigenstates of the
non-hermitian ``H`` (obtained from ``H`` itself, not by mapping the ``h``
states) with the ``eta``-inner product.  The two must agree node by node.

Gauge.  Connections, and through them the 1D Chern-Simons integral over the
open momentum line, depend on the phase convention of the filled states.  The
filled frame is fixed by a p-independent reference frame ``W``:

    Psi(p) = P(p) W (W^dagger P(p) W)^{-1/2},

i.e. ``W^dagger Psi`` is hermitian positive definite.  ``W`` spans the +1
eigenspace of the chiral operator, for which ``W^dagger P W = 1/2`` at every
momentum, so the gauge is globally smooth.  For the 1D model this is exactly
the gauge of the closed-form filled state ``(ip - m + l, -(ip - m) + l)/(2l)``.
On the ``H`` side the frame is ``rho^-1 W`` and all products carry ``eta``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .config import TOL
from .errors import (
    GaplessModel,
    ModelError,
    NoChiralOperator,
    NotConverged,
    StepTooSmall,
    WrongModel,
)
from .linalg import dagger, expm, gen_eig, herm_eig, inv_sqrt_pd, max_abs
from .models import (
    MetricPair,
    ModelId,
    ModelSpec,
    band_symmetry,
    build_H,
    build_h,
    build_metric,
    find_chiral_operator,
    pauli,
)

SCHEMES = ("trapezoid-on-angle", "trapezoid-on-momentum")
DEFAULT_POINTS_2D = 256   # n_r = n_theta; the 2D grid has n^2 plaquettes


@dataclass(frozen=True)
class QuadratureSpec:
    n_points: int = 2048
    cutoff: float = 50.0
    scheme: str = "trapezoid-on-angle"
    fd_step: float = 1e-4
    tol: float = 1e-6

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 16 or self.n_points % 2:
            raise ModelError("quadrature.n_points must be an even integer >= 16")
        if not self.cutoff > 0:
            raise ModelError("quadrature.cutoff must be positive")
        if self.scheme not in SCHEMES:
            raise ModelError(f"quadrature.scheme must be one of {SCHEMES}")
        if not self.fd_step >= TOL.min_fd_step:
            raise StepTooSmall(f"finite-difference step {self.fd_step!r} below {TOL.min_fd_step:g}")
        if not self.tol > 0:
            raise ModelError("quadrature.tol must be positive")


@dataclass(frozen=True)
class BerryConnection:
    a: np.ndarray        # (D, N, N) from h-states, standard product
    A: np.ndarray        # (D, N, N) from H-states, eta product
    difference: float    # max |A - a|


@dataclass(frozen=True)
class QMatrices:
    P_eta: np.ndarray
    Q_eta: np.ndarray
    Q_D: np.ndarray
    offdiag: np.ndarray  # q block in the chiral basis (1x1 for the 1D model)
    residuals: dict


@dataclass(frozen=True)
class Curvature2D:
    labels: tuple                 # (sector, band) per entry
    per_band_h: np.ndarray
    per_band_H: np.ndarray
    filled_h: float               # non-abelian link determinant over both filled bands
    filled_H: float
    difference: float
    convergence_estimate: float

    @property
    def filled_per_band(self) -> np.ndarray:
        return self.per_band_H[[i for i, (_, band) in enumerate(self.labels) if band == "lower"]]


@dataclass(frozen=True)
class InvariantReport:
    quadrature: QuadratureSpec
    cs1: float | None = None
    winding: float | None = None
    chern_like_2d: tuple | None = None
    equality_residuals: dict = field(default_factory=dict)
    convergence_estimate: float = 0.0


# --------------------------------------------------------------- frames

def reference_frame(spec: ModelSpec) -> np.ndarray:
    """Orthonormal p-independent frame W (dim x N) that fixes the gauge."""
    try:
        gamma = find_chiral_operator(spec)
    except NoChiralOperator:
        return herm_eig(build_h(spec, np.zeros(spec.space_dim))).vectors[:, : spec.n_filled]
    values, vectors = herm_eig(gamma)
    return vectors[:, values > 0]


class _Frames:
    """Gauge-fixed filled frames of h and H over stacks of momenta."""

    def __init__(self, spec: ModelSpec, metric: MetricPair | None = None):
        self.spec = spec
        self.metric = metric or build_metric(spec)
        self.W = reference_frame(spec)
        self.W_eta = self.metric.rho_inv @ self.W
        self.eta = self.metric.eta_plus
        self.N = spec.n_filled

    def _check_gap(self, energies):
        if np.min(np.abs(np.real(energies))) < TOL.gap:
            raise GaplessModel("spectrum closes the gap on the quadrature grid")

    def projectors_h(self, ps):
        E, V = np.linalg.eigh(build_h(self.spec, ps))
        self._check_gap(E)
        Vf = V[..., : self.N]
        return Vf @ dagger(Vf)

    def projectors_H(self, ps):
        E, V = gen_eig(build_H(self.spec, ps))
        self._check_gap(E)
        Vf = V[..., : self.N]
        gram = dagger(Vf) @ self.eta @ Vf
        return Vf @ np.linalg.solve(gram, dagger(Vf) @ self.eta)

    def frame_h(self, ps):
        X = self.projectors_h(ps) @ self.W
        M = dagger(self.W) @ X
        return X @ inv_sqrt_pd(0.5 * (M + dagger(M)))

    def frame_H(self, ps):
        X = self.projectors_H(ps) @ self.W_eta
        M = dagger(self.W_eta) @ self.eta @ X
        return X @ inv_sqrt_pd(0.5 * (M + dagger(M)))


def berry_connection_point(spec: ModelSpec, p, delta: float = 1e-4) -> BerryConnection:
    """Filled-band connection a_i = <psi|d_i psi> and A_i = <<phi|d_i phi>>_eta.

    ``p`` is one momentum (D,) or a stack (..., D); the result then carries the
    stack shape in front of (D, N, N).  Derivatives are central differences
    with step ``delta``.
    """
    if delta < TOL.min_fd_step:
        raise StepTooSmall(f"step {delta!r} below {TOL.min_fd_step:g}")
    D = spec.space_dim
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or (D == 1 and p.shape[-1] != 1):
        p = p[..., None]        # scalar or stack of 1D momenta
    shifts = np.eye(D) * delta
    pts = np.stack([p] + [p + e for e in shifts] + [p - e for e in shifts])
    fr = _Frames(spec)
    Xh, XH = fr.frame_h(pts), fr.frame_H(pts)
    a = np.stack([dagger(Xh[0]) @ (Xh[1 + i] - Xh[1 + D + i]) for i in range(D)], axis=-3) / (2 * delta)
    A = np.stack([dagger(XH[0]) @ fr.eta @ (XH[1 + i] - XH[1 + D + i]) for i in range(D)], axis=-3) / (2 * delta)
    return BerryConnection(a=a, A=A, difference=max_abs(A - a))


def connection_closed_form_1d(m: float, p) -> np.ndarray:
    """-i m / (2 (p^2 + m^2)) for the 1D model in the chiral-frame gauge."""
    p = np.asarray(p, dtype=float)
    return -1j * m / (2 * (p**2 + m**2))


# -------------------------------------------------------------- 1D lines

def _require_1d(spec: ModelSpec):
    if spec.model_id is not ModelId.DIRAC_1D:
        raise WrongModel("line invariants are defined for DIRAC_1D")
    if abs(spec.mass) < TOL.gap:
        raise GaplessModel("|m| must exceed the gap tolerance")


def _line_nodes(spec: ModelSpec, quad: QuadratureSpec):
    """Nodes t of the integration variable and the map t -> p."""
    if quad.scheme == "trapezoid-on-angle":
        t = np.linspace(-np.pi / 2, np.pi / 2, quad.n_points + 1)
        scale = abs(spec.mass)
        return t, lambda x: scale * np.tan(x)
    t = np.linspace(-quad.cutoff, quad.cutoff, quad.n_points + 1)
    return t, lambda x: x


def _derivative_frames(frame_fn, t, to_p, step, one_sided_ends):
    """Frames at nodes t and their t-derivative (central, one-sided at the ends if asked)."""
    n = len(t)
    pts = np.concatenate([t, t + step, t - step, t + 2 * step, t - 2 * step])
    X = frame_fn(to_p(pts)[:, None]).reshape(5, n, *frame_fn(to_p(t[:1])[:, None]).shape[1:])
    X0, Xp, Xm, Xpp, Xmm = X
    dX = (Xp - Xm) / (2 * step)
    if one_sided_ends:
        dX[0] = (-3 * X0[0] + 4 * Xp[0] - Xpp[0]) / (2 * step)
        dX[-1] = (3 * X0[-1] - 4 * Xm[-1] + Xmm[-1]) / (2 * step)
    return X0, dX


@dataclass(frozen=True)
class _LineData:
    t: np.ndarray
    p: np.ndarray
    conn_h: np.ndarray      # trace of the connection along t, h side
    conn_H: np.ndarray
    q_h: np.ndarray
    q_H: np.ndarray
    offdiag_defect: float
    tail: float


_U1 = None


def chiral_rotation_1d() -> np.ndarray:
    """U = exp(-i pi/4 sigma2), which takes sigma1 to -sigma3."""
    global _U1
    if _U1 is None:
        _U1 = expm(-1j * np.pi / 4 * pauli(2))
    return _U1.copy()


def _line_data(spec: ModelSpec, quad: QuadratureSpec) -> _LineData:
    _require_1d(spec)
    fr = _Frames(spec)
    t, to_p = _line_nodes(spec, quad)
    angle = quad.scheme == "trapezoid-on-angle"
    Xh, dXh = _derivative_frames(fr.frame_h, t, to_p, quad.fd_step, angle)
    XH, dXH = _derivative_frames(fr.frame_H, t, to_p, quad.fd_step, angle)
    conn_h = np.trace(dagger(Xh) @ dXh, axis1=-2, axis2=-1)
    conn_H = np.trace(dagger(XH) @ fr.eta @ dXH, axis1=-2, axis2=-1)

    p = to_p(t)
    U = chiral_rotation_1d()
    T = U @ fr.metric.rho
    T_inv = fr.metric.rho_inv @ dagger(U)
    ident = np.eye(2)
    Xq_H = T @ (ident - 2 * fr.projectors_H(p[:, None])) @ T_inv
    Xq_h = U @ (ident - 2 * fr.projectors_h(p[:, None])) @ dagger(U)
    defect = max(max_abs(Xq_H[:, 0, 0]), max_abs(Xq_H[:, 1, 1]))

    tail = 0.0
    if not angle:
        # integrand decays like 1/p^2: the missing tails are ~ |A(L)| L each
        tail = (abs(conn_H[0]) + abs(conn_H[-1])) * quad.cutoff / (2 * np.pi)
    return _LineData(t, p, conn_h, conn_H, Xq_h[:, 0, 1], Xq_H[:, 0, 1], defect, tail)


def _cs1_from(conn, t):
    full = trapezoid(conn, t)
    half = trapezoid(conn[::2], t[::2])
    value = 1j / (2 * np.pi) * full
    estimate = abs(full - half) / (3 * 2 * np.pi)
    return value, estimate


def _winding_from(q):
    phase = np.unwrap(np.angle(q))
    return -(phase[-1] - phase[0]) / (2 * np.pi)


def cs1(spec: ModelSpec, quad: QuadratureSpec | None = None) -> float:
    """Chern-Simons integral (i/2pi) int A over the momentum line, from the H side."""
    return invariant_report(spec, quad or QuadratureSpec()).cs1


def winding_number(spec: ModelSpec, quad: QuadratureSpec | None = None) -> float:
    """-Delta arg(q) / 2pi along the line, q the off-diagonal entry of the rotated Q-matrix."""
    data = _line_data(spec, quad or QuadratureSpec())
    return float(_winding_from(data.q_H))


def invariant_report(spec: ModelSpec, quad: QuadratureSpec | None = None) -> InvariantReport:
    if spec.model_id is ModelId.DIRAC_2D:
        quad = quad or QuadratureSpec(n_points=DEFAULT_POINTS_2D)
        curv = curvature_2d(spec, quad)
        return InvariantReport(
            quadrature=quad,
            chern_like_2d=tuple(float(c) for c in curv.filled_per_band),
            equality_residuals={"curvature_H_vs_h": curv.difference},
            convergence_estimate=curv.convergence_estimate,
        )
    if spec.model_id is not ModelId.DIRAC_1D:
        raise WrongModel(f"no invariant is computed for {spec.model_id.value}")
    quad = quad or QuadratureSpec()
    data = _line_data(spec, quad)
    cs_H, est_H = _cs1_from(data.conn_H, data.t)
    cs_h, _ = _cs1_from(data.conn_h, data.t)
    estimate = est_H + data.tail
    if estimate > quad.tol:
        raise NotConverged(f"CS1 convergence estimate {estimate:.3g} exceeds {quad.tol:g}", estimate)
    nu_H, nu_h = _winding_from(data.q_H), _winding_from(data.q_h)
    return InvariantReport(
        quadrature=quad,
        cs1=float(cs_H.real),
        winding=float(nu_H),
        equality_residuals={
            "connection_nodes": max_abs(data.conn_H - data.conn_h),
            "cs1_H_vs_h": abs(cs_H - cs_h),
            "cs1_imaginary": abs(cs_H.imag),
            "q_nodes": max_abs(data.q_H - data.q_h),
            "q_modulus": max_abs(np.abs(data.q_H) - 1),
            "q_offdiagonal_form": data.offdiag_defect,
            "winding_H_vs_h": abs(nu_H - nu_h),
        },
        convergence_estimate=float(estimate),
    )


# ------------------------------------------------------------- Q-matrices

def q_matrices(spec: ModelSpec, p) -> QMatrices:
    """Filled-band projector and Q-matrices of H and h at p, plus the chiral-basis block."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    fr = _Frames(spec)
    metric, eta = fr.metric, fr.eta
    P_eta = fr.projectors_H(p[None])[0]
    P_D = fr.projectors_h(p[None])[0]
    ident = np.eye(spec.dim)
    Q_eta = ident - 2 * P_eta
    Q_D = ident - 2 * P_D
    if spec.model_id is ModelId.DIRAC_1D:
        T = chiral_rotation_1d()
    else:
        values, vectors = herm_eig(find_chiral_operator(spec))
        T = dagger(vectors)      # rows: -1 eigenvectors first, as U does for sigma1
    X = T @ metric.rho @ Q_eta @ metric.rho_inv @ dagger(T)
    N = fr.N
    q = X[:N, N:]
    residuals = {
        "P_idempotency": max_abs(P_eta @ P_eta - P_eta),
        "Q_involution": max_abs(Q_eta @ Q_eta - ident),
        "Q_D_involution": max_abs(Q_D @ Q_D - ident),
        "similarity": max_abs(Q_D - metric.rho @ Q_eta @ metric.rho_inv),
        "eta_hermiticity": max_abs(dagger(Q_eta) - eta @ Q_eta @ np.linalg.inv(eta)),
        "diagonal_blocks": max(max_abs(X[:N, :N]), max_abs(X[N:, N:])),
        "q_unitarity": max_abs(dagger(q) @ q - np.eye(N)),
    }
    return QMatrices(P_eta=P_eta, Q_eta=Q_eta, Q_D=Q_D, offdiag=q, residuals=residuals)


def q_closed_form_1d(m: float, p: float) -> complex:
    return (-1j * p + m) / np.hypot(p, m)


# ------------------------------------------------------------ 2D curvature

def _sector_states(fr: _Frames, ps, side: str):
    """States (..., dim, 4) for bands [(s=-1, lower), (-1, upper), (+1, lower), (+1, upper)]."""
    S = band_symmetry(fr.spec)
    values, vectors = herm_eig(S)
    blocks = []
    for s in (-1, 1):
        B = vectors[:, np.isclose(values, s)]
        if side == "h":
            hs = dagger(B) @ build_h(fr.spec, ps) @ B
            E, c = np.linalg.eigh(hs)
            blocks.append(B @ c)
        else:
            B_eta = fr.metric.rho_inv @ B
            Hs = np.linalg.pinv(B_eta) @ build_H(fr.spec, ps) @ B_eta
            E, c = gen_eig(Hs)
            E = E.real
            states = B_eta @ c
            norms = np.sqrt(np.einsum("...ia,ij,...ja->...a", np.conj(states), fr.eta, states).real)
            blocks.append(states / norms[..., None, :])
        if np.min(np.abs(E)) < TOL.gap:
            raise GaplessModel("gap closes on the curvature grid")
    return np.concatenate(blocks, axis=-1)


def _plaquette_sum(links_r, links_t):
    """Sum of plaquette phases / 2pi for links on an (nr+1, nt) periodic-in-t grid."""
    loop = links_r * links_t[1:, :] * np.conj(np.roll(links_r, -1, axis=1)) * np.conj(links_t[:-1, :])
    return float(np.sum(np.angle(loop)) / (2 * np.pi))


def _band_integrals(states, G, filled_idx):
    """Per-band integrals and the non-abelian filled-set integral on a polar grid."""
    def overlap(u, v):
        return np.einsum("...ia,ij,...ja->...a", np.conj(u), G, v)

    nxt_t = np.roll(states, -1, axis=1)
    links_r = overlap(states[:-1], states[1:])        # (nr, nt, bands)
    links_t = overlap(states, nxt_t)                   # (nr+1, nt, bands)
    per_band = np.array([_plaquette_sum(links_r[..., b], links_t[..., b]) for b in range(states.shape[-1])])

    F = states[..., filled_idx]
    Fr = np.linalg.det(dagger(F[:-1]) @ G @ F[1:])
    Ft = np.linalg.det(dagger(F) @ G @ np.roll(F, -1, axis=1))
    return per_band, _plaquette_sum(Fr, Ft)


def curvature_2d(spec: ModelSpec, quad: QuadratureSpec | None = None) -> Curvature2D:
    """Berry-curvature integrals over the disc |p| <= cutoff, per band, from h and from H.

    The disc is tiled by polar plaquettes (radial nodes r = |m| tan u, u uniform)
    and each plaquette contributes the phase of its gauge-invariant link
    product.  Degenerate bands are resolved by :func:`band_symmetry`.
    """
    quad = quad or QuadratureSpec(n_points=DEFAULT_POINTS_2D)
    if spec.model_id is not ModelId.DIRAC_2D:
        raise WrongModel("curvature_2d needs DIRAC_2D")
    m = abs(spec.mass)
    if m < TOL.gap:
        raise GaplessModel("|m| must exceed the gap tolerance")
    if quad.cutoff < 20 * m:
        raise ModelError("quadrature.cutoff must be at least 20 |m| for the 2D disc")
    n = quad.n_points
    r = m * np.tan(np.linspace(0.0, np.arctan(quad.cutoff / m), n + 1))
    theta = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    ps = np.stack(np.broadcast_arrays(r[:, None] * np.cos(theta), r[:, None] * np.sin(theta)), axis=-1)

    fr = _Frames(spec)
    labels = ((-1, "lower"), (-1, "upper"), (1, "lower"), (1, "upper"))
    filled = [0, 2]
    st_h = _sector_states(fr, ps, "h")
    st_H = _sector_states(fr, ps, "H")
    ident = np.eye(spec.dim)
    band_h, fill_h = _band_integrals(st_h, ident, filled)
    band_H, fill_H = _band_integrals(st_H, fr.eta, filled)
    coarse_H, _ = _band_integrals(st_H[::2, ::2], fr.eta, filled)
    estimate = float(np.max(np.abs(band_H - coarse_H)) / 3)
    if estimate > quad.tol:
        raise NotConverged(f"curvature convergence estimate {estimate:.3g} exceeds {quad.tol:g}", estimate)
    return Curvature2D(
        labels=labels,
        per_band_h=band_h,
        per_band_H=band_H,
        filled_h=fill_h,
        filled_H=fill_H,
        difference=float(max(np.max(np.abs(band_H - band_h)), abs(fill_H - fill_h))),
        convergence_estimate=estimate,
    )


def disc_flux_closed_form(m: float, cutoff: float) -> float:
    """|flux|/2pi of one two-band Dirac copy through |p| <= cutoff: (1 - |m|/sqrt(L^2+m^2))/2."""
    return 0.5 * (1 - abs(m) / np.hypot(cutoff, m))
