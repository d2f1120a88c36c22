"""Real-space 1D model with a position-dependent mass.

The hermitian operator ``sigma2 p + m(x) sigma3`` is discretized on ``N``
sites with central differences, a Wilson term and Dirichlet ends.  Written in
2x2 blocks it is block tridiagonal, i.e. a Hermitian band matrix of
half-bandwidth 3; eigenvalues come from banded LAPACK and time evolution from
``scipy.sparse`` Krylov exponentials, so refinement studies stay cheap.

Sign of the Wilson term: ``-(r/2a) * (second difference) * sigma3``.  It lifts
the doubler at the zone edge to mass ``m + 2r/a > 0`` regardless of the sign
of ``m``, so a uniform mass is trivial (no edge states) and only the sign
change of ``m(x)`` binds a mode.

Chiral symmetry ``sigma1`` survives discretization exactly, which means an
open chain with a single domain wall always carries a partner state at one
boundary.  The two hybridise into a pair ``+-s`` with ``s ~ exp(-m0 L)``;
the wall mode is the chirality ``-1`` combination of that pair.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import ModelError, NoGapIsolation, ResolutionTooCoarse, WrongProfile
from .linalg import dagger
from .models import ModelId, ModelSpec, build_metric, hamiltonian_terms, pauli

PROFILE_KINDS = ("constant", "sign", "tanh")
_BAND = 3


def _logcosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2 * y)) - np.log(2.0)


@dataclass(frozen=True)
class MassProfile:
    kind: str = "sign"
    amplitude: float = 1.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ModelError(f"profile must be one of {PROFILE_KINDS}, got {self.kind!r}")
        if not (np.isfinite(self.amplitude) and self.amplitude > 0):
            raise ModelError("lattice.m0 must be positive")
        if not (np.isfinite(self.width) and self.width > 0):
            raise ModelError("lattice.w must be positive")

    @property
    def has_wall(self) -> bool:
        return self.kind != "constant"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "sign":
            return self.amplitude * np.sign(x)
        if self.kind == "tanh":
            return self.amplitude * np.tanh(x / self.width)
        return np.full_like(x, self.amplitude)

    def integral(self, x):
        """Antiderivative of m from 0 to x."""
        x = np.asarray(x, dtype=float)
        if self.kind == "sign":
            return self.amplitude * np.abs(x)
        if self.kind == "tanh":
            return self.amplitude * self.width * _logcosh(x / self.width)
        return self.amplitude * x


@dataclass(frozen=True, eq=False)
class LatticeOperator:
    """Block-tridiagonal operator: ``diag[j]`` at (j, j), ``upper[j]`` at (j, j+1),
    ``lower[j]`` at (j+1, j).  Row index of spinor component s at site j is 2j+s."""

    profile: MassProfile
    n_sites: int
    spacing: float
    wilson_r: float
    phi: float
    positions: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    @property
    def half_length(self) -> float:
        return self.spacing * self.n_sites / 2

    @property
    def size(self) -> int:
        return 2 * self.n_sites

    @property
    def hermitian(self) -> bool:
        return self.phi == 0.0

    def csr(self) -> sp.csr_matrix:
        N = self.n_sites
        s, t = np.meshgrid([0, 1], [0, 1], indexing="ij")
        j = np.arange(N)[:, None, None]
        k = np.arange(N - 1)[:, None, None]
        rows = np.concatenate([(2 * j + s).ravel(), (2 * k + s).ravel(), (2 * k + 2 + s).ravel()])
        cols = np.concatenate([(2 * j + t).ravel(), (2 * k + 2 + t).ravel(), (2 * k + t).ravel()])
        vals = np.concatenate([self.diag.ravel(), self.upper.ravel(), self.lower.ravel()])
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.size, self.size))

    def dense(self) -> np.ndarray:
        return self.csr().toarray()

    def banded(self) -> np.ndarray:
        """General band storage ``ab[u + i - j, j] = A[i, j]`` with u = l = 3."""
        A = self.csr()
        ab = np.zeros((2 * _BAND + 1, self.size), dtype=complex)
        for k in range(-_BAND, _BAND + 1):
            d = A.diagonal(k)
            if k >= 0:
                ab[_BAND - k, k:] = d
            else:
                ab[_BAND - k, :k] = d
        return ab

    def banded_upper(self) -> np.ndarray:
        """Hermitian upper band storage for the symmetric LAPACK drivers."""
        return self.banded()[: _BAND + 1]

    def matvec(self, v):
        return self.csr() @ v

    def hermiticity_defect(self) -> float:
        A = self.csr()
        return float(abs(A - A.getH()).max()) if A.nnz else 0.0


@dataclass(frozen=True)
class ZeroModeResult:
    energy: float
    state_D: np.ndarray
    state_eta: np.ndarray
    residual: float
    overlap_with_analytic: float
    levels: np.ndarray      # distinct |E| levels nearest zero, chiral pairs merged


def _validate(profile, n_sites, spacing, wilson_r):
    if int(n_sites) != n_sites or n_sites < 64:
        raise ModelError("lattice.n_sites must be an integer >= 64")
    if not (np.isfinite(spacing) and spacing > 0):
        raise ModelError("lattice.spacing must be positive")
    if spacing * profile.amplitude > 0.2:
        raise ResolutionTooCoarse(f"spacing * m0 = {spacing * profile.amplitude:g} exceeds 0.2")
    if not 0.0 <= wilson_r <= 1.0:
        raise ModelError("lattice.wilson_r must lie in [0, 1]")


def discretize_1d(profile: MassProfile, n_sites: int = 800, spacing: float = 0.05,
                  wilson_r: float = 1.0, phi: float = 0.0) -> LatticeOperator:
    """Lattice operator of the 1D model.

    ``phi = 0`` gives the hermitian ``h``.  Otherwise the mass matrix of the
    non-hermitian model replaces ``sigma3`` (in mass and Wilson terms alike),
    which equals the site-wise similarity ``rho^-1 h rho``.
    """
    _validate(profile, n_sites, spacing, wilson_r)
    n_sites = int(n_sites)
    a, r = float(spacing), float(wilson_r)
    x = (np.arange(n_sites) - (n_sites - 1) / 2) * a
    _, _, mass_unit = hamiltonian_terms(ModelSpec(ModelId.DIRAC_1D, 1.0, phi))
    s2 = pauli(2)
    diag = (profile(x) + r / a)[:, None, None] * mass_unit
    hop_up = -0.5j / a * s2 - r / (2 * a) * mass_unit
    hop_dn = 0.5j / a * s2 - r / (2 * a) * mass_unit
    upper = np.broadcast_to(hop_up, (n_sites - 1, 2, 2)).copy()
    lower = np.broadcast_to(hop_dn, (n_sites - 1, 2, 2)).copy()
    return LatticeOperator(profile, n_sites, a, r, float(phi), x, diag, upper, lower)


def similarity_lattice(op: LatticeOperator, phi: float) -> LatticeOperator:
    """Site-wise ``rho^-1 op rho`` of a hermitian lattice operator."""
    if not op.hermitian:
        raise ModelError("similarity_lattice expects the hermitian operator")
    metric = build_metric(ModelSpec(ModelId.DIRAC_1D, 1.0, phi))
    ri, r = metric.rho_inv, metric.rho
    return LatticeOperator(op.profile, op.n_sites, op.spacing, op.wilson_r, float(phi), op.positions,
                           ri @ op.diag @ r, ri @ op.upper @ r, ri @ op.lower @ r)


# ------------------------------------------------------------- spectra

def low_spectrum(op: LatticeOperator, count: int = 8) -> np.ndarray:
    """The ``2*count`` eigenvalues closest to the middle of the (hermitian) spectrum."""
    if not op.hermitian:
        raise ModelError("low_spectrum needs the hermitian operator")
    n = op.size
    lo, hi = max(n // 2 - count, 0), min(n // 2 + count - 1, n - 1)
    return scipy.linalg.eigvals_banded(op.banded_upper(), select="i", select_range=(lo, hi))


def spectral_gap(op: LatticeOperator) -> float:
    return float(np.min(np.abs(low_spectrum(op, 2))))


def _chiral_levels(values):
    """Distinct |E| levels; the spectrum is +-symmetric so pairs are merged."""
    return np.sort(np.abs(values))[::2]


def _near_zero_subspace(op: LatticeOperator, dim: int = 2, iterations: int = 4, seed: int = 7):
    """Orthonormal basis of the ``dim`` eigenvectors nearest E = 0 (block inverse iteration)."""
    ab = op.banded()
    X = np.random.default_rng(seed).standard_normal((op.size, dim)) + 0j
    for _ in range(iterations):
        X = scipy.linalg.solve_banded((_BAND, _BAND), ab, X)
        X, _ = np.linalg.qr(X)
    return X


def _eta_sitewise(phi: float) -> np.ndarray:
    return build_metric(ModelSpec(ModelId.DIRAC_1D, 1.0, phi)).eta_plus


def lattice_eta_inner(u, v, phi: float) -> complex:
    eta = _eta_sitewise(phi)
    return complex(np.einsum("ja,ab,jb->", np.conj(u).reshape(-1, 2), eta, np.asarray(v).reshape(-1, 2)))


def lattice_eta_norm(v, phi: float) -> float:
    return float(np.sqrt(lattice_eta_inner(v, v, phi).real))


def _sitewise(mat, v):
    return (np.asarray(v).reshape(-1, 2) @ mat.T).ravel()


def analytic_zero_mode(profile: MassProfile, grid, phi: float = 0.0) -> np.ndarray:
    """Closed-form wall mode rho^-1 exp(-int_0^x m) (1, -1)/sqrt(2), unit eta-norm."""
    if not profile.has_wall:
        raise WrongProfile("a constant mass has no sign change and no zero mode")
    grid = np.asarray(grid, dtype=float)
    envelope = np.exp(-(profile.integral(grid) - np.min(profile.integral(grid))))
    spinor = np.array([1.0, -1.0]) / np.sqrt(2)
    psi = (envelope[:, None] * spinor).ravel().astype(complex)
    rho_inv = build_metric(ModelSpec(ModelId.DIRAC_1D, 1.0, phi)).rho_inv
    phi_vec = _sitewise(rho_inv, psi)
    return phi_vec / lattice_eta_norm(phi_vec, phi)


def zero_mode_solve(op: LatticeOperator, phi: float = 0.0) -> ZeroModeResult:
    """Wall-bound zero mode of the hermitian lattice operator, mapped by rho^-1."""
    if not op.hermitian:
        raise ModelError("zero_mode_solve takes the hermitian operator; phi is passed separately")
    if op.wilson_r <= 0:
        raise ModelError("zero_mode_solve needs wilson_r > 0")
    levels = _chiral_levels(low_spectrum(op, 4))
    if not levels[1] > 2 * levels[0]:
        raise NoGapIsolation(f"lowest levels {levels[0]:.3g} and {levels[1]:.3g} are not separated by 2x")

    X = _near_zero_subspace(op)
    A = op.csr()
    gamma = np.kron(np.eye(op.n_sites), pauli(1))
    _, c = np.linalg.eigh(dagger(X) @ (gamma @ X))
    psi = X @ c[:, 0]                        # chirality -1: the wall mode
    pivot = psi[np.argmax(np.abs(psi))]
    psi = psi * (abs(pivot) / pivot)
    energy = float(levels[0])
    residual = float(np.linalg.norm(A @ psi))

    rho_inv = build_metric(ModelSpec(ModelId.DIRAC_1D, 1.0, phi)).rho_inv
    state_eta = _sitewise(rho_inv, psi)
    state_eta /= lattice_eta_norm(state_eta, phi)
    ref = analytic_zero_mode(op.profile, op.positions, phi)
    overlap = abs(lattice_eta_inner(ref, state_eta, phi)) ** 2
    return ZeroModeResult(energy, psi, state_eta, residual, float(overlap), levels)


def zero_mode_nonhermitian(op_H: LatticeOperator) -> np.ndarray:
    """Wall mode of the non-hermitian lattice operator, found without using h.

    Inverse iteration on H itself gives its two near-zero right eigenvectors;
    within that span the mapped chirality rho^-1 sigma1 rho picks the wall
    state.  Returned with unit eta-norm and largest entry real positive.
    """
    X = _near_zero_subspace(op_H)
    metric = build_metric(ModelSpec(ModelId.DIRAC_1D, 1.0, op_H.phi))
    chi = metric.rho_inv @ pauli(1) @ metric.rho
    GX = np.column_stack([_sitewise(chi, X[:, i]) for i in range(X.shape[1])])
    w, c = np.linalg.eig(np.linalg.lstsq(X, GX, rcond=None)[0])
    v = X @ c[:, np.argmin(w.real)]
    v /= lattice_eta_norm(v, op_H.phi)
    return v


def phase_aligned_distance(u, v, phi: float) -> float:
    """min over theta of || u - exp(i theta) v ||_eta."""
    z = lattice_eta_inner(v, u, phi)
    w = np.asarray(v) * (z / abs(z) if z else 1.0)
    d = np.asarray(u) - w
    return float(np.sqrt(max(lattice_eta_inner(d, d, phi).real, 0.0)))


def near_zero_states(op: LatticeOperator, count: int = 2, iterations: int = 10):
    """(energies, orthonormal eigenvectors) of the ``count`` states nearest E = 0 (hermitian op)."""
    if not op.hermitian:
        raise ModelError("near_zero_states needs the hermitian operator")
    X = _near_zero_subspace(op, dim=count + 2, iterations=iterations)
    E, c = np.linalg.eigh(dagger(X) @ (op.csr() @ X))
    keep = np.argsort(np.abs(E))[:count]
    keep = keep[np.argsort(E[keep])]
    return E[keep], X @ c[:, keep]


def wall_bound_count(op: LatticeOperator, window: float | None = None) -> int:
    """Dimension of the |E| < m0/10 subspace that lives mostly within |x| < L/4."""
    window = op.half_length / 4 if window is None else window
    values = low_spectrum(op, 4)
    count = int(np.sum(np.abs(values) < op.profile.amplitude / 10))
    if count == 0:
        return 0
    _, vecs = near_zero_states(op, count)
    # hybridised pairs share weight between wall and edge, so count within the span
    inside = np.repeat(np.abs(op.positions) < window, 2)
    V = vecs[inside]
    return int(np.sum(np.linalg.eigvalsh(dagger(V) @ V) > 0.5))


def evolve_lattice(op: LatticeOperator, v0, times) -> np.ndarray:
    """States exp(-i op t) v0 for each t in ``times`` (rows of the result)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    v0 = np.asarray(v0, dtype=complex)
    A = (-1j * op.csr()).tocsc()
    if len(times) == 1:
        return expm_multiply(A * times[0], v0)[None]
    if np.allclose(np.diff(times), times[1] - times[0]):
        return expm_multiply(A, v0, start=times[0], stop=times[-1], num=len(times), endpoint=True)
    return np.stack([expm_multiply(A * t, v0) for t in times])


def eta_norm_drift(op_H: LatticeOperator, v0, t_max: float = 10.0, steps: int = 11) -> float:
    """max_t | ||v(t)||_eta - ||v0||_eta | under the non-hermitian lattice evolution."""
    states = evolve_lattice(op_H, v0, np.linspace(0.0, t_max, steps))
    n0 = lattice_eta_norm(v0, op_H.phi)
    return float(max(abs(lattice_eta_norm(s, op_H.phi) - n0) for s in states))


@dataclass(frozen=True)
class RefinementRow:
    spacing: float
    n_sites: int
    energy: float
    infidelity: float   # 1 - overlap


def refinement_study(profile: MassProfile, spacing: float = 0.05, half_length: float = 20.0,
                     levels: int = 3, wilson_r: float = 1.0, phi: float = 0.0) -> list[RefinementRow]:
    """Zero-mode errors on a -> a/2 -> a/4 ... at fixed box size."""
    rows = []
    for k in range(levels):
        a = spacing / 2**k
        n = int(round(2 * half_length / a))
        res = zero_mode_solve(discretize_1d(profile, n, a, wilson_r), phi)
        rows.append(RefinementRow(a, n, abs(res.energy), 1 - res.overlap_with_analytic))
    return rows
