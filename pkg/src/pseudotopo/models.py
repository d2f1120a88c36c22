"""Non-hermitian Dirac Hamiltonians in one, two and three space dimensions.

Every model comes as a pair: a hermitian Dirac Hamiltonian ``h(p)`` and a
non-hermitian deformation ``H(p)`` that is hermitian in the Hilbert space with
metric ``eta_plus = exp(-phi G)``, where ``G`` is a fixed hermitian generator.
``rho = exp(-phi G / 2)`` maps one onto the other, ``h = rho H rho^-1``.

Conventions (natural units, Pauli matrices in the standard representation):

* 1D: ``h = sigma2 p + m sigma3``, ``G = sigma2``.
* 2D: ``h = xi4 px + xi5 py + m xi3``, ``G = n.J`` with
  ``J^a = (i/8) eps^{abc} [xi^b, xi^c]``.
* 3D: ``h = alpha.p + m beta``, ``G = gamma5``.

The deformed Hamiltonians are written in closed form (not by conjugation), so
that the similarity relation is a genuine check.  With the metrics above, the
1D deformation reads ``m cosh(phi) sigma3 + i m sinh(phi) sigma1`` and the 2D
mass term is ``m sum_b R^{3b} xi^b`` with ``R`` evaluated at rapidity
``-phi/2`` (see :func:`rotation_matrix`).
"""

import itertools
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .config import TOL
from .errors import (
    AxisNotUnit,
    DimensionMismatch,
    IndexOutOfRange,
    ModelError,
    NoChiralOperator,
    WrongModel,
)
from .linalg import anticommutator, expm, herm_eig, max_abs


class ModelId(str, Enum):
    DIRAC_1D = "DIRAC_1D"
    DIRAC_2D = "DIRAC_2D"
    DIRAC_3D = "DIRAC_3D"


_SPACE_DIM = {ModelId.DIRAC_1D: 1, ModelId.DIRAC_2D: 2, ModelId.DIRAC_3D: 3}
_SPINOR_DIM = {ModelId.DIRAC_1D: 2, ModelId.DIRAC_2D: 4, ModelId.DIRAC_3D: 4}


@dataclass(frozen=True)
class ModelSpec:
    """One of the three models plus its parameters.

    ``axis`` is only used by the 2D model; the default (1, 0, 0) gives a
    genuinely non-hermitian H (the z axis is the degenerate hermitian case).
    """

    model_id: ModelId
    mass: float
    phi: float = 0.0
    axis: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        try:
            object.__setattr__(self, "model_id", ModelId(self.model_id))
        except ValueError:
            raise ModelError(f"unknown model id {self.model_id!r}") from None
        mass, phi = float(self.mass), float(self.phi)
        if not (np.isfinite(mass) and np.isfinite(phi)):
            raise ModelError("mass and phi must be finite")
        if abs(phi) > TOL.max_phi:
            raise ModelError(f"|phi| must not exceed {TOL.max_phi}")
        axis = tuple(float(c) for c in self.axis)
        if len(axis) != 3 or not all(np.isfinite(axis)):
            raise AxisNotUnit("axis must be a finite 3-vector")
        if self.model_id is ModelId.DIRAC_2D and abs(np.linalg.norm(axis) - 1.0) > TOL.axis_unit:
            raise AxisNotUnit("axis not unit length")
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "axis", axis)

    @property
    def space_dim(self) -> int:
        return _SPACE_DIM[self.model_id]

    @property
    def dim(self) -> int:
        return _SPINOR_DIM[self.model_id]

    @property
    def n_filled(self) -> int:
        return self.dim // 2


@dataclass(frozen=True)
class MetricPair:
    eta_plus: np.ndarray
    rho: np.ndarray
    rho_inv: np.ndarray


@dataclass(frozen=True)
class SymmetrySet:
    gamma_D: np.ndarray
    gamma_eta: np.ndarray
    kappa: np.ndarray
    time_reversal_unitary: np.ndarray | None = None
    parity_std: np.ndarray | None = None
    parity_deformed: np.ndarray | None = None


# ---------------------------------------------------------------- matrices

_I2 = np.eye(2, dtype=complex)
_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli(a: int) -> np.ndarray:
    """Standard Pauli matrix sigma^a, a in {1, 2, 3}."""
    if a not in (1, 2, 3):
        raise IndexOutOfRange(f"Pauli index must be 1, 2 or 3, got {a!r}")
    return _SIGMA[a - 1].copy()


def _pauli0(a: int) -> np.ndarray:
    return _I2.copy() if a == 0 else pauli(a)


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for a, b, c in itertools.permutations(range(3)):
        eps[a, b, c] = np.linalg.det(np.eye(3)[[a, b, c]])
    return eps


def clifford_rep() -> tuple:
    """(xi1, ..., xi5) as tensor products tau x sigma.

    The representation satisfies {xi^p, xi^q} = 2 delta^{pq}.
    """
    t1, t2, t3 = _SIGMA
    s1, s2, s3 = _SIGMA
    return (
        np.kron(t2, _I2),
        np.kron(t3, _I2),
        np.kron(t1, s3),
        np.kron(t1, s1),
        np.kron(t1, s2),
    )


def o3_generators() -> tuple:
    """J^a = (i/8) eps^{abc} [xi^b, xi^c] for a = 1, 2, 3."""
    xi = clifford_rep()
    eps = levi_civita()
    out = []
    for a in range(3):
        J = np.zeros((4, 4), dtype=complex)
        for b, c in itertools.product(range(3), repeat=2):
            if eps[a, b, c]:
                J += eps[a, b, c] * (xi[b] @ xi[c] - xi[c] @ xi[b])
        out.append(1j / 8 * J)
    return tuple(out)


def dirac_matrices() -> tuple:
    """(alpha1, alpha2, alpha3, beta, gamma5) in the Dirac representation."""
    t1, _, t3 = _SIGMA
    alphas = tuple(np.kron(t1, s) for s in _SIGMA)
    return alphas + (np.kron(t3, _I2), np.kron(t1, _I2))


def rotation_matrix(axis, rapidity: float) -> np.ndarray:
    """R^{ab} = n^a n^b (1 - cosh r) + delta^{ab} cosh r + i eps^{abc} n^c sinh r."""
    n = np.asarray(axis, dtype=float)
    eps = levi_civita()
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    return np.outer(n, n) * (1 - ch) + np.eye(3) * ch + 1j * sh * np.einsum("abc,c->ab", eps, n)


# ------------------------------------------------------------ Hamiltonians

def hamiltonian_terms(spec: ModelSpec):
    """Return (kinetic, mass_h, mass_H): h(p) = sum_i p_i K_i + mass_h, likewise H."""
    m, phi = spec.mass, spec.phi
    if spec.model_id is ModelId.DIRAC_1D:
        s1, s2, s3 = _SIGMA
        return (s2,), m * s3, m * (np.cosh(phi) * s3 + 1j * np.sinh(phi) * s1)
    if spec.model_id is ModelId.DIRAC_2D:
        xi = clifford_rep()
        R3 = rotation_matrix(spec.axis, -phi / 2)[2]
        mass_H = m * sum(R3[b] * xi[b] for b in range(3))
        return (xi[3], xi[4]), m * xi[2], mass_H
    a1, a2, a3, beta, g5 = dirac_matrices()
    mass_H = m * (np.cosh(phi) * np.eye(4) + np.sinh(phi) * g5) @ beta
    return (a1, a2, a3), m * beta, mass_H


def _momentum(spec: ModelSpec, p) -> np.ndarray:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape[-1] != spec.space_dim:
        raise DimensionMismatch(f"{spec.model_id.value} needs {spec.space_dim} momentum components, got {p.shape[-1]}")
    return p


def _assemble(kinetic, mass, p):
    return np.einsum("...i,ijk->...jk", p, np.stack(kinetic)) + mass


def build_h(spec: ModelSpec, p) -> np.ndarray:
    """Hermitian Hamiltonian at momentum p (or a stack of momenta, shape (..., D))."""
    p = _momentum(spec, p)
    kinetic, mass_h, _ = hamiltonian_terms(spec)
    return _assemble(kinetic, mass_h, p)


def build_H(spec: ModelSpec, p) -> np.ndarray:
    """Non-hermitian Hamiltonian at momentum p (or a stack); equals build_h at phi = 0."""
    p = _momentum(spec, p)
    kinetic, _, mass_H = hamiltonian_terms(spec)
    return _assemble(kinetic, mass_H, p)


# ------------------------------------------------------------------ metric

def metric_generator(spec: ModelSpec) -> np.ndarray:
    if spec.model_id is ModelId.DIRAC_1D:
        return pauli(2)
    if spec.model_id is ModelId.DIRAC_2D:
        return sum(n * J for n, J in zip(spec.axis, o3_generators()))
    return dirac_matrices()[4]


def build_metric(spec: ModelSpec) -> MetricPair:
    G = metric_generator(spec)
    phi = spec.phi
    pair = MetricPair(eta_plus=expm(-phi * G), rho=expm(-phi / 2 * G), rho_inv=expm(phi / 2 * G))
    ident = np.eye(spec.dim)
    if max_abs(pair.rho @ pair.rho - pair.eta_plus) > 1e-10 * np.exp(abs(phi)):
        raise ModelError("metric square-root relation violated")
    if max_abs(pair.rho @ pair.rho_inv - ident) > 1e-10 * np.exp(abs(phi)):
        raise ModelError("metric inverse relation violated")
    return pair


# --------------------------------------------------------------- symmetries

def pauli_strings(dim: int) -> list:
    """The dim^2 hermitian Pauli strings of size dim (2 or 4), in lexicographic order."""
    if dim == 2:
        return [_pauli0(a) for a in range(4)]
    return [np.kron(_pauli0(a), _pauli0(b)) for a, b in itertools.product(range(4), repeat=2)]


def _probe_momenta(spec: ModelSpec) -> np.ndarray:
    rng = np.random.default_rng(20240611)
    return np.vstack([np.zeros(spec.space_dim), rng.uniform(-2, 2, size=(4, spec.space_dim))])


def find_chiral_operator(spec: ModelSpec) -> np.ndarray:
    """Scan Pauli strings for an involution anticommuting with h(p) at probe momenta.

    Candidates that also anticommute with the metric generator (so that
    rho Gamma rho = Gamma) are preferred; otherwise the first match in
    lexicographic order wins.
    """
    probe = replace(spec, mass=spec.mass or 1.0)
    hs = [build_h(probe, p) for p in _probe_momenta(probe)]
    G = metric_generator(spec)
    matches = [g for g in pauli_strings(spec.dim)
               if all(max_abs(anticommutator(g, h)) < 1e-12 for h in hs)]
    if not matches:
        raise NoChiralOperator(f"no Pauli-string anticommutes with h for {spec.model_id.value}")
    preferred = [g for g in matches if max_abs(anticommutator(g, G)) < 1e-12]
    return (preferred or matches)[0]


def symmetry_generators_3d(spec: ModelSpec):
    """(V, beta, exp(phi gamma5) beta); time reversal acts as V . conj(.)."""
    if spec.model_id is not ModelId.DIRAC_3D:
        raise WrongModel("time-reversal and parity generators are defined for DIRAC_3D only")
    *_, beta, g5 = dirac_matrices()
    V = np.kron(_I2, 1j * pauli(2))
    return V, beta, expm(spec.phi * g5) @ beta


def chiral_operators(spec: ModelSpec) -> SymmetrySet:
    gamma_D = find_chiral_operator(spec)
    metric = build_metric(spec)
    extras = {}
    if spec.model_id is ModelId.DIRAC_3D:
        V, P, Pt = symmetry_generators_3d(spec)
        extras = dict(time_reversal_unitary=V, parity_std=P, parity_deformed=Pt)
    return SymmetrySet(
        gamma_D=gamma_D,
        gamma_eta=metric.rho_inv @ gamma_D @ metric.rho,
        kappa=metric.rho @ gamma_D @ metric.rho,
        **extras,
    )


def symmetry_residuals_3d(spec: ModelSpec, p) -> dict:
    """Residuals of time reversal and parity for H^(3) at momentum p.

    ``time_reversal`` uses the Bloch convention T H(p) T^-1 = H(-p);
    ``time_reversal_fixed_p`` compares with H(p) instead.  Parity
    residuals compare P H(-p) P^-1 with H(p).
    """
    V, P, Pt = symmetry_generators_3d(spec)
    p = _momentum(spec, p)
    H, Hm = build_H(spec, p), build_H(spec, -p)
    TH = V @ np.conj(H) @ np.linalg.inv(V)
    return {
        "time_reversal": max_abs(TH - Hm),
        "time_reversal_fixed_p": max_abs(TH - H),
        "parity_deformed": max_abs(Pt @ Hm @ np.linalg.inv(Pt) - H),
        "parity_standard": max_abs(P @ Hm @ np.linalg.inv(P) - H),
    }


def band_symmetry(spec: ModelSpec) -> np.ndarray | None:
    """A hermitian involution commuting with h that splits degenerate bands.

    For the 2D model this is tau1 x I = -2 J^3, which separates h^(2) into its
    two decoupled two-band Dirac copies.  The 1D model needs none.
    """
    if spec.model_id is ModelId.DIRAC_2D:
        return np.kron(_SIGMA[0], _I2)
    return None


def metric_spectrum(spec: ModelSpec) -> np.ndarray:
    """Eigenvalues of eta_plus predicted from the generator's spectrum."""
    g = herm_eig(metric_generator(spec)).values
    return np.sort(np.exp(-spec.phi * g))
