"""Pseudo-hermiticity machinery.

Checks of ``H^dagger = eta H eta^-1``, the modified inner product
``<u|eta v>``, similarity maps of operators and states, Bloch solutions in
both Hilbert spaces, and time evolution that is unitary only in the metric.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .config import TOL
from .errors import DimensionMismatch, GaplessModel, SingularMetric
from .linalg import as_matrix, dagger, expm, gen_eig, herm_eig, max_abs
from .models import MetricPair, ModelSpec, build_H, build_h, build_metric


@dataclass(frozen=True)
class BlochSolution:
    momentum: np.ndarray
    energies: np.ndarray      # ascending
    vectors_D: np.ndarray     # columns |psi_a>, orthonormal in the standard product
    vectors_eta: np.ndarray   # columns |phi_a> = rho^-1 |psi_a>, orthonormal under eta
    filled_count: int

    @property
    def filled_D(self) -> np.ndarray:
        return self.vectors_D[:, : self.filled_count]

    @property
    def filled_eta(self) -> np.ndarray:
        return self.vectors_eta[:, : self.filled_count]


def check_pseudo_hermiticity(H, eta) -> float:
    """Max-entry norm of H^dagger - eta H eta^-1."""
    H, eta = as_matrix(H), as_matrix(eta)
    if H.shape != eta.shape:
        raise DimensionMismatch(f"H {H.shape} and eta {eta.shape} differ in shape")
    if np.linalg.cond(eta) > 1e14:
        raise SingularMetric("metric is singular to working precision")
    return max_abs(dagger(H) - eta @ H @ np.linalg.inv(eta))


def eta_inner(u, v, eta) -> complex:
    """<<u|v>>_eta = u^dagger eta v."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if u.shape[0] != eta.shape[0] or v.shape[0] != eta.shape[1]:
        raise DimensionMismatch("vector and metric dimensions differ")
    return complex(np.conj(u) @ eta @ v)


def eta_norm(v, eta) -> float:
    return float(np.sqrt(max(eta_inner(v, v, eta).real, 0.0)))


def similarity_map(H, metric: MetricPair):
    """Return (h, hermiticity residual) with h = rho H rho^-1."""
    H = as_matrix(H)
    if H.shape != metric.rho.shape:
        raise DimensionMismatch("Hamiltonian and metric differ in dimension")
    h = metric.rho @ H @ metric.rho_inv
    return h, max_abs(h - dagger(h))


def map_observable(O, metric: MetricPair, direction: Literal["toD", "toEta"] = "toD"):
    """O_D = rho O_eta rho^-1 (``toD``) or its inverse (``toEta``)."""
    O = as_matrix(O)
    if direction == "toD":
        return metric.rho @ O @ metric.rho_inv
    if direction == "toEta":
        return metric.rho_inv @ O @ metric.rho
    raise ValueError(f"direction must be 'toD' or 'toEta', got {direction!r}")


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so that its largest-magnitude entry is real positive."""
    vectors = np.array(vectors, dtype=complex)
    idx = np.argmax(np.abs(vectors), axis=-2)
    pivot = np.take_along_axis(vectors, idx[..., None, :], axis=-2)
    return vectors * (np.abs(pivot) / pivot)


def bloch_solve(spec: ModelSpec, p, metric: MetricPair | None = None) -> BlochSolution:
    """Eigen-system of H(p) obtained from h(p) and mapped by rho^-1."""
    metric = metric or build_metric(spec)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    energies, psi = herm_eig(build_h(spec, p))
    if np.min(np.abs(energies)) < TOL.gap:
        raise GaplessModel(f"|E| < {TOL.gap:g} at p = {p.tolist()}")
    psi = fix_phase(psi)
    return BlochSolution(
        momentum=p,
        energies=energies,
        vectors_D=psi,
        vectors_eta=metric.rho_inv @ psi,
        filled_count=int(np.sum(energies < 0)),
    )


def bloch_solve_direct(spec: ModelSpec, p, metric: MetricPair | None = None):
    """Cross-check path: (energies, eta-orthonormal eigenvectors) of H(p) from gen_eig.

    Degenerate eigenspaces are orthonormalised in the eta product.
    """
    metric = metric or build_metric(spec)
    eta = metric.eta_plus
    values, vecs = gen_eig(build_H(spec, p))
    out = np.empty_like(vecs)
    i = 0
    while i < len(values):
        j = i + 1
        while j < len(values) and abs(values[j] - values[i]) < 1e-8 * max(1.0, abs(values[i])):
            j += 1
        block = vecs[:, i:j]
        gram = dagger(block) @ eta @ block
        L = np.linalg.cholesky(gram)
        out[:, i:j] = block @ np.linalg.inv(dagger(L))
        i = j
    return values, out


def evolve(spec: ModelSpec, p, t: float, v0) -> np.ndarray:
    """exp(-i H(p) t) v0."""
    v0 = np.asarray(v0, dtype=complex)
    return expm(-1j * t * build_H(spec, p)) @ v0


def spectral_projector(A, select) -> np.ndarray:
    """Spectral projector of a diagonalisable A onto eigenvalues where select(E) holds."""
    values, vecs = gen_eig(A)
    keep = select(values)
    left = np.linalg.inv(vecs)
    return vecs[:, keep] @ left[keep, :]


def normality_check(H):
    """(max |[H, H^dagger]|, max |Q^2 - 1|) with Q = 1 - (P + P^dagger).

    P is the projector onto the negative-energy eigenstates of H.  Both numbers
    vanish for a hermitian H.
    """
    H = as_matrix(H)
    values = np.linalg.eigvals(H)
    if np.min(np.abs(values.real)) < TOL.gap:
        raise GaplessModel("normality check needs a gapped spectrum")
    comm = max_abs(H @ dagger(H) - dagger(H) @ H)
    P = spectral_projector(H, lambda E: E.real < 0)
    Q = np.eye(H.shape[0]) - (P + dagger(P))
    return comm, max_abs(Q @ Q - np.eye(H.shape[0]))
