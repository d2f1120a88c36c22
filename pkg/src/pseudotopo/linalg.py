"""Dense complex linear algebra kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The eigen
solvers accept stacks of shape ``(..., n, n)`` so that quadrature code can
solve many small momentum-space problems in one call.
"""

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .config import TOL, Tolerances
from .errors import (
    IllConditioned,
    NoConvergence,
    NonFinite,
    NonSquare,
    NotHermitian,
    NotPositiveDefinite,
)


class EigenDecomposition(NamedTuple):
    values: np.ndarray   # (..., n), real for herm_eig, complex for gen_eig
    vectors: np.ndarray  # (..., n, n), columns are unit-norm eigenvectors


def as_matrix(a, *, square: bool = True) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2:
        raise NonSquare(f"expected a matrix, got shape {a.shape}")
    if square and a.shape[-1] != a.shape[-2]:
        raise NonSquare(f"matrix of shape {a.shape[-2:]} is not square")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has non-finite entries")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


def hermiticity_defect(a) -> float:
    return max_abs(a - dagger(a))


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a Pade core."""
    a = as_matrix(a)
    return scipy.linalg.expm(a)


def _frobenius(a):
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def herm_eig(a, tol: Tolerances = TOL) -> EigenDecomposition:
    """Eigen-decomposition of a hermitian matrix (or stack of them).

    Eigenvalues come back real and ascending, eigenvectors orthonormal.
    """
    a = as_matrix(a)
    scale = max(1.0, max_abs(a))
    defect = hermiticity_defect(a)
    if defect > tol.hermiticity * scale:
        raise NotHermitian(f"max |A - A^dagger| = {defect:.3g}")
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    resid = np.linalg.norm(a @ vectors - vectors * values[..., None, :], axis=-2)
    bound = tol.residual * np.maximum(_frobenius(a), 1.0)
    if np.any(resid > bound[..., None]):
        raise NoConvergence(f"eigen-residual {resid.max():.3g} exceeds tolerance")
    return EigenDecomposition(values, vectors)


def gen_eig(a, tol: Tolerances = TOL) -> EigenDecomposition:
    """Right eigenpairs of a general square matrix (or stack).

    Eigenvalues are sorted by real part, ties broken by imaginary part.
    """
    a = as_matrix(a)
    try:
        values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.lexsort((values.imag, values.real), axis=-1)
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[..., None, :], axis=-1)
    resid = np.linalg.norm(a @ vectors - vectors * values[..., None, :], axis=-2)
    bound = tol.gen_residual * np.maximum(_frobenius(a), 1.0)
    if np.any(resid > bound[..., None]):
        raise NoConvergence(f"eigen-residual {resid.max():.3g} exceeds tolerance")
    cond = np.linalg.cond(vectors)
    if np.any(cond > tol.max_condition):
        raise IllConditioned(f"eigenvector condition number {np.max(cond):.3g}")
    return EigenDecomposition(values, vectors)


def principal_sqrt_pd(a, tol: Tolerances = TOL) -> np.ndarray:
    """Hermitian positive-definite square root of a hermitian PD matrix."""
    values, vectors = herm_eig(a, tol)
    smallest = float(np.min(values))
    if smallest <= tol.pd_cutoff:
        raise NotPositiveDefinite(smallest)
    return (vectors * np.sqrt(values)[..., None, :]) @ dagger(vectors)


def inv_sqrt_pd(a) -> np.ndarray:
    """Inverse square root of a stack of small hermitian PD matrices (no checks)."""
    values, vectors = np.linalg.eigh(a)
    return (vectors / np.sqrt(values)[..., None, :]) @ dagger(vectors)


def multiset_distance(x, y) -> float:
    """Max distance between two multisets of eigenvalues of equal size.

    Both are sorted by (real, imag) before pairing.
    """
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.shape != y.shape:
        raise ValueError("multisets differ in size")
    xs = x[np.lexsort((np.round(x.imag, 6), x.real))]
    ys = y[np.lexsort((np.round(y.imag, 6), y.real))]
    return max_abs(xs - ys)
