"""Numerical tolerances shared by all modules."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10    # max |A - A^dagger|, scaled by max(1, max|A|)
    residual: float = 1e-10       # hermitian eigen-residual, relative to |A|
    gen_residual: float = 1e-8    # general eigen-residual, relative to |A|
    pd_cutoff: float = 1e-12      # smallest admissible eigenvalue of a metric
    max_condition: float = 1e12   # eigenvector-matrix condition number
    gap: float = 1e-8             # |E| below this counts as gapless
    axis_unit: float = 1e-12
    max_phi: float = 20.0         # keeps cosh/sinh(phi) far from overflow
    min_fd_step: float = 1e-8


TOL = Tolerances()
