"""Toolkit for pseudo-hermitian Dirac Hamiltonians and their topological invariants."""

__version__ = "0.1.0"

from .errors import ModelError, NumericalError, PseudotopoError
from .models import ModelId, ModelSpec, build_H, build_h, build_metric

__all__ = [
    "ModelError",
    "ModelId",
    "ModelSpec",
    "NumericalError",
    "PseudotopoError",
    "__version__",
    "build_H",
    "build_h",
    "build_metric",
]
