"""Exception hierarchy.

Two families matter to callers: :class:`ModelError` (bad input or a model
that does not meet an operation's preconditions) and :class:`NumericalError`
(an algorithm failed to deliver the requested accuracy).  The CLI maps them to
exit codes 3 and 2 respectively.
"""


class PseudotopoError(Exception):
    """Base class for every error raised by the toolkit."""


class ModelError(PseudotopoError, ValueError):
    pass


class NumericalError(PseudotopoError, ArithmeticError):
    pass


# linalg
class NonSquare(ModelError):
    pass


class NonFinite(ModelError):
    pass


class NotHermitian(ModelError):
    pass


class NotPositiveDefinite(ModelError):
    def __init__(self, smallest_eigenvalue: float):
        super().__init__(f"matrix is not positive definite (smallest eigenvalue {smallest_eigenvalue:.6g})")
        self.smallest_eigenvalue = smallest_eigenvalue


class NoConvergence(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


# models
class IndexOutOfRange(ModelError):
    pass


class DimensionMismatch(ModelError):
    pass


class AxisNotUnit(ModelError):
    pass


class NoChiralOperator(ModelError):
    pass


class WrongModel(ModelError):
    pass


# pseudoherm / invariants
class SingularMetric(ModelError):
    pass


class GaplessModel(ModelError):
    pass


class StepTooSmall(ModelError):
    pass


class NotConverged(NumericalError):
    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


# lattice
class ResolutionTooCoarse(ModelError):
    pass


class WrongProfile(ModelError):
    pass


class NoGapIsolation(ModelError):
    pass


# cli
class ValidationError(ModelError):
    pass


class ParseError(ModelError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field
