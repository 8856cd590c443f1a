"""Exception hierarchy shared by all modules."""


class NuGapError(Exception):
    """Base class for every error raised by this package."""


class PlantSpecError(NuGapError, ValueError):
    """A plant violates one or more invariants.

    ``problems`` lists every violated invariant, not just the first one.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class PoleEvaluationError(NuGapError, ZeroDivisionError):
    pass


class SingularPointError(NuGapError, ZeroDivisionError):
    pass


class SpectralFactorError(NuGapError, ValueError):
    pass


class BoundaryRootError(SpectralFactorError):
    """The para-Hermitian polynomial has a root on the imaginary axis."""


class IndefiniteError(SpectralFactorError):
    """The para-Hermitian polynomial is not positive on the imaginary axis."""


class DegreeLimitError(NuGapError, ValueError):
    pass


class ShapeMismatchError(NuGapError, ValueError):
    pass


class NonFiniteError(NuGapError, FloatingPointError):
    pass


class ZeroOnContourError(NuGapError, ArithmeticError):
    pass


class NonStabilizedError(NuGapError):
    pass


class InconclusiveError(NuGapError):
    """The numerics cannot decide between the two branches of the metric."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class NormalizationError(NuGapError, ValueError):
    pass


class DomainError(NuGapError, ValueError):
    pass
