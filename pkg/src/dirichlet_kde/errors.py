"""Exception hierarchy for dirichlet_kde."""


class DirichletKDEError(ValueError):
    """Base class for all errors raised by this package."""


class NegativeCoordinate(DirichletKDEError):
    pass


class SumExceedsOne(DirichletKDEError):
    pass


class PointOutsideSimplex(DirichletKDEError):
    pass


class PointOnBoundary(DirichletKDEError):
    pass


class InvalidDelta(DirichletKDEError):
    pass


class ResolutionTooLarge(DirichletKDEError):
    pass


class NonFiniteValue(DirichletKDEError):
    pass


class DomainError(DirichletKDEError):
    pass


class ParamsBelowTwo(DirichletKDEError):
    pass


class DatasetTooSmall(DirichletKDEError):
    pass


class BoundaryDivergence(DirichletKDEError):
    pass


class RegimeMismatch(DirichletKDEError):
    pass


class DegenerateG(DirichletKDEError):
    """The first-order bias coefficient vanishes, so no optimal bandwidth exists."""


class DegenerateSample(DirichletKDEError):
    pass


class PreconditionViolated(DirichletKDEError):
    pass


class EmptyFile(DirichletKDEError):
    pass


class _LineError(DirichletKDEError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ParseError(_LineError):
    pass


class NegativePart(_LineError):
    pass
