"""Exception hierarchy shared by the library and the CLI."""


class KickedTopError(Exception):
    """Base class for all library errors."""


class ConfigError(KickedTopError, ValueError):
    """Invalid parameters or experiment configuration."""


class DomainError(KickedTopError, ValueError):
    """A phase-space point lies outside the domain of an operation."""


class ProjectionSingularityError(DomainError):
    """Stereographic projection evaluated at the north pole."""


class DimensionMismatchError(KickedTopError, ValueError):
    pass


class BinningMismatchError(KickedTopError, ValueError):
    pass


class DegenerateDataError(KickedTopError, ValueError):
    """Input without the spread an estimator needs (zero variance, constant field)."""


class EmptyHistogramError(KickedTopError, ValueError):
    pass


class NumericalError(KickedTopError, RuntimeError):
    """A numerical routine failed or produced an out-of-tolerance result."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonUnitaryError(NumericalError):
    pass


class EigensolverError(NumericalError):
    pass


class DegenerateSpectrumError(NumericalError):
    def __init__(self, message, degeneracies=0):
        super().__init__(message)
        self.degeneracies = degeneracies
