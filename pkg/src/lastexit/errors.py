"""Exception types raised across the package."""


class LastExitError(Exception):
    """Base class for all package errors."""


class InvalidModel(LastExitError, ValueError):
    pass


class InvalidRange(LastExitError, ValueError):
    pass


class RangeTooWide(InvalidRange):
    """Fit range leaves the small-lag regime (1 - rho/v^2 >= 0.5)."""


class EmbeddingFailed(LastExitError, RuntimeError):
    """Circulant embedding stayed indefinite after the allowed doublings."""

    def __init__(self, message, worst_ratio=None, eps=None):
        super().__init__(message)
        self.worst_ratio = worst_ratio
        self.eps = eps


class UnknownPickandsConstant(LastExitError, ValueError):
    pass


class InvalidSampleSize(LastExitError, ValueError):
    pass


class MonotonicityViolated(LastExitError, ValueError):
    pass


class NotPSD(LastExitError, ValueError):
    pass


class PreconditionViolated(LastExitError, ValueError):
    pass


class TooFewSamples(LastExitError, ValueError):
    pass


class ConfigInvalid(LastExitError, ValueError):
    pass
