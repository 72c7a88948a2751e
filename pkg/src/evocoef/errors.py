"""Exception types shared across the package."""


class EvocoefError(Exception):
    """Base class for all package errors."""


class ConfigError(EvocoefError, ValueError):
    """Invalid configuration or argument; ``field`` names the offender."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class HypothesisError(EvocoefError):
    """A hard failure of the recovery hypotheses (h2 vanishing).

    ``flagged`` holds the node indices that witness the failure.
    """

    def __init__(self, message, flagged=()):
        super().__init__(message)
        self.flagged = list(flagged)


class QuadratureError(EvocoefError):
    """Kernel quadrature could not reach the requested tolerance."""


class StabilityError(EvocoefError, ValueError):
    """Time step outside the accuracy regime of the integrator."""
