"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical infeasibility (poles, contours, truncation) with 3.
"""


class LensEHGError(Exception):
    """Base class for all package errors."""


class DomainError(LensEHGError, ValueError):
    """An argument lies outside the domain of a function."""


class ConfigurationError(LensEHGError, ValueError):
    """Inconsistent or invalid user supplied configuration."""


class InfeasibleError(LensEHGError):
    """The requested evaluation cannot be carried out reliably."""


class PoleError(InfeasibleError):
    """An argument is closer to a pole than ``pole_guard`` allows."""

    def __init__(self, message, location=None, factor=None):
        super().__init__(message)
        self.location = location
        self.factor = factor


class ContourError(InfeasibleError):
    """Straight integration contours do not separate the pole sequences."""


class AccuracyError(InfeasibleError):
    """An infinite product could not be truncated within the index cap."""


class SamplerError(InfeasibleError):
    """No admissible parameter configuration was found."""


class TruncationWarning(RuntimeWarning):
    """Issued when a q-Pochhammer product hits its term cap."""


class EvaluationError(InfeasibleError):
    """An integrand returned a non-finite value at a quadrature node."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location
