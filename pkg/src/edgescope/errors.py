"""Exception hierarchy shared across the package."""


class EdgescopeError(Exception):
    """Base class for all package errors."""


class InvalidInputError(EdgescopeError, ValueError):
    """Input array or argument violates a precondition."""


class DegenerateMatrixError(InvalidInputError):
    """Matrix has zero spectral radius and cannot be rescaled."""


class RankDeficiencyError(EdgescopeError, ArithmeticError):
    """Normal equations are singular; a positive ridge parameter is required."""


class TooShortError(InvalidInputError):
    """Series is shorter than the operation needs."""


class ConstantSignalError(InvalidInputError):
    """Signal has zero standard deviation."""


class DriverDivergenceError(EdgescopeError, FloatingPointError):
    """Driver trajectory produced a non-finite state."""


class CannotTrainError(EdgescopeError):
    """Readout training was requested on an unstable reservoir run."""


class DegenerateTargetError(InvalidInputError):
    """Training target has zero standard deviation."""


class DiagnosticsUnavailableError(EdgescopeError):
    """A statistic was requested for a trajectory that diverged."""


class NoEdgeFoundError(EdgescopeError):
    """Sweep grid does not bracket a stable-to-unstable transition."""


class ConfigError(EdgescopeError, ValueError):
    """Configuration failed validation.

    Attributes
    ----------
    key : str or None
        Dotted name of the offending configuration key.
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class StabilityOrderError(NoEdgeFoundError):
    """A stable grid point lies above an unstable one, so no single edge exists."""
