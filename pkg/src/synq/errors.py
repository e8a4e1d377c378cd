"""Exception types shared across the package."""


class SynqError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(SynqError):
    """Invalid configuration values, dimensions, or arguments."""


class NumericalFailureError(SynqError):
    """A numerical evaluation produced non-finite values.

    Carries the time and state at which the failure occurred when known.
    """

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class DivergenceError(SynqError):
    """Episode state or weights left the configured bounds.

    ``t`` and ``state`` describe the last valid step; ``partial_log`` holds
    whatever trajectory data was recorded before the failure so callers can
    flush it.
    """

    def __init__(self, message, t=None, state=None, weights=None, partial_log=None):
        super().__init__(message)
        self.t = t
        self.state = state
        self.weights = weights
        self.partial_log = partial_log


class SolverError(SynqError):
    """A linear-algebra or iterative solver failed to produce a solution."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ExcitationError(SynqError):
    """Regressor data is too poorly excited to identify parameters."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number
