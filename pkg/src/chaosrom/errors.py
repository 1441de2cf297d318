"""Exception types shared across the package.

The CLI maps ConfigurationError to exit code 1 and every other
ChaosRomError to exit code 2 (numerical failure).
"""


class ChaosRomError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ChaosRomError):
    """Invalid configuration, dimensions, or arguments."""


class NumericalError(ChaosRomError):
    """A numerical procedure failed (blow-up, divergence, bad factorization)."""


class DegenerateDataError(ChaosRomError):
    """Input data carries no usable signal (zero variance, zero norm)."""


class BlowUpError(NumericalError):
    """Time stepping produced NaN or Inf.

    step_index is the offending step when known, else None.
    """

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class IntegrationFailureError(NumericalError):
    """Adaptive integration stopped before reaching the end time.

    Carries the last time that was reached successfully and the partial
    trajectory up to that point so forecast evaluation can mark the
    remaining horizon as diverged instead of aborting.
    """

    def __init__(self, message, last_valid_time, partial_times=None,
                 partial_states=None):
        super().__init__(message)
        self.last_valid_time = last_valid_time
        self.partial_times = partial_times
        self.partial_states = partial_states


class IndefiniteSystemError(NumericalError):
    """Normal-equations factorization failed; caller should fall back to
    the pseudoinverse path."""


class GridSearchError(NumericalError):
    """Every regularization candidate diverged during validation."""

    def __init__(self, message, failure_times=None):
        super().__init__(message)
        self.failure_times = failure_times or {}
