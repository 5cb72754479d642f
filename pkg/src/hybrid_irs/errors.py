"""Exception hierarchy shared by all modules."""


class HybridIrsError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(HybridIrsError, ValueError):
    """An argument violates a documented precondition."""


class ConfigError(InvalidArgumentError):
    """A scenario file or experiment configuration is malformed."""


class InfeasibleError(HybridIrsError):
    """A solver was handed a problem with an empty feasible set."""


class NumericalError(HybridIrsError):
    """A multiplier system became singular or produced non-finite values."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NonConvergenceError(HybridIrsError):
    """An iterative procedure hit its iteration cap.

    ``partial`` carries whatever the caller accumulated before the failure
    (for the alternating algorithms, the rate trajectory so far).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
