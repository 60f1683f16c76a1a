"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter combination is outside the valid range for an operation."""


class RegimeError(ValueError):
    """An operation was called outside the regime where it is defined
    (e.g. asking for a survival probability in the subcritical phase)."""


class AssumptionError(ValueError):
    """A moment or integrability assumption required by the operation fails
    (infinite second moment, divergent exponential tilt, ...)."""
