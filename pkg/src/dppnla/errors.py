"""Exception types shared across the library."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class DimensionError(ValidationError):
    """Shapes or index sets are inconsistent."""


class EnumerationSizeError(ValidationError):
    """Ground-truth enumeration requested above the desk-scale cap."""


class DegenerateConstraintError(ValidationError):
    """A constrained distribution has no support (e.g. all minors vanish)."""


class GeneralPositionError(ValidationError):
    """A degenerate square subset was met where general position is required."""


class NumericalDegeneracyError(RuntimeError):
    """An internal invariant failed numerically (ill-conditioned sketch, lost mass)."""


class RetryBudgetError(RuntimeError):
    """A rejection/retry loop exhausted its budget."""


class InitializationError(RuntimeError):
    """Could not construct a valid starting state."""
