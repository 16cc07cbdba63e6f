class LevyAreaError(Exception):
    """Base class for all errors raised by levy_area."""


class LevyAreaValueError(LevyAreaError, ValueError):
    """An argument has an invalid value."""


class DimensionMismatchError(LevyAreaValueError):
    """Array shapes of related arguments disagree."""


class DegenerateDimensionError(LevyAreaValueError):
    """A conversion is undefined for the given dimension (e.g. m = 1)."""


class DegenerateEigenvalueError(LevyAreaValueError):
    """A Q-Wiener eigenvalue is zero, negative or not finite."""


class BudgetExhaustedError(LevyAreaValueError):
    """The cost budget does not exceed the fixed overhead of an algorithm."""


class EmptyTailError(LevyAreaValueError):
    """No stored Fourier coefficients remain beyond the truncation point."""


class ResourceLimitError(LevyAreaError, MemoryError):
    """A computation would need more scratch memory than allowed."""


class SingularCovarianceError(LevyAreaError, ArithmeticError):
    """A tail covariance matrix cannot be whitened."""


class ConfigurationError(LevyAreaError):
    """A setting from the environment or the command line is malformed."""
