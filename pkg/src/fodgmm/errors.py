"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Raised when array dimensions violate a precondition (e.g. T < 2)."""


class SingularWeightMatrixError(ArithmeticError):
    """Raised when a weighting matrix cannot be inverted.

    ``dimension`` is the order of the offending matrix. For the
    orthogonal-deviations pipeline, ``period`` identifies which per-period
    instrument gram matrix failed; it is ``None`` for the first-difference
    pipeline, whose weighting matrix is the single full-size one.
    """

    def __init__(self, message: str, *, dimension: int, period: int | None = None):
        super().__init__(message)
        self.dimension = dimension
        self.period = period


class DegenerateEstimateError(ArithmeticError):
    """Raised when the estimator denominator is numerically zero."""


class PanelFormatError(ValueError):
    """Raised when a panel CSV file cannot be parsed; names the bad line."""

    def __init__(self, message: str, *, line: int | None = None):
        super().__init__(message)
        self.line = line
