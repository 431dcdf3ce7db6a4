"""Exception hierarchy.

Data problems (bad input, too few samples) and numerical problems
(collinearity, vanishing variance) are kept apart so callers such as the
CLI can map them onto distinct exit codes.
"""


class GrangerError(Exception):
    """Base class for every error raised by this package."""


class DataError(GrangerError, ValueError):
    """Input series are malformed or unusable."""


class SampleSizeError(DataError):
    """Not enough samples for the requested lags."""


class AlignmentError(DataError):
    """Residual series or fit window does not line up with the requested lags."""


class NumericalError(GrangerError, ArithmeticError):
    """A fit or statistic cannot be computed reliably."""


class MulticollinearityError(NumericalError):
    """Design matrix is (numerically) rank deficient."""

    def __init__(self, rcond: float, message: str | None = None):
        self.rcond = float(rcond)
        super().__init__(message or f"design matrix is collinear (rcond={self.rcond:.3e})")


class DegenerateError(NumericalError):
    """A variance or residual sum of squares vanished where it must be positive."""


class DomainError(GrangerError, ValueError):
    """Argument outside the domain of a distribution function."""


class StationarityError(GrangerError, ValueError):
    """Simulation coefficients do not define a stationary process."""


class ConfigError(GrangerError, ValueError):
    """Invalid experiment configuration."""


class HarnessError(GrangerError, RuntimeError):
    """Too many Monte Carlo trials failed."""
