"""Exception hierarchy shared by all modules."""


class LaguerreScatteringError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LaguerreScatteringError, ValueError):
    """A family parameter is outside its admissible domain."""


class CoefficientPositivityError(LaguerreScatteringError, ValueError):
    """An off-diagonal coefficient a(n) is not strictly positive."""


class DimensionError(LaguerreScatteringError, ValueError):
    pass


class ShapeError(LaguerreScatteringError, ValueError):
    pass


class UnsupportedFamilyError(LaguerreScatteringError, ValueError):
    """The operation needs a closed-form spectral weight the family lacks."""


class DomainError(LaguerreScatteringError, ValueError):
    """A spectral point or packet support lies outside the admissible region."""


class RangeError(LaguerreScatteringError, ValueError):
    pass


class NumericalFailure(LaguerreScatteringError, RuntimeError):
    """An iterative kernel did not meet its accuracy contract."""

    def __init__(self, message, worst_residual=float("nan")):
        super().__init__(f"{message} (worst residual {worst_residual:.3e})")
        self.worst_residual = worst_residual


class DiscretizationError(LaguerreScatteringError, RuntimeError):
    """The discrete measure is too coarse for the requested recurrence length."""


class TruncationError(LaguerreScatteringError, RuntimeError):
    """The finite section is too small for the state it has to carry."""

    def __init__(self, message, suggested_N=None, report=None):
        if suggested_N is not None:
            message = f"{message}; try N >= {suggested_N}"
        super().__init__(message)
        self.suggested_N = suggested_N
        self.report = report


class UndefinedProfileError(LaguerreScatteringError, ValueError):
    pass
