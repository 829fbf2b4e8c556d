"""Exception hierarchy shared by every module."""


class ExtropyError(Exception):
    """Base class for all library errors."""


class ParameterError(ExtropyError, ValueError):
    """A distribution, weight or transform was built with invalid parameters."""


class UndefinedAtPointError(ExtropyError, ValueError):
    """A functional (rate, dynamic measure, estimator) is undefined at the requested point."""


class NotApplicableError(ExtropyError, ValueError):
    """The operation's preconditions do not hold for this input."""


class DivergenceError(ExtropyError, ArithmeticError):
    """An integral or expectation is infinite."""


class AccuracyError(ExtropyError, ArithmeticError):
    """Quadrature failed to reach the requested tolerance.

    The partial estimate and its error bound are kept on the exception.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class InvalidTransformError(ParameterError):
    """A supposedly monotone map failed the construction-time probe."""


class SingularityError(ExtropyError, ValueError):
    """A dynamic failure extropy curve vanishes inside its grid."""


class InconsistentCurveError(ExtropyError, ValueError):
    """A curve implies a negative reversed hazard rate, so no cdf produces it."""


class OrderViolationError(ExtropyError, ValueError):
    """Two laws are not ordered the way an identity requires."""


class DegenerateWeightError(ExtropyError, ValueError):
    """Weights sum to zero over the observations used."""
