"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class ConfigurationError(ValueError):
    """A run or simulation configuration is unusable."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to produce a trustworthy value."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge; carries the partial estimate."""

    def __init__(self, message, estimate=float("nan"), abserr=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class SeriesDivergenceError(NumericalError):
    """A series expansion diverged or lost all significance to cancellation."""


class SingularTermError(NumericalError):
    """A series term sits (almost) on a pole and cannot be evaluated reliably."""


class NoSignChangeError(NumericalError):
    """The stationarity condition has no sign change inside the search bracket.

    ``report`` holds the best boundary point found, so callers can still use
    the supremum.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
