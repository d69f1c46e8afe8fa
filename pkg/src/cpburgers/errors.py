"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CPBurgersError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CPBurgersError, ValueError):
    """A parameter lies outside its admissible domain."""


class NumericalError(CPBurgersError, ArithmeticError):
    """Base class for numerical failures (exit status 2 in the CLI)."""


class SeriesConvergenceError(NumericalError):
    """The Prabhakar series did not converge within the term budget."""


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class StabilityPreconditionError(NumericalError):
    """The convolution weights are not positive and strictly decreasing."""

    def __init__(self, message: str, index: int) -> None:
        super().__init__(message)
        self.index = index


class SingularSystemError(NumericalError):
    """A tridiagonal elimination met a (numerically) zero pivot."""


class NewtonConvergenceError(NumericalError):
    """Newton iteration did not converge within the iteration cap."""

    def __init__(self, message: str, step: int | None = None,
                 iterations: int | None = None) -> None:
        super().__init__(message)
        self.step = step
        self.iterations = iterations
