r"""Three-parameter Mittag-Leffler (Prabhakar) function for real arguments.

.. math::

    E_{a,b}^{g}(z) = \sum_{m=0}^\infty \frac{(g)_m z^m}{\Gamma(a m + b)\, m!}

The series is summed in double precision. When the terms are much larger
than the sum (sign-alternating cancellation for negative ``z``), the same
series is re-summed in extended precision with a private :mod:`mpmath`
context, so the routine stays free of shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath.ctx_mp import MPContext

from cpburgers.errors import ParameterError, SeriesConvergenceError

DEFAULT_TOL = 1.0e-16
MAX_ABS_Z = 20.0
MAX_TERMS = 2000
MIN_TERMS = 8
SMALL_RUN = 3

# NOTE: above this ratio of sum |term| / max(1, |sum|) the double-precision
# sum has lost more than ~3 digits and is redone in extended precision
EXTENDED_RATIO = 2.0**10
PRECISION_LOSS_RATIO = 1.0e12

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class PrabhakarTriplet:
    """Parameters :math:`(a, b, g)` of :math:`E_{a,b}^{g}`."""

    a: float
    b: float
    g: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and self.a > 0):
            raise ParameterError(f"first parameter must satisfy a > 0: a = {self.a}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise ParameterError(f"second parameter must satisfy b > 0: b = {self.b}")
        if not math.isfinite(self.g):
            raise ParameterError(f"third parameter must be finite: g = {self.g}")

    @property
    def polynomial_degree(self) -> int | None:
        """Degree of the series when ``g`` is a non-positive integer."""
        if self.g <= 0 and self.g == int(self.g):
            return int(-self.g)
        return None


@dataclass(frozen=True)
class SeriesResult:
    value: float
    """Sum of the series."""
    terms: int
    """Number of terms summed."""
    max_term: float
    """Largest term magnitude encountered."""
    precision_loss: bool
    """Set when ``max_term > 1e12 |value|``, i.e. a plain double-precision
    sum would have been dominated by cancellation."""
    extended: bool
    """Whether the value was obtained by the extended-precision pass."""


def _scaled_term(mant: float, exp2: int, x: float) -> float:
    # mant * 2**exp2 / gamma(x) without overflowing the numerator
    if x < 170.0:
        return math.ldexp(mant / math.gamma(x), exp2)
    return mant * math.exp(exp2 * _LN2 - math.lgamma(x))


def _check(p: PrabhakarTriplet, z: float, tol: float) -> None:
    if not 0.0 < tol <= 1.0e-3:
        raise ParameterError(f"tolerance must lie in (0, 1e-3]: tol = {tol}")
    if not math.isfinite(z):
        raise ParameterError(f"argument must be finite: z = {z}")
    if abs(z) > MAX_ABS_Z:
        raise SeriesConvergenceError(
            f"|z| = {abs(z):g} is outside the reliable range |z| <= {MAX_ABS_Z:g} "
            "of the series evaluation")


def _sum_double(p: PrabhakarTriplet, z: float, tol: float,
                max_terms: int) -> tuple[float, int, float, float]:
    degree = p.polynomial_degree
    nterms = max_terms if degree is None else min(degree + 1, max_terms)

    terms = []
    # numerator (g)_m z^m / m! kept as mant * 2**exp2
    mant, exp2 = 0.5, 1
    partial = 0.0
    small = 0
    converged = degree is not None
    for m in range(nterms):
        term = _scaled_term(mant, exp2, p.a * m + p.b)
        if not math.isfinite(term):
            raise SeriesConvergenceError(
                f"series term overflowed at m = {m} (a = {p.a}, b = {p.b}, "
                f"g = {p.g}, z = {z})")
        terms.append(term)
        partial += term

        if degree is None:
            if m >= MIN_TERMS and abs(term) < tol * max(1.0, abs(partial)):
                small += 1
                if small >= SMALL_RUN:
                    converged = True
                    break
            else:
                small = 0

        mant, e = math.frexp(mant * ((p.g + m) * z / (m + 1)))
        exp2 += e
        if z == 0.0 or mant == 0.0:
            converged = True
            break

    if not converged:
        raise SeriesConvergenceError(
            f"series did not converge within {max_terms} terms "
            f"(a = {p.a}, b = {p.b}, g = {p.g}, z = {z})")

    abs_terms = [abs(t) for t in terms]
    return math.fsum(terms), len(terms), max(abs_terms), math.fsum(abs_terms)


def _sum_extended(p: PrabhakarTriplet, z: float, tol: float, max_terms: int,
                  dps: int) -> float:
    ctx = MPContext()
    ctx.dps = dps

    a, b, g, zz = ctx.mpf(p.a), ctx.mpf(p.b), ctx.mpf(p.g), ctx.mpf(z)
    degree = p.polynomial_degree
    nterms = max_terms if degree is None else min(degree + 1, max_terms)

    c = ctx.mpf(1)
    total = ctx.mpf(0)
    small = 0
    for m in range(nterms):
        term = c * ctx.rgamma(a * m + b)
        total += term
        if degree is None:
            if m >= MIN_TERMS and abs(term) < tol * max(1, abs(total)):
                small += 1
                if small >= SMALL_RUN:
                    break
            else:
                small = 0
        c *= (g + m) * zz / (m + 1)
    else:
        if degree is None:
            raise SeriesConvergenceError(
                f"series did not converge within {max_terms} terms "
                f"(a = {p.a}, b = {p.b}, g = {p.g}, z = {z})")

    return float(total)


def prabhakar_series(p: PrabhakarTriplet, z: float, tol: float = DEFAULT_TOL, *,
                     max_terms: int = MAX_TERMS) -> SeriesResult:
    """Evaluate :math:`E_{a,b}^{g}(z)` and report how the sum was obtained.

    Truncation happens once three consecutive terms (after the first
    eight) are below ``tol * max(1, |partial sum|)``. For a non-positive
    integer ``g`` the series is a polynomial and is summed exactly.

    :raises ParameterError: for ``tol`` outside ``(0, 1e-3]`` or a
        non-finite ``z``.
    :raises SeriesConvergenceError: for ``|z| > 20``, overflowing terms or
        when ``max_terms`` is exhausted.
    """
    z = float(z)
    _check(p, z, tol)

    value, nterms, max_term, abs_sum = _sum_double(p, z, tol, max_terms)
    extended = False

    if abs_sum / max(1.0, abs(value)) > EXTENDED_RATIO:
        # the error scale is max(1, |sum|) <= 1 only from below, so the digits
        # of sum |term| bound the cancellation
        extended = True
        value = _sum_extended(p, z, tol, max_terms,
                              dps=20 + math.ceil(math.log10(abs_sum)))

    return SeriesResult(
        value=value,
        terms=nterms,
        max_term=max_term,
        precision_loss=max_term > PRECISION_LOSS_RATIO * abs(value),
        extended=extended,
    )


def prabhakar_e(p: PrabhakarTriplet, z: float, tol: float = DEFAULT_TOL) -> float:
    """Value of the Prabhakar function :math:`E_{a,b}^{g}(z)`."""
    return prabhakar_series(p, z, tol).value


def mlf_two_param(a: float, b: float, z: float, tol: float = DEFAULT_TOL) -> float:
    """Two-parameter Mittag-Leffler function :math:`E_{a,b}(z) = E_{a,b}^1(z)`."""
    return prabhakar_e(PrabhakarTriplet(a, b, 1.0), z, tol)
