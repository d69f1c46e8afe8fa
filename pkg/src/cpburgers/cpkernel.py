r"""Caputo-Prabhakar derivative: discrete convolution weights and references.

The derivative of order :math:`\alpha \in (0, 1)` is

.. math::

    D^\alpha u(t) = \int_0^t (t - s)^{-\alpha}
        E_{\rho, 1 - \alpha}^{-\gamma}(\omega (t - s)^\rho) u'(s) \,\mathrm{d}s.

Replacing :math:`u'` by forward differences on a uniform grid and integrating
the kernel exactly yields the L1-type weights :math:`a_n` built from the
kernel antiderivative :math:`t^{1 - \alpha} E_{\rho, 2 - \alpha}^{-\gamma}
(\omega t^\rho)`.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from cpburgers.errors import ParameterError, QuadratureError, StabilityPreconditionError
from cpburgers import mlf
from cpburgers.mlf import PrabhakarTriplet, prabhakar_e

DEFAULT_RHO = 0.8
DEFAULT_GAMMA = 0.5
DEFAULT_OMEGA = -0.5


@dataclass(frozen=True)
class CpParams:
    """Order and kernel parameters of the Caputo-Prabhakar derivative."""

    alpha: float
    rho: float = DEFAULT_RHO
    gamma: float = DEFAULT_GAMMA
    omega: float = DEFAULT_OMEGA

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha ∈ (0,1) is required: alpha = {self.alpha}")
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise ParameterError(f"rho > 0 is required: rho = {self.rho}")
        if not math.isfinite(self.gamma):
            raise ParameterError(f"gamma must be finite: gamma = {self.gamma}")
        if not math.isfinite(self.omega):
            raise ParameterError(f"omega must be finite: omega = {self.omega}")

    def ml(self, b: float, t: float) -> float:
        r"""Evaluate :math:`E_{\rho, b}^{-\gamma}(\omega t^\rho)`."""
        return prabhakar_e(PrabhakarTriplet(self.rho, b, -self.gamma),
                           self.omega * t**self.rho)


def kernel_antiderivative(params: CpParams, t: float) -> float:
    r""":math:`t^{1-\alpha} E_{\rho,2-\alpha}^{-\gamma}(\omega t^\rho)`, zero at ``t = 0``."""
    if t == 0.0:
        return 0.0
    return t ** (1.0 - params.alpha) * params.ml(2.0 - params.alpha, t)


@dataclass(frozen=True)
class WeightSequence:
    """Weights :math:`a_1, \\dots, a_N` of the discrete CP derivative.

    ``a[n - 1]`` holds :math:`a_n`; the array is read-only so one instance
    can be shared between nodes, steps and threads.
    """

    tau: float
    mu: float
    a: np.ndarray
    params: CpParams

    @property
    def n_steps(self) -> int:
        return self.a.size

    def differences(self, k: int) -> np.ndarray:
        """Coefficients :math:`a_{k-j} - a_{k-j+1}` for ``j = 1, ..., k - 1``."""
        if not 1 <= k <= self.n_steps:
            raise ParameterError(
                f"step k = {k} outside the weight table 1..{self.n_steps}")
        a = self.a
        # a[k - j - 1] - a[k - j] for j = 1..k-1
        return a[k - 2::-1][: k - 1] - a[k - 1:0:-1][: k - 1]


def _weight(params: CpParams, tau: float, n: int) -> float:
    r"""One weight :math:`a_n` without differencing two nearly equal values.

    Expanding the Prabhakar series of both antiderivative values gives

    .. math::

        a_n = n^{1-\alpha} \sum_m \frac{(-\gamma)_m z_n^m}{\Gamma(\rho m + 2 - \alpha) m!}
              \left[1 - (1 - 1/n)^{1 - \alpha + \rho m}\right],
        \qquad z_n = \omega t_n^\rho,

    where the bracket is evaluated with ``expm1``/``log1p``.
    """
    alpha, rho = params.alpha, params.rho
    b = 2.0 - alpha
    z = params.omega * (n * tau) ** rho
    if n == 1:
        return params.ml(b, tau)

    log_ratio = math.log1p(-1.0 / n)
    terms = []
    partial = 0.0
    c = 1.0
    small = 0
    for m in range(mlf.MAX_TERMS):
        gap = -math.expm1((1.0 - alpha + rho * m) * log_ratio)
        term = c / math.gamma(rho * m + b) * gap if rho * m + b < 170.0 else 0.0
        terms.append(term)
        partial += term
        # the sum is O(1/n), so truncate relative to it rather than to 1
        if m >= mlf.MIN_TERMS and abs(term) <= mlf.DEFAULT_TOL * abs(partial):
            small += 1
            if small >= mlf.SMALL_RUN:
                break
        else:
            small = 0
        c *= (-params.gamma + m) * z / (m + 1)
        if c == 0.0:
            break

    total = math.fsum(terms)
    if math.fsum(abs(t) for t in terms) > mlf.EXTENDED_RATIO * max(abs(total), 1.0e-300):
        # heavy cancellation: difference of two individually accurate values
        return (kernel_antiderivative(params, n * tau)
                - kernel_antiderivative(params, (n - 1) * tau)) / tau ** (1.0 - alpha)
    return n ** (1.0 - alpha) * total


def compute_weights(params: CpParams, tau: float, n_steps: int, *,
                    check: bool = True) -> WeightSequence:
    r"""Build :math:`a_n = n^{1-\alpha}E(\omega t_n^\rho) - (n-1)^{1-\alpha}
    E(\omega t_{n-1}^\rho)` for ``n = 1, ..., n_steps``.

    With ``check=True`` the weights must be positive and strictly
    decreasing, otherwise :class:`StabilityPreconditionError` names the
    first offending index (1-based).
    """
    if not (math.isfinite(tau) and tau > 0.0):
        raise ParameterError(f"time step must be positive: tau = {tau}")
    if n_steps < 1:
        raise ParameterError(f"number of steps must be >= 1: n_steps = {n_steps}")

    a = np.array([_weight(params, tau, n) for n in range(1, n_steps + 1)])
    if check:
        nonpositive = np.flatnonzero(a <= 0.0)
        if nonpositive.size:
            n = int(nonpositive[0]) + 1
            raise StabilityPreconditionError(
                f"weight a_{n} = {a[n - 1]:.6e} is not positive", index=n)
        increasing = np.flatnonzero(np.diff(a) >= 0.0)
        if increasing.size:
            n = int(increasing[0]) + 2
            raise StabilityPreconditionError(
                f"weights are not strictly decreasing at n = {n}: "
                f"a_{n - 1} = {a[n - 2]:.6e}, a_{n} = {a[n - 1]:.6e}", index=n)

    a.flags.writeable = False
    return WeightSequence(tau=tau, mu=tau**params.alpha, a=a, params=params)


def discrete_cp_apply(history: Sequence[float] | np.ndarray, w: WeightSequence):
    """Discrete CP derivative at level ``k`` from values ``u^0, ..., u^k``.

    ``history`` may also hold arrays (levels along the first axis); the
    result then has the shape of one level.
    """
    u = np.asarray(history, dtype=float)
    k = u.shape[0] - 1
    if k < 1:
        raise ParameterError("history must contain at least two levels")
    if k > w.n_steps:
        raise ParameterError(
            f"history reaches level {k} but only {w.n_steps} weights are available")

    c = w.differences(k)
    interior = np.tensordot(c, u[1:k], axes=(0, 0))
    result = (w.a[0] * u[k] - interior - w.a[k - 1] * u[0]) / w.mu
    return float(result) if result.ndim == 0 else result


def cp_derivative_power(nu: float, t: float, params: CpParams) -> float:
    r"""Closed-form CP derivative of :math:`t^\nu`:
    :math:`\Gamma(\nu + 1) t^{\nu - \alpha} E_{\rho, \nu + 1 - \alpha}^{-\gamma}(\omega t^\rho)`.
    """
    if not nu > 0.0:
        raise ParameterError(f"power must satisfy nu > 0: nu = {nu}")
    if t == 0.0:
        return 0.0
    alpha = params.alpha
    return (math.gamma(nu + 1.0) * t ** (nu - alpha)
            * params.ml(nu + 1.0 - alpha, t))


def cp_derivative_quadrature(f_prime: Callable[[float], float], t: float,
                             params: CpParams, tol: float = 1.0e-10) -> float:
    """Evaluate the CP derivative integral numerically.

    The substitution :math:`t - s = v^{1/(1-\\alpha)}` absorbs the weakly
    singular factor :math:`(t - s)^{-\\alpha}` into the measure, leaving a
    bounded integrand that :func:`scipy.integrate.quad` handles adaptively.
    """
    if not 0.0 < tol <= 1.0e-4:
        raise ParameterError(f"tolerance must lie in (0, 1e-4]: tol = {tol}")
    if not t > 0.0:
        raise ParameterError(f"time must be positive: t = {t}")

    alpha = params.alpha
    p = 1.0 / (1.0 - alpha)
    b = 1.0 - alpha

    def integrand(v: float) -> float:
        lag = v**p
        return params.ml(b, lag) * f_prime(t - lag)

    with warnings.catch_warnings():
        # judged below from the error estimate instead
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, error = integrate.quad(integrand, 0.0, t ** (1.0 - alpha),
                                      epsabs=tol, epsrel=tol, limit=200)
    value /= 1.0 - alpha
    error /= 1.0 - alpha
    if not error <= 10.0 * tol * max(1.0, abs(value)):
        raise QuadratureError(
            f"quadrature error estimate {error:.3e} exceeds tolerance {tol:.1e}")
    return value


def energy_gap(u: Sequence[float] | np.ndarray, w: WeightSequence) -> float:
    r"""Slack of the discrete energy inequality for a scalar sequence.

    Returns LHS - RHS of

    .. math::

        \sum_{k=1}^N \Big[a_1 U_k - \sum_{j=1}^{k-1}(a_{k-j} - a_{k-j+1}) U_j
            - a_k U_0\Big] U_k
        \ge \frac{a_N}{2} \sum_{k=1}^N U_k^2 - \frac{F_N}{2} U_0^2,

    with :math:`F_N = \sum_k a_k = N^{1-\alpha}E_{\rho,2-\alpha}^{-\gamma}
    (\omega t_N^\rho)`. A valid weight table gives a non-negative value.
    """
    u = np.asarray(u, dtype=float)
    n = u.size - 1
    if n < 1 or n > w.n_steps:
        raise ParameterError(f"sequence length {u.size} does not fit {w.n_steps} weights")

    a = w.a
    lhs = 0.0
    for k in range(1, n + 1):
        c = w.differences(k)
        lhs += (a[0] * u[k] - c @ u[1:k] - a[k - 1] * u[0]) * u[k]

    total = n ** (1.0 - w.params.alpha) * w.params.ml(2.0 - w.params.alpha, n * w.tau)
    rhs = 0.5 * a[n - 1] * np.sum(u[1:] ** 2) - 0.5 * total * u[0] ** 2
    return float(lhs - rhs)
