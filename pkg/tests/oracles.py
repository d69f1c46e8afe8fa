"""Independent reference computations for the tests.

Nothing here calls into the package: the series oracle, the weights and
the dense solves are computed from their definitions with mpmath/numpy.
"""

from __future__ import annotations

import mpmath
import numpy as np

#: frozen reference values (mpmath at 60 digits, see the decisions log)
E_08_15_M04_AT_M06 = 1.3167268286619595190  # E_{0.8,1.5}^{-0.4}(-0.6)
E_MINUS_ONE = 1.718281828459045             # E_{1,2}^{1}(1) = e - 1
RGAMMA_15 = 1.1283791670955126              # 1 / Gamma(1.5)
RGAMMA_16 = 1.119174954070122               # 1 / Gamma(1.6)
RGAMMA_17 = 1.100547405523666               # 1 / Gamma(1.7)


def prabhakar(a, b, g, z, dps: int = 60) -> float:
    """Brute-force partial sum of the Prabhakar series in extended precision."""
    with mpmath.workdps(dps):
        a, b, g, z = (mpmath.mpf(v) for v in (a, b, g, z))
        total = mpmath.mpf(0)
        eps = mpmath.mpf(10) ** (-dps + 5)
        small = 0
        for m in range(5000):
            term = mpmath.rf(g, m) * z**m / (mpmath.gamma(a * m + b) * mpmath.factorial(m))
            total += term
            small = small + 1 if abs(term) <= eps * max(1, abs(total)) else 0
            if m >= 50 and small >= 10:
                return float(total)
    raise RuntimeError("oracle series did not converge")


def antiderivative(alpha, rho, gamma, omega, t, dps: int = 50):
    """t^(1-alpha) E_{rho,2-alpha}^{-gamma}(omega t^rho) as an mpf."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        if t == 0:
            return mpmath.mpf(0)
        z = mpmath.mpf(omega) * t ** mpmath.mpf(rho)
        b = 2 - mpmath.mpf(alpha)
        E = mpmath.nsum(lambda m: mpmath.rf(-mpmath.mpf(gamma), m) * z**m
                        / (mpmath.gamma(mpmath.mpf(rho) * m + b) * mpmath.factorial(m)),
                        [0, mpmath.inf])
        return t ** (1 - mpmath.mpf(alpha)) * E


def cp_weights(alpha, rho, gamma, omega, tau, n_steps, dps: int = 50) -> np.ndarray:
    """Weights a_n by differencing the antiderivative in extended precision."""
    with mpmath.workdps(dps):
        tau = mpmath.mpf(tau)
        scale = tau ** (1 - mpmath.mpf(alpha))
        F = [antiderivative(alpha, rho, gamma, omega, n * tau, dps) for n in range(n_steps + 1)]
        return np.array([float((F[n] - F[n - 1]) / scale) for n in range(1, n_steps + 1)])


def l1_weights(alpha, n_steps, dps: int = 40) -> np.ndarray:
    """Classical Caputo L1 weights (n^(1-a) - (n-1)^(1-a)) / Gamma(2-a)."""
    with mpmath.workdps(dps):
        e = 1 - mpmath.mpf(alpha)
        g = mpmath.gamma(1 + e)
        return np.array([float((mpmath.mpf(n) ** e - mpmath.mpf(n - 1) ** e) / g)
                         for n in range(1, n_steps + 1)])


def dense_solve(lower, diag, upper, rhs) -> np.ndarray:
    A = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    return np.linalg.solve(A, rhs)


def discrete_derivative_loop(u, a, mu) -> float:
    """Discrete CP derivative at the last level, written as the plain sum."""
    k = len(u) - 1
    s = a[0] * u[k] - a[k - 1] * u[0]
    for j in range(1, k):
        s -= (a[k - j - 1] - a[k - j]) * u[j]
    return s / mu
