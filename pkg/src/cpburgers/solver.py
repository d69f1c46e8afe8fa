"""Implicit finite-difference scheme for the time-fractional Burgers equation.

Each time level solves the nonlinear system

    a_1 u^k - mu d2x u^k + mu psi(u^k) = H^k

with Newton-type iterations whose linearisation keeps the diagonal factor
``(u_{i+1} - u_{i-1}) / 2h``, so every iteration is one tridiagonal solve.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from cpburgers.cpkernel import CpParams, WeightSequence, compute_weights, kernel_antiderivative
from cpburgers.discretization import (
    SpaceGrid,
    central_diff,
    history_rhs,
    nonlinear_term,
    norm_h,
    norm_inf,
    second_diff,
)
from cpburgers.errors import NewtonConvergenceError, NumericalError, ParameterError
from cpburgers.tridiagonal import solve_tridiagonal

log = logging.getLogger(__name__)

NOT_CONVERGENT = "It is not convergent within the given number of steps"


@dataclass(frozen=True)
class NewtonSettings:
    max_step: int = 500
    """Maximum number of iterations per time level."""
    it_acc: float = 1.0e-8
    """Stop once the max-norm difference of successive iterates is below this."""

    def __post_init__(self) -> None:
        if int(self.max_step) != self.max_step or self.max_step < 1:
            raise ParameterError(f"maxstep must be an integer >= 1: {self.max_step}")
        if not (math.isfinite(self.it_acc) and self.it_acc > 0.0):
            raise ParameterError(f"itacc must be positive: {self.it_acc}")


@dataclass(frozen=True)
class ProblemSpec:
    """Burgers problem on ``(0, L) x (0, T)`` with zero Dirichlet data.

    ``phi(x)`` and ``f(x, t)`` are evaluated on arrays of interior nodes.
    """

    cp: CpParams
    grid: SpaceGrid
    T: float
    N: int
    phi: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray, float], np.ndarray]

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0.0):
            raise ParameterError(f"final time must be positive: T = {self.T}")
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"number of time steps must be >= 1: N = {self.N}")
        ends = np.asarray(self.phi(np.array([0.0, self.grid.L])), dtype=float)
        if np.any(np.abs(ends) > 1.0e-12):
            raise ParameterError(
                f"initial data must vanish at x = 0 and x = L: phi = {ends.tolist()}")

    @property
    def tau(self) -> float:
        return self.T / self.N

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.tau


@dataclass
class SolveReport:
    levels: np.ndarray
    """Interior solution values, shape ``(N + 1, M - 1)``; row ``k`` is ``u^k``."""
    newton_iterations: np.ndarray
    """Iterations used at each level ``k = 1, ..., N``."""
    wall_time: float
    """Wall-clock seconds spent in :func:`solve`."""
    weights: WeightSequence
    times: np.ndarray = field(repr=False)

    @property
    def total_iterations(self) -> int:
        return int(np.sum(self.newton_iterations))


def newton_step(u_prev_iter: np.ndarray, H_k: np.ndarray, w: WeightSequence,
                grid: SpaceGrid) -> np.ndarray:
    """One linearised iteration ``U^(s) -> U^(s+1)`` at a fixed time level.

    Solves ``[a_1 I - mu/h^2 E_1 + mu/2h diag(E_2 U)] V
    = mu/2h diag(E_2 U) U - mu/6h diag(E_3 U) E_2 U + H``.
    """
    u = np.asarray(u_prev_iter, dtype=float)
    if u.shape != (grid.n_interior,) or np.shape(H_k) != u.shape:
        raise ParameterError(
            f"iterate {u.shape} and right-hand side {np.shape(H_k)} do not match "
            f"{grid.n_interior} interior nodes")
    h, mu = grid.h, w.mu

    e2u = central_diff(u)
    up = np.concatenate(([0.0], u, [0.0]))
    e3u = up[2:] + up[1:-1] + up[:-2]

    diag = w.a[0] + 2.0 * mu / h**2 + (mu / (2.0 * h)) * e2u
    off = np.full(u.size - 1, -mu / h**2)
    rhs = (mu / (2.0 * h)) * e2u * u - (mu / (6.0 * h)) * e3u * e2u + H_k
    return solve_tridiagonal(off, diag, off, rhs)


def residual(u: np.ndarray, H_k: np.ndarray, w: WeightSequence, grid: SpaceGrid) -> np.ndarray:
    """Residual ``a_1 u - mu d2x u + mu psi(u) - H`` of the nonlinear level equation."""
    return (w.a[0] * u - w.mu * second_diff(u, grid)
            + w.mu * nonlinear_term(u, grid) - H_k)


def newton_solve(H_k: np.ndarray, guess: np.ndarray, w: WeightSequence, grid: SpaceGrid,
                 settings: NewtonSettings, *,
                 iterates: list[np.ndarray] | None = None) -> tuple[np.ndarray, int]:
    """Iterate :func:`newton_step` from ``guess`` until successive iterates
    differ by less than ``settings.it_acc`` in the max norm.

    If ``iterates`` is given, every iterate (starting with the guess) is
    appended to it.
    """
    u = np.array(guess, dtype=float)
    if iterates is not None:
        iterates.append(u)
    for s in range(1, settings.max_step + 1):
        new = newton_step(u, H_k, w, grid)
        if not np.all(np.isfinite(new)):
            raise NewtonConvergenceError(
                f"{NOT_CONVERGENT}: iterate {s} is not finite", iterations=s)
        change = norm_inf(new - u)
        u = new
        if iterates is not None:
            iterates.append(u)
        if change < settings.it_acc:
            return u, s

    raise NewtonConvergenceError(
        f"{NOT_CONVERGENT} (maxstep = {settings.max_step}, last change {change:.3e})",
        iterations=settings.max_step)


def advance_step(history: np.ndarray, k: int, w: WeightSequence, grid: SpaceGrid,
                 f_k: np.ndarray, settings: NewtonSettings, *,
                 u0_sign: str = "consistent") -> tuple[np.ndarray, int]:
    """Compute level ``k`` from ``u^0, ..., u^{k-1}``, starting from ``u^{k-1}``.

    Returns the converged level and the number of iterations used.
    """
    H_k = history_rhs(history, w, k, f_k, u0_sign=u0_sign)
    try:
        return newton_solve(H_k, history[k - 1], w, grid, settings)
    except NewtonConvergenceError as exc:
        exc.step = k
        raise


def solve(problem: ProblemSpec, settings: NewtonSettings | None = None, *,
          u0_sign: str = "consistent", check_weights: bool = True) -> SolveReport:
    """Run the scheme on all ``N`` time levels."""
    if settings is None:
        settings = NewtonSettings()

    start = time.perf_counter()
    grid, N = problem.grid, problem.N
    w = compute_weights(problem.cp, problem.tau, N, check=check_weights)
    times = problem.times
    x = grid.x

    levels = np.zeros((N + 1, grid.n_interior))
    levels[0] = problem.phi(x)
    iterations = np.zeros(N, dtype=int)
    for k in range(1, N + 1):
        f_k = np.asarray(problem.f(x, times[k]), dtype=float)
        try:
            levels[k], iterations[k - 1] = advance_step(
                levels, k, w, grid, f_k, settings, u0_sign=u0_sign)
        except NumericalError as exc:
            log.error("time step %d of %d failed: %s", k, N, exc)
            if getattr(exc, "step", None) is None:
                exc.step = k
            exc.args = (f"time step k = {k}: {exc.args[0]}", *exc.args[1:])
            raise

    elapsed = time.perf_counter() - start
    log.debug("solved M = %d, N = %d in %.3fs with %d iterations",
              grid.M, N, elapsed, int(iterations.sum()))
    return SolveReport(levels=levels, newton_iterations=iterations,
                       wall_time=elapsed, weights=w, times=times)


def stability_bound(problem: ProblemSpec, weights: WeightSequence) -> float:
    r"""Upper bound on :math:`\sum_{k=1}^N \|u^k\|_\infty^2` from the energy estimate.

    .. math::

        \frac{L F_N}{8 \mu} \|u^0\|_h^2
        + \frac{\mu L}{8 a_N} \sum_{k=1}^N \|f^k\|_h^2,
        \qquad F_N = N^{1-\alpha} E_{\rho,2-\alpha}^{-\gamma}(\omega t_N^\rho).
    """
    grid, N = problem.grid, problem.N
    x = grid.x
    times = problem.times
    mu = weights.mu
    F_N = kernel_antiderivative(problem.cp, problem.T) / problem.tau ** (1.0 - problem.cp.alpha)

    forcing = sum(norm_h(np.asarray(problem.f(x, times[k]), dtype=float), grid) ** 2
                  for k in range(1, N + 1))
    initial = norm_h(np.asarray(problem.phi(x), dtype=float), grid) ** 2
    return (grid.L * F_N / (8.0 * mu) * initial
            + mu * grid.L / (8.0 * weights.a[N - 1]) * forcing)
