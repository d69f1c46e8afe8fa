"""Executable property suites behind ``cpburgers verify``.

Every suite is a function ``suite(rng, hooks) -> str`` that raises
``AssertionError`` on failure and returns a short summary otherwise.
``hooks`` lets mutation checks swap in tampered operators.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import dataclass

import mpmath
import numpy as np

from cpburgers import cpkernel, discretization as disc, manufactured, mlf, solver
from cpburgers.errors import StabilityPreconditionError
from cpburgers.tridiagonal import solve_tridiagonal, to_dense

Suite = Callable[[np.random.Generator, dict], str]
SUITES: dict[str, Suite] = {}

ALPHAS = (0.2, 0.4, 0.6, 0.8)
#: kernel parameter for which the weights are known to lose positivity
EXTREME_OMEGA = 5.0


def suite(name: str):
    def register(func: Suite) -> Suite:
        SUITES[name] = func
        return func
    return register


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    seconds: float
    detail: str


def run_suites(names=None, *, hooks: dict | None = None, seed: int = 20241017) -> list[SuiteResult]:
    hooks = hooks or {}
    results = []
    for name in names or list(SUITES):
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            detail = SUITES[name](rng, hooks)
            passed = True
        except AssertionError as exc:
            detail = str(exc) or "assertion failed"
            passed = False
        results.append(SuiteResult(name, passed, time.perf_counter() - start, detail))
    return results


def series_oracle(a: float, b: float, g: float, z: float, dps: int = 80) -> float:
    """Brute-force partial sum in extended precision (at least 200 terms)."""
    with mpmath.workdps(dps):
        a, b, g, z = (mpmath.mpf(v) for v in (a, b, g, z))
        total = mpmath.mpf(0)
        small = 0
        m = 0
        while True:
            term = mpmath.rf(g, m) * z**m / (mpmath.gamma(a * m + b) * mpmath.factorial(m))
            total += term
            small = small + 1 if abs(term) < mpmath.mpf(10) ** (-(dps - 5)) * max(1, abs(total)) else 0
            m += 1
            if m >= 200 and small >= 10:
                return float(total)


def l1_weights(alpha: float, n: int, dps: int = 40) -> np.ndarray:
    """Classical L1 weights in extended precision (no cancellation)."""
    with mpmath.workdps(dps):
        e = 1 - mpmath.mpf(alpha)
        g = mpmath.gamma(1 + e)
        return np.array([float((mpmath.mpf(k) ** e - mpmath.mpf(k - 1) ** e) / g)
                         for k in range(1, n + 1)])


def observed_order(errors) -> float:
    return math.log2(errors[-2] / errors[-1])


def random_interior(rng: np.random.Generator, M: int) -> np.ndarray:
    return rng.standard_normal(M - 1)


# {{{ mlf

@suite("mlf-reductions")
def _mlf_reductions(rng, hooks) -> str:
    exp_p = mlf.PrabhakarTriplet(1.0, 1.0, 1.0)
    for z in range(-5, 6):
        err = abs(mlf.prabhakar_e(exp_p, z) - math.exp(z))
        assert err <= 1.0e-12 * math.exp(abs(z)), f"exp reduction off by {err:.2e} at z = {z}"

    for _ in range(20):
        b = rng.uniform(0.5, 2.0)
        p = mlf.PrabhakarTriplet(rng.uniform(0.3, 1.5), b, 0.0)
        value = mlf.prabhakar_e(p, rng.uniform(-20, 20))
        assert abs(value * math.gamma(b) - 1.0) <= 1.0e-13, "g = 0 reduction failed"

    for n in (1, 2, 3):
        a, b, z = 0.7, 1.3, -1.7
        poly = sum(math.prod(-n + i for i in range(m)) * z**m
                   / (math.gamma(a * m + b) * math.factorial(m)) for m in range(n + 1))
        res = mlf.prabhakar_series(mlf.PrabhakarTriplet(a, b, -n), z)
        assert res.terms == n + 1, f"g = -{n} should give {n + 1} terms, got {res.terms}"
        assert abs(res.value - poly) <= 1.0e-14 * max(1.0, abs(poly)), "polynomial case"

    p = mlf.PrabhakarTriplet(0.8, 1.5, -0.4)
    tol = 1.0e-4
    prev = mlf.prabhakar_e(p, -0.6, tol)
    while tol > 1.0e-15:
        cur = mlf.prabhakar_e(p, -0.6, tol / 2)
        assert abs(cur - prev) <= tol, f"refinement changed the value by more than {tol:g}"
        prev, tol = cur, tol / 2
    return "exp, g = 0, polynomial and refinement checks passed"


@suite("mlf-oracle")
def _mlf_oracle(rng, hooks) -> str:
    worst = 0.0
    for _ in range(12):
        a, b = rng.uniform(0.3, 1.5), rng.uniform(0.5, 2.0)
        g, z = rng.uniform(-3.0, 3.0), rng.uniform(-4.0, 4.0)
        ref = series_oracle(a, b, g, z)
        err = abs(mlf.prabhakar_e(mlf.PrabhakarTriplet(a, b, g), z) - ref) / max(1.0, abs(ref))
        worst = max(worst, err)
    assert worst <= 1.0e-12, f"disagreement with extended-precision oracle: {worst:.2e}"
    return f"max scaled error {worst:.2e}"

# }}}


# {{{ cpkernel

@suite("weights")
def _weights(rng, hooks) -> str:
    for alpha in ALPHAS:
        n = 2**10
        classical = cpkernel.compute_weights(cpkernel.CpParams(alpha, omega=0.0), 1 / n, n)
        l1 = l1_weights(alpha, n)
        rel = np.max(np.abs(classical.a - l1) / l1)
        assert rel <= 1.0e-12, f"omega = 0 weights differ from L1 weights by {rel:.2e}"

        p = cpkernel.CpParams(alpha)
        w = cpkernel.compute_weights(p, 1 / n, n)
        assert np.all(w.a > 0) and np.all(np.diff(w.a) < 0), "weights not decreasing"
        total = n ** (1 - alpha) * p.ml(2 - alpha, 1.0)
        assert abs(w.a.sum() - total) <= 1.0e-12 * abs(total), "telescoping sum"
    return "L1 degeneracy, monotonicity and telescoping hold"


@suite("weights-precondition")
def _weights_precondition(rng, hooks) -> str:
    omega = hooks.get("omega", EXTREME_OMEGA)
    try:
        cpkernel.compute_weights(cpkernel.CpParams(0.5, omega=omega), 1 / 64, 64)
    except StabilityPreconditionError as exc:
        return f"expected failure reported at n = {exc.index}"
    raise AssertionError(f"omega = {omega} did not trigger the stability precondition")


@suite("discrete-derivative")
def _discrete_derivative(rng, hooks) -> str:
    p = cpkernel.CpParams(0.5)
    w = cpkernel.compute_weights(p, 1 / 32, 32)
    c = rng.uniform(-10, 10)
    val = cpkernel.discrete_cp_apply(np.full(33, c), w)
    assert abs(val) <= 1.0e-13 * abs(c) / w.mu * 32, "constants are not annihilated"

    for alpha in ALPHAS:
        p = cpkernel.CpParams(alpha)
        errors = []
        for n in (32, 64, 128):
            w = cpkernel.compute_weights(p, 1 / n, n)
            t = np.arange(n + 1) / n
            err = max(abs(cpkernel.discrete_cp_apply(t[: k + 1] ** 3, w)
                          - cpkernel.cp_derivative_power(3, t[k], p)) for k in range(1, n + 1))
            errors.append(err)
        order = observed_order(errors)
        assert order >= 2 - alpha - 0.1, f"alpha = {alpha}: order {order:.3f}"
    return "constant annihilation and (2 - alpha) order hold"


@suite("power-rule")
def _power_rule(rng, hooks) -> str:
    worst = 0.0
    for nu in (1.0, 2.0, 5.0):
        for alpha in ALPHAS:
            p = cpkernel.CpParams(alpha)
            ref = cpkernel.cp_derivative_power(nu, 0.5, p)
            val = cpkernel.cp_derivative_quadrature(lambda s: nu * s ** (nu - 1), 0.5, p)
            worst = max(worst, abs(val - ref) / abs(ref))
    assert worst <= 1.0e-6, f"quadrature and power rule differ by {worst:.2e}"
    return f"max relative difference {worst:.2e}"


@suite("energy-inequality")
def _energy_inequality(rng, hooks) -> str:
    worst = math.inf
    for alpha in ALPHAS:
        for n in (4, 16, 64):
            w = cpkernel.compute_weights(cpkernel.CpParams(alpha), 1 / n, n)
            for _ in range(10):
                worst = min(worst, cpkernel.energy_gap(rng.standard_normal(n + 1), w))
    assert worst >= -1.0e-10, f"negative slack {worst:.3e}"
    return f"minimum slack {worst:.3e}"

# }}}


# {{{ discretization

@suite("skew-symmetry")
def _skew(rng, hooks) -> str:
    delta = hooks.get("delta", disc.central_diff)
    for M in (8, 64, 512):
        grid = disc.SpaceGrid(M)
        for _ in range(10):
            w = random_interior(rng, M)
            val = disc.inner_product_h(w * delta(w) + delta(w * w), w, grid)
            scale = disc.norm_h(w, grid) ** 3
            assert abs(val) <= 1.0e-12 * scale, f"M = {M}: <w Dw + D(w^2), w> = {val:.3e}"
    return "skew-symmetry of the convection term holds"


@suite("summation-by-parts")
def _sbp(rng, hooks) -> str:
    for M in (8, 64, 512):
        grid = disc.SpaceGrid(M, L=rng.uniform(0.5, 2.0))
        for _ in range(10):
            w1, w2 = random_interior(rng, M), random_interior(rng, M)
            lhs = disc.inner_product_h(disc.second_diff(w1, grid), w2, grid)
            rhs = disc.inner_product_h(disc.backward_diff(w1, grid),
                                       disc.backward_diff(w2, grid), grid)
            scale = (disc.norm_h(disc.backward_diff(w1, grid), grid)
                     * disc.norm_h(disc.backward_diff(w2, grid), grid))
            assert abs(lhs + rhs) <= 1.0e-12 * scale, f"M = {M}: SBP residual {lhs + rhs:.3e}"

            bound = math.sqrt(grid.L) / 2 * disc.norm_h(disc.backward_diff(w1, grid), grid)
            assert disc.norm_inf(w1) <= bound * (1 + 1.0e-12), "discrete Sobolev inequality"
    return "summation by parts and the discrete Sobolev inequality hold"


@suite("spatial-consistency")
def _spatial_consistency(rng, hooks) -> str:
    e2, e1 = [], []
    for M in (32, 64, 128, 256):
        grid = disc.SpaceGrid(M)
        u = np.sin(np.pi * grid.x)
        e2.append(np.max(np.abs(disc.second_diff(u, grid) + np.pi**2 * u)))
        e1.append(np.max(np.abs(disc.nonlinear_term(u, grid) - u * np.pi * np.cos(np.pi * grid.x))))
    o2, o1 = observed_order(e2), observed_order(e1)
    assert abs(o2 - 2) <= 0.05, f"second difference order {o2:.3f}"
    assert abs(o1 - 2) <= 0.1, f"convection term order {o1:.3f}"
    return f"orders {o2:.3f} (second difference), {o1:.3f} (convection)"

# }}}


# {{{ solver

@suite("tridiagonal")
def _tridiagonal(rng, hooks) -> str:
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 65))
        lower, upper = rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n - 1)
        diag = (np.abs(np.concatenate((lower, [0]))) + np.abs(np.concatenate(([0], upper)))
                + rng.uniform(0.1, 2)) * rng.choice([-1, 1], n)
        rhs = rng.standard_normal(n)
        x = solve_tridiagonal(lower, diag, upper, rhs)
        ref = np.linalg.solve(to_dense(lower, diag, upper), rhs)
        worst = max(worst, np.max(np.abs(x - ref)) / np.max(np.abs(ref)))
    assert worst <= 1.0e-11, f"tridiagonal solve differs from dense solve by {worst:.2e}"
    return f"max relative difference {worst:.2e}"


@suite("zero-data")
def _zero_data(rng, hooks) -> str:
    for alpha in ALPHAS:
        problem = solver.ProblemSpec(cpkernel.CpParams(alpha), disc.SpaceGrid(16), 1.0, 16,
                                     phi=np.zeros_like, f=lambda x, t: np.zeros_like(x))
        report = solver.solve(problem)
        assert not np.any(report.levels), f"alpha = {alpha}: zero data gave a non-zero solution"
    return "zero data stays exactly zero"


@suite("newton-residual")
def _newton_residual(rng, hooks) -> str:
    settings = solver.NewtonSettings(it_acc=1.0e-8)
    for label in ("example1", "example2"):
        cp = cpkernel.CpParams(0.4)
        prob = manufactured.problem_from_label(label, cp)
        spec = solver.ProblemSpec(cp, disc.SpaceGrid(64), 1.0, 16, prob.phi, prob.source)
        report = solver.solve(spec, settings)
        w = report.weights
        for k in range(1, spec.N + 1):
            f_k = prob.source(spec.grid.x, report.times[k])
            H = disc.history_rhs(report.levels, w, k, f_k)
            r = disc.norm_inf(solver.residual(report.levels[k], H, w, spec.grid))
            assert r <= 10 * settings.it_acc * w.a[0], f"{label}, k = {k}: residual {r:.2e}"
    return "converged levels satisfy the nonlinear equations"


@suite("stability-bound")
def _stability_bound(rng, hooks) -> str:
    for label in ("example1", "example2"):
        for alpha in ALPHAS:
            cp = cpkernel.CpParams(alpha)
            prob = manufactured.problem_from_label(label, cp)
            spec = solver.ProblemSpec(cp, disc.SpaceGrid(32), 1.0, 16, prob.phi, prob.source)
            report = solver.solve(spec)
            lhs = sum(disc.norm_inf(u) ** 2 for u in report.levels[1:])
            rhs = solver.stability_bound(spec, report.weights)
            assert lhs <= rhs, f"{label}, alpha = {alpha}: {lhs:.4e} > {rhs:.4e}"
    return "energy bound holds on both examples"

# }}}


# {{{ manufactured

@suite("source-consistency")
def _source_consistency(rng, hooks) -> str:
    cp = cpkernel.CpParams(0.4)
    problems = [manufactured.example1(cp), manufactured.example2(cp),
                manufactured.problem_from_label("power:3:cubic", cp)]
    for prob in problems:
        for _ in range(10):
            x, t = rng.uniform(0, 1, 1), rng.uniform(0.05, 1)
            u = prob.exact(x, t)
            base = u * prob.exact_dx(x, t) - prob.exact_dxx(x, t) - prob.source(x, t)
            r1 = abs(prob.cp_dt(x, t) + base)[0]
            quad = cpkernel.cp_derivative_quadrature(lambda s: prob.exact_dt(x, s)[0], t, cp)
            r2 = abs(quad + base)[0]
            assert r1 <= 1.0e-9, f"{prob.label}: closed-form residual {r1:.2e}"
            assert r2 <= 1.0e-9, f"{prob.label}: quadrature residual {r2:.2e}"
    return "sources match both CP derivative routes"

# }}}
