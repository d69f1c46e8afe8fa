"""Manufactured solutions and the error/order bookkeeping of refinement studies.

All problems here are separable, ``u(x, t) = (c + t**nu) g(x)``, so the CP
derivative in time has a closed form and the spatial derivatives are
supplied analytically.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from cpburgers.cpkernel import CpParams, cp_derivative_power
from cpburgers.errors import ParameterError

SpaceTimeFunction = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class ManufacturedProblem:
    label: str
    exact: SpaceTimeFunction
    source: SpaceTimeFunction
    phi: Callable[[np.ndarray], np.ndarray]
    exact_dx: SpaceTimeFunction
    exact_dxx: SpaceTimeFunction
    exact_dt: SpaceTimeFunction
    """Classical time derivative, the integrand of the CP derivative."""
    cp_dt: SpaceTimeFunction
    """Closed-form CP derivative of ``exact`` in time."""
    L: float = 1.0
    T: float = 1.0


@dataclass(frozen=True)
class SpaceProfile:
    """Spatial factor ``g`` with its first two derivatives."""

    name: str
    g: Callable[[np.ndarray], np.ndarray]
    dg: Callable[[np.ndarray], np.ndarray]
    d2g: Callable[[np.ndarray], np.ndarray]


def space_profile(name: str, L: float = 1.0) -> SpaceProfile:
    """Boundary-compatible spatial factors by name.

    ``sin``: sin(pi x/L), ``sin2``: sin(2 pi x/L), ``quad``: x (x - L),
    ``cubic``: x^2 (L - x).
    """
    k = math.pi / L
    profiles = {
        "sin": (lambda x: np.sin(k * x),
                lambda x: k * np.cos(k * x),
                lambda x: -k**2 * np.sin(k * x)),
        "sin2": (lambda x: np.sin(2 * k * x),
                 lambda x: 2 * k * np.cos(2 * k * x),
                 lambda x: -4 * k**2 * np.sin(2 * k * x)),
        "quad": (lambda x: x * (x - L),
                 lambda x: 2 * x - L,
                 lambda x: np.full_like(np.asarray(x, dtype=float), 2.0)),
        "cubic": (lambda x: x**2 * (L - x),
                  lambda x: 2 * L * x - 3 * x**2,
                  lambda x: 2 * L - 6 * x),
    }
    try:
        g, dg, d2g = profiles[name]
    except KeyError:
        raise ParameterError(
            f"unknown spatial profile {name!r}; choose from {sorted(profiles)}") from None
    return SpaceProfile(name, g, dg, d2g)


def build_power_separable(nu: float, g, dg, d2g, cp: CpParams, *,
                          offset: float = 0.0, label: str | None = None,
                          L: float = 1.0, T: float = 1.0) -> ManufacturedProblem:
    r"""Problem with exact solution :math:`(c + t^\nu) g(x)`.

    The source is :math:`D^\alpha(t^\nu) g + (c + t^\nu)^2 g g' - (c + t^\nu) g''`.
    A non-zero ``offset`` :math:`c` gives non-zero initial data ``c g``.
    """
    if not nu > 0.0:
        raise ParameterError(f"power must satisfy nu > 0: nu = {nu}")

    def amp(t: float) -> float:
        return offset + t**nu

    def exact(x, t):
        return amp(t) * g(x)

    def exact_dx(x, t):
        return amp(t) * dg(x)

    def exact_dxx(x, t):
        return amp(t) * d2g(x)

    def exact_dt(x, t):
        return nu * t ** (nu - 1.0) * g(x)

    def cp_dt(x, t):
        return cp_derivative_power(nu, t, cp) * g(x)

    def source(x, t):
        a = amp(t)
        return cp_dt(x, t) + a * a * g(x) * dg(x) - a * d2g(x)

    def phi(x):
        return offset * g(x)

    if label is None:
        label = f"power:{nu:g}"
    return ManufacturedProblem(label=label, exact=exact, source=source, phi=phi,
                               exact_dx=exact_dx, exact_dxx=exact_dxx,
                               exact_dt=exact_dt, cp_dt=cp_dt, L=L, T=T)


def example1(cp: CpParams) -> ManufacturedProblem:
    """``u = t^2 sin(pi x)`` on ``(0,1) x (0,1)`` with the source written out."""
    pi = math.pi
    alpha = cp.alpha
    base = build_power_separable(2.0, *_unpack(space_profile("sin")), cp, label="example1")

    def source(x, t):
        return (2.0 * np.sin(pi * x) * t ** (2.0 - alpha) * cp.ml(3.0 - alpha, t)
                + pi / 2.0 * t**4 * np.sin(2.0 * pi * x)
                + pi**2 * t**2 * np.sin(pi * x))

    return _replace_source(base, source)


def example2(cp: CpParams) -> ManufacturedProblem:
    """``u = t^5 x (x - 1)`` on ``(0,1) x (0,1)`` with the source written out."""
    alpha = cp.alpha
    base = build_power_separable(5.0, *_unpack(space_profile("quad")), cp, label="example2")

    def source(x, t):
        return (120.0 * x * (x - 1.0) * t ** (5.0 - alpha) * cp.ml(6.0 - alpha, t)
                + x * (x - 1.0) * (2.0 * x - 1.0) * t**10
                - 2.0 * t**5)

    return _replace_source(base, source)


def _unpack(p: SpaceProfile):
    return p.g, p.dg, p.d2g


def _replace_source(p: ManufacturedProblem, source) -> ManufacturedProblem:
    fields = dict(p.__dict__)
    fields["source"] = source
    return ManufacturedProblem(**fields)


def problem_from_label(label: str, cp: CpParams, L: float = 1.0,
                       T: float = 1.0) -> ManufacturedProblem:
    """Look up ``example1``, ``example2`` or ``power:<nu>:<profile>[:<offset>]``."""
    if label in ("example1", "example2"):
        if L != 1.0 or T != 1.0:
            raise ParameterError(f"{label} is posed on (0,1) x (0,1): got L = {L}, T = {T}")
        return example1(cp) if label == "example1" else example2(cp)

    parts = label.split(":")
    if parts[0] == "power" and len(parts) in (3, 4):
        try:
            nu = float(parts[1])
            offset = float(parts[3]) if len(parts) == 4 else 0.0
        except ValueError:
            raise ParameterError(f"malformed problem label {label!r}") from None
        prof = space_profile(parts[2], L)
        return build_power_separable(nu, prof.g, prof.dg, prof.d2g, cp, offset=offset,
                                     label=label, L=L, T=T)

    raise ParameterError(
        f"unknown problem {label!r}; expected 'example1', 'example2' or "
        "'power:<nu>:<profile>[:<offset>]'")


# {{{ errors and orders

def max_error(report, problem: ManufacturedProblem, grid,
              times: np.ndarray | None = None) -> float:
    """Maximum nodal error over interior nodes and time levels ``1..N``.

    ``report`` is a :class:`~cpburgers.solver.SolveReport` or the bare
    ``(N + 1, M - 1)`` array of levels (then ``times`` is required).
    """
    levels = np.asarray(getattr(report, "levels", report), dtype=float)
    if times is None:
        times = report.times
    x = grid.x
    if levels.ndim != 2 or levels.shape[0] < 2:
        raise ParameterError("max_error needs at least one computed time level")
    if levels.shape != (len(times), x.size):
        raise ParameterError(
            f"levels {levels.shape} do not match {len(times)} times x {x.size} nodes")
    return max(float(np.max(np.abs(problem.exact(x, t) - levels[k])))
               for k, t in enumerate(times) if k > 0)


def observed_orders(errors: Sequence[float]) -> list[float | None]:
    """``[None, log2(e0/e1), log2(e1/e2), ...]`` for dyadic refinements."""
    return [None] + [math.log2(errors[j] / errors[j + 1]) for j in range(len(errors) - 1)]


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    xi: float
    theta: float | None
    time_ms: float
    iterations: int


@dataclass
class ConvergenceReport:
    axis: str
    alpha: float
    rows: list[ConvergenceRow] = field(default_factory=list)
    failure: str | None = None

    @classmethod
    def from_runs(cls, axis: str, alpha: float, levels: Sequence[int],
                  errors: Sequence[float], times_ms: Sequence[float],
                  iterations: Sequence[int]) -> ConvergenceReport:
        thetas = observed_orders(errors)
        rows = [ConvergenceRow(int(lv), float(e), th, float(tm), int(it))
                for lv, e, th, tm, it in zip(levels, errors, thetas, times_ms, iterations)]
        return cls(axis=axis, alpha=alpha, rows=rows)

    @property
    def xi(self) -> list[float]:
        return [r.xi for r in self.rows]

    @property
    def theta(self) -> list[float | None]:
        return [r.theta for r in self.rows]

# }}}
