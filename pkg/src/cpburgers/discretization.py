"""Uniform grid, difference operators and the history right-hand side.

Grid functions are stored as their interior values ``w_1, ..., w_{M-1}``;
the homogeneous Dirichlet values ``w_0 = w_M = 0`` are never stored.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cpburgers.cpkernel import WeightSequence
from cpburgers.errors import ParameterError

#: sign conventions for the initial-level term of the history right-hand side
U0_SIGNS = ("consistent", "literal")


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform grid :math:`x_i = i h`, ``i = 0, ..., M`` on ``[0, L]``."""

    M: int
    L: float = 1.0

    def __post_init__(self) -> None:
        if int(self.M) != self.M or self.M < 3:
            raise ParameterError(f"number of cells must be an integer >= 3: M = {self.M}")
        if not (math.isfinite(self.L) and self.L > 0.0):
            raise ParameterError(f"domain length must be positive: L = {self.L}")

    @property
    def h(self) -> float:
        return self.L / self.M

    @property
    def n_interior(self) -> int:
        return self.M - 1

    @cached_property
    def x(self) -> np.ndarray:
        """Interior nodes :math:`x_1, \\dots, x_{M-1}`."""
        x = np.arange(1, self.M) * self.h
        x.flags.writeable = False
        return x


def _check(w: np.ndarray, n: int | None = None) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or (n is not None and w.size != n):
        expected = "a 1D vector" if n is None else f"{n} interior values"
        raise ParameterError(f"expected {expected}, got shape {w.shape}")
    return w


def _pad(w: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], w, [0.0]))


def second_diff(w: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    """Central second difference :math:`(w_{i+1} - 2 w_i + w_{i-1}) / h^2`."""
    w = _check(w, grid.n_interior)
    wp = _pad(w)
    return (wp[2:] - 2.0 * wp[1:-1] + wp[:-2]) / grid.h**2


def central_diff(w: np.ndarray) -> np.ndarray:
    """Undivided central difference :math:`\\Delta w_i = w_{i+1} - w_{i-1}`."""
    w = _check(w)
    wp = _pad(w)
    return wp[2:] - wp[:-2]


def backward_diff(w: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    """:math:`\\delta_x w_i = (w_i - w_{i-1}) / h` for ``i = 1, ..., M``.

    The result lives on the ``M`` cell midpoints, one more entry than an
    interior vector.
    """
    w = _check(w, grid.n_interior)
    return np.diff(_pad(w)) / grid.h


def nonlinear_term(w: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    r"""Discrete convection :math:`\psi(w)_i = (w_i \Delta w_i + \Delta(w^2)_i) / 6h`.

    Equal to :math:`\frac{w_{i+1} + w_i + w_{i-1}}{3} \frac{w_{i+1} - w_{i-1}}{2h}`
    and skew-symmetric: :math:`\langle \psi(w), w \rangle_h = 0`.
    """
    w = _check(w, grid.n_interior)
    return (w * central_diff(w) + central_diff(w * w)) / (6.0 * grid.h)


def inner_product_h(v: np.ndarray, w: np.ndarray, grid: SpaceGrid) -> float:
    """Discrete inner product :math:`h \\sum_i v_i w_i`.

    Accepts interior vectors (``M - 1`` entries) or midpoint vectors from
    :func:`backward_diff` (``M`` entries).
    """
    v = _check(v)
    w = _check(w)
    if v.size != w.size or v.size not in (grid.M - 1, grid.M):
        raise ParameterError(
            f"vectors of sizes {v.size} and {w.size} do not match a grid with M = {grid.M}")
    return float(grid.h * (v @ w))


def norm_h(w: np.ndarray, grid: SpaceGrid) -> float:
    return math.sqrt(inner_product_h(w, w, grid))


def norm_inf(w: np.ndarray) -> float:
    w = _check(w)
    return float(np.max(np.abs(w))) if w.size else 0.0


def history_rhs(levels: Sequence[np.ndarray] | np.ndarray, w: WeightSequence, k: int,
                f_k: np.ndarray, *, u0_sign: str = "consistent") -> np.ndarray:
    r"""Right-hand side :math:`H^k` of the implicit step at level ``k``.

    .. math::

        H^k = \mu f^k + \sum_{j=1}^{k-1} (a_{k-j} - a_{k-j+1}) u^j \pm a_k u^0.

    ``u0_sign="consistent"`` uses ``+ a_k u^0``, which is what moving the
    initial-level term of the discrete derivative to the right-hand side
    gives; ``"literal"`` uses ``- a_k u^0``.

    ``levels`` holds at least ``u^0, ..., u^{k-1}`` (extra rows are ignored).
    """
    if u0_sign not in U0_SIGNS:
        raise ParameterError(f"u0_sign must be one of {U0_SIGNS}: {u0_sign!r}")

    u = np.asarray(levels, dtype=float)
    if u.ndim != 2 or u.shape[0] < k:
        raise ParameterError(
            f"history for step k = {k} needs levels 0..{k - 1}, got shape {u.shape}")
    f_k = _check(f_k, u.shape[1])

    c = w.differences(k)
    sign = 1.0 if u0_sign == "consistent" else -1.0
    return w.mu * f_k + c @ u[1:k] + sign * w.a[k - 1] * u[0]
