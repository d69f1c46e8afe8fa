"""Tridiagonal linear solves.

The Newton matrices are usually diagonally dominant, so plain elimination
(Thomas algorithm) is used. Rows that are not dominant switch to LAPACK's
partially pivoted band solver.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from cpburgers.errors import ParameterError, SingularSystemError

PIVOT_RTOL = 1.0e-14
DOMINANCE_SLACK = 1.0e-12


def is_diagonally_dominant(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray,
                           slack: float = DOMINANCE_SLACK) -> bool:
    off = np.zeros_like(diag)
    off[1:] += np.abs(lower)
    off[:-1] += np.abs(upper)
    return bool(np.all(np.abs(diag) >= off - slack * np.abs(diag)))


def thomas(lower, diag, upper, rhs) -> np.ndarray:
    """Solve a tridiagonal system by elimination without pivoting.

    ``lower`` and ``upper`` have one entry fewer than ``diag``; ``lower[i]``
    multiplies ``x[i]`` in row ``i + 1``.

    :raises SingularSystemError: when a pivot falls below ``1e-14`` times
        the largest matrix entry.
    """
    n = len(diag)
    scale = max(float(np.max(np.abs(diag))),
                float(np.max(np.abs(lower))) if n > 1 else 0.0,
                float(np.max(np.abs(upper))) if n > 1 else 0.0)
    tiny = PIVOT_RTOL * scale

    # python floats are much faster than numpy scalars in this loop
    lo, di, up, d = (np.asarray(v, dtype=float).tolist()
                     for v in (lower, diag, upper, rhs))
    cp = [0.0] * n
    dp = [0.0] * n

    piv = di[0]
    if abs(piv) <= tiny:
        raise SingularSystemError("zero pivot in row 0 of the tridiagonal system")
    cp[0] = up[0] / piv if n > 1 else 0.0
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = di[i] - lo[i - 1] * cp[i - 1]
        if abs(piv) <= tiny:
            raise SingularSystemError(
                f"zero pivot in row {i} of the tridiagonal system")
        if i < n - 1:
            cp[i] = up[i] / piv
        dp[i] = (d[i] - lo[i - 1] * dp[i - 1]) / piv

    x = dp
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return np.array(x)


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Solve ``T x = rhs`` for the tridiagonal matrix ``T``."""
    diag = np.asarray(diag, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)

    n = diag.size
    if n == 0 or lower.size != n - 1 or upper.size != n - 1 or rhs.shape != (n,):
        raise ParameterError(
            f"inconsistent tridiagonal sizes: lower {lower.shape}, diag {diag.shape}, "
            f"upper {upper.shape}, rhs {rhs.shape}")
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(lower))
            and np.all(np.isfinite(upper)) and np.all(np.isfinite(rhs))):
        raise SingularSystemError("non-finite entries in the tridiagonal system")

    if is_diagonally_dominant(lower, diag, upper):
        return thomas(lower, diag, upper, rhs)

    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    try:
        return solve_banded((1, 1), ab, rhs, check_finite=False)
    except LinAlgError as exc:
        raise SingularSystemError(f"singular tridiagonal system: {exc}") from exc


def to_dense(lower, diag, upper) -> np.ndarray:
    return np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
