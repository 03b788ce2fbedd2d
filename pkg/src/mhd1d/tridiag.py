"""Direct solvers for tridiagonal linear systems.

The fast path wraps LAPACK's banded solver; a pure-Python Thomas
(forward elimination / back substitution) implementation is kept as an
independent cross-check.  The backward-Euler diffusion systems produced by
the time stepper are strictly diagonally dominant, for which both routes
are unconditionally stable.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

__all__ = ["TridiagonalError", "solve_tridiagonal", "solve_tridiagonal_thomas"]


class TridiagonalError(Exception):
    """Fatal breakdown of a tridiagonal solve (singular system / zero pivot)."""


def _check_shapes(lower, diag, upper, rhs) -> int:
    n = len(diag)
    if len(lower) != n - 1 or len(upper) != n - 1:
        raise ValueError("lower/upper diagonals must have length len(diag) - 1")
    if len(rhs) != n:
        raise ValueError("rhs length does not match the system size")
    return n


def solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    """Solve the tridiagonal system with sub/main/super diagonals given.

    ``lower`` and ``upper`` have length ``len(diag) - 1``.  ``rhs`` may be a
    vector or a matrix of stacked right-hand-side columns.

    Raises :class:`TridiagonalError` when the system is singular.
    """
    n = _check_shapes(lower, diag, upper, rhs)
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    try:
        return solve_banded((1, 1), ab, rhs, overwrite_ab=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise TridiagonalError(f"singular tridiagonal system: {exc}") from exc


def solve_tridiagonal_thomas(lower, diag, upper, rhs) -> np.ndarray:
    """Reference Thomas algorithm, no pivoting.

    Valid for systems whose elimination never produces a zero pivot
    (diagonally dominant systems always qualify).
    """
    n = _check_shapes(lower, diag, upper, rhs)
    c = np.zeros(n)
    d = np.array(rhs, dtype=float)
    piv = diag[0]
    if piv == 0.0:
        raise TridiagonalError("zero pivot at row 0")
    c[0] = upper[0] / piv if n > 1 else 0.0
    d[0] = d[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * c[i - 1]
        if piv == 0.0:
            raise TridiagonalError(f"zero pivot at row {i}")
        if i < n - 1:
            c[i] = upper[i] / piv
        d[i] = (d[i] - lower[i - 1] * d[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        d[i] -= c[i] * d[i + 1]
    return d
