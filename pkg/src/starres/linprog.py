"""Dense two-phase simplex for the tiny equality-form LPs used here.

minimize c.x  subject to  A x = b,  x >= 0

Problems have at most a dozen variables and a handful of rows, so a plain
tableau with Bland's rule is plenty and keeps behaviour deterministic.
"""

import numpy as np

from .errors import InfeasibleError, StarResError

_PIVOT_TOL = 1e-11


class UnboundedError(StarResError):
    pass


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and abs(T[r, col]) > 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def _simplex_phase(T, basis, ncols):
    # Bland's rule: smallest-index entering/leaving, immune to cycling.
    while True:
        col = -1
        for j in range(ncols):
            if T[-1, j] < -_PIVOT_TOL:
                col = j
                break
        if col < 0:
            return
        row = -1
        best = np.inf
        for r in range(T.shape[0] - 1):
            if T[r, col] > _PIVOT_TOL:
                ratio = T[r, -1] / T[r, col]
                if ratio < best - 1e-12 or (abs(ratio - best) <= 1e-12 and (row < 0 or basis[r] < basis[row])):
                    best = ratio
                    row = r
        if row < 0:
            raise UnboundedError("objective unbounded below")
        _pivot(T, basis, row, col)


def solve_lp(c, A, b):
    """Solve min c.x, A x = b, x >= 0. Returns (x, optimal_value)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    A = A.copy()
    b = b.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial variables
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    _simplex_phase(T, basis, n + m)
    if T[-1, -1] < -1e-8:
        raise InfeasibleError("phase-1 optimum positive: no feasible point")
    # drive remaining artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n:
            for j in range(n):
                if abs(T[r, j]) > _PIVOT_TOL:
                    _pivot(T, basis, r, j)
                    break

    # phase 2
    T2 = np.zeros((m + 1, n + 1))
    T2[:m, :n] = T[:m, :n]
    T2[:m, -1] = T[:m, -1]
    T2[-1, :n] = c
    for r in range(m):
        if basis[r] < n:
            T2[-1] -= c[basis[r]] * T2[r]
    _simplex_phase(T2, basis, n)

    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T2[r, -1]
    return x, float(c @ x)
