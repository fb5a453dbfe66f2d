"""Minimum infinity-norm solutions of ``B y = z`` by linear programming.

The LP is ``min t  s.t.  B y = z,  -t <= y_i <= t``. Substituting
``u = y + t 1`` makes every variable non-negative, and the lower half of the
box constraints becomes ``u >= 0``, so the standard form has ``d + 1``
structural variables, ``de`` equalities and ``d`` inequalities
``u_i - 2t <= 0``. It is solved with a dense two-phase tableau simplex using
Bland's rule, which cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NumericalFailure, RankDeficient

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
DEGENERATE = "degenerate-warning"


@dataclass
class LpResult:
    y: np.ndarray
    t: float
    status: str
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status != INFEASIBLE


def _pivot(T, row, col):
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])


def _run_simplex(T, basis, n_cols, max_pivots):
    """Bland's-rule simplex on tableau ``T`` whose last row holds reduced costs.

    Only the first ``n_cols`` columns may enter. Returns the pivot count.
    """
    m = T.shape[0] - 1
    pivots = 0
    while True:
        costs = T[m, :n_cols]
        entering = np.flatnonzero(costs < -PIVOT_TOL)
        if entering.size == 0:
            return pivots
        col = int(entering[0])
        a = T[:m, col]
        rows = np.flatnonzero(a > PIVOT_TOL)
        if rows.size == 0:
            raise NumericalFailure("LP reported unbounded; this cannot happen for min t")
        ratios = T[rows, -1] / a[rows]
        best = ratios.min()
        ties = rows[ratios <= best + PIVOT_TOL]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise NumericalFailure("simplex pivot limit exceeded")


def _solve_standard(A, b, c):
    """``min c x  s.t.  A x = b, x >= 0`` with ``b >= 0``.

    Rows already containing a unit column (a slack) start with it in the
    basis; the rest receive artificial variables for phase I.
    """
    m, N = A.shape
    basis = np.full(m, -1)
    for j in range(N):
        col = A[:, j]
        nz = np.flatnonzero(col)
        if nz.size == 1 and col[nz[0]] == 1.0 and basis[nz[0]] < 0:
            basis[nz[0]] = j
    need = np.flatnonzero(basis < 0)
    n_art = need.size
    T = np.zeros((m + 1, N + n_art + 1))
    T[:m, :N] = A
    T[:m, -1] = b
    for k, r in enumerate(need):
        T[r, N + k] = 1.0
        basis[r] = N + k
    max_pivots = 50 * (m + N + n_art)
    status = OPTIMAL
    pivots = 0

    if n_art:
        # phase I: minimize the sum of artificials
        T[m, N:N + n_art] = 1.0
        for r in need:
            T[m] -= T[r]
        pivots += _run_simplex(T, basis, N + n_art, max_pivots)
        if T[m, -1] < -FEAS_TOL * (1.0 + np.abs(b).sum()):
            return None, INFEASIBLE, pivots
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= N:
                cand = np.flatnonzero(np.abs(T[r, :N]) > PIVOT_TOL)
                if cand.size:
                    _pivot(T, r, int(cand[0]))
                    basis[r] = int(cand[0])
                    pivots += 1
                else:
                    keep[r] = False
                    status = DEGENERATE
        rows = np.append(np.flatnonzero(keep), m)
        T = np.delete(T[rows], np.s_[N:N + n_art], axis=1)
        basis = basis[keep]
        m = basis.size

    T[m, :N] = c
    T[m, -1] = 0.0
    for r in range(m):
        if T[m, basis[r]] != 0.0:
            T[m] -= T[m, basis[r]] * T[r]
    pivots += _run_simplex(T, basis, N, max_pivots)

    x = np.zeros(N)
    x[basis] = T[:m, -1]
    if m == A.shape[0]:
        # recompute the basic solution from the original data to shed pivoting error
        try:
            xb = np.linalg.solve(A[:, basis], b)
            if np.all(xb >= -FEAS_TOL):
                x[:] = 0.0
                x[basis] = np.maximum(xb, 0.0)
        except np.linalg.LinAlgError:
            pass
    return x, status, pivots


def min_inf_norm_solution(B, z) -> LpResult:
    """Solution of ``B y = z`` with the smallest infinity norm."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    z = np.asarray(z, dtype=float).reshape(-1)
    de, d = B.shape
    if z.shape[0] != de:
        raise DimensionMismatch(f"B is {de}x{d} but z has length {z.shape[0]}")
    if de > d:
        raise DimensionMismatch(f"system is overdetermined ({de} > {d})")
    if not np.any(z):
        return LpResult(y=np.zeros(d), t=0.0, status=OPTIMAL)

    # columns: u (d), t (1), slack s (d)
    N = 2 * d + 1
    A = np.zeros((de + d, N))
    A[:de, :d] = B
    A[:de, d] = -B.sum(axis=1)
    A[de:, :d] = np.eye(d)
    A[de:, d] = -2.0
    A[de:, d + 1:] = np.eye(d)
    b = np.zeros(de + d)
    b[:de] = z
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    c = np.zeros(N)
    c[d] = 1.0

    x, status, pivots = _solve_standard(A, b, c)
    if x is None:
        raise RankDeficient("B y = z has no solution; B does not have full row rank")
    t = float(x[d])
    y = x[:d] - t
    resid = np.linalg.norm(B @ y - z)
    if resid > 1e-8 * (1.0 + np.linalg.norm(z)):
        raise NumericalFailure(f"LP solution residual {resid:.3e} too large")
    return LpResult(y=y, t=t, status=status, pivots=pivots)


def box_feasible(B, z, delta: float) -> bool:
    """True iff some ``y`` in ``[-delta, delta]^d`` solves ``B y = z``."""
    return min_inf_norm_solution(B, z).t <= delta + FEAS_TOL
