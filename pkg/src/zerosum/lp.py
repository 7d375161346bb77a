"""Dense tableau simplex specialized to zero-sum matrix games.

The minimax problem max_x min_y x^T A y is solved through the classic
positive-shift transformation: with B = A + shift (all entries >= 1), the
column player's optimal strategy solves the packing LP

    maximize sum(w)  subject to  B w <= 1,  w >= 0,

whose optimum z* gives the shifted game value 1/z*, the column strategy
w/z*, and the row strategy from the duals (the slack columns' reduced
costs). Pivoting uses Dantzig's rule for speed and switches to Bland's rule
after an iteration threshold so termination is guaranteed on degenerate
games.
"""

from __future__ import annotations

import numpy as np

from .errors import CertificationError

_PIVOT_EPS = 1e-11
_COST_EPS = 1e-12


def _pivot(tableau: np.ndarray, row: int, col: int, basis: list[int]) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    basis[row] = col


def _run_simplex(tableau: np.ndarray, basis: list[int], bland_after: int) -> None:
    """Run to optimality on a max-problem tableau (last row = reduced costs,
    last column = RHS). Raises CertificationError if the iteration cap is hit.
    """
    m = tableau.shape[0] - 1
    max_iters = bland_after + 200 * (tableau.shape[0] + tableau.shape[1])
    for iteration in range(max_iters):
        costs = tableau[-1, :-1]
        if iteration < bland_after:
            col = int(np.argmin(costs))
            if costs[col] >= -_COST_EPS:
                return
        else:
            negative = np.flatnonzero(costs < -_COST_EPS)
            if negative.size == 0:
                return
            col = int(negative[0])
        column = tableau[:m, col]
        rhs = tableau[:m, -1]
        eligible = np.flatnonzero(column > _PIVOT_EPS)
        if eligible.size == 0:
            raise CertificationError("simplex detected an unbounded direction")
        ratios = rhs[eligible] / column[eligible]
        best = ratios.min()
        ties = eligible[np.flatnonzero(ratios <= best + _PIVOT_EPS * (1 + abs(best)))]
        if iteration < bland_after:
            row = int(ties[0])
        else:
            # Bland: leave the variable with the lowest index.
            row = int(min(ties, key=lambda r: basis[r]))
        _pivot(tableau, row, col, basis)
    raise CertificationError("simplex iteration cap exceeded")


def solve_zero_sum_lp(payoff: np.ndarray, bland_after: int | None = None):
    """Return (x, y, value): minimax strategies and the row player's value."""
    a = np.asarray(payoff, dtype=float)
    m, n = a.shape
    shift = 1.0 - a.min()
    b = a + shift
    if bland_after is None:
        bland_after = 100 * (m + n) + 500

    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = b
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = 1.0
    tableau[-1, :n] = -1.0
    basis = list(range(n, n + m))
    _run_simplex(tableau, basis, bland_after)

    z = tableau[-1, -1]
    if z <= 0:
        raise CertificationError("simplex returned a non-positive objective")
    w = np.zeros(n)
    for row, var in enumerate(basis):
        if var < n:
            w[var] = tableau[row, -1]
    duals = tableau[-1, n : n + m]

    y = np.maximum(w, 0.0)
    y /= y.sum()
    x = np.maximum(duals, 0.0)
    x /= x.sum()
    value = float(1.0 / z - shift)
    return x, y, value
