"""Dense tableau simplex for maximizing a minimum of linear functions over a simplex.

Only two problem shapes are needed: the best response of one player in a
min-game, ``max_x min_j g_j . x`` over the probability simplex, and the
value of a two-player zero-sum matrix game (which is the same problem with
one gain vector per opponent column).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

PIVOT_TOLERANCE = 1e-10
ACTIVE_TOLERANCE = 1e-9


class LpSolution(NamedTuple):
    x: np.ndarray
    value: float
    active_set: tuple


def _check_gains(gains) -> np.ndarray:
    g = np.array(gains, dtype=float)
    if g.ndim == 1:
        g = g[None, :]
    if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
        raise ValueError(f"gains must be a non-empty k x m array, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("gains must be finite")
    return g


def _pivot(tab, obj, basis, row, col):
    tab[row] /= tab[row, col]
    for r in range(tab.shape[0]):
        if r != row and tab[r, col] != 0.0:
            tab[r] -= tab[r, col] * tab[row]
    obj -= obj[col] * tab[row]
    basis[row] = col


def solve_simplex_maxmin(gains) -> LpSolution:
    """Maximize ``min_j gains[j] . x`` over ``{x >= 0, sum(x) = 1}``.

    Solved as ``max t`` subject to ``t <= g_j . x`` and ``sum(x) <= 1``
    after shifting every gain by ``1 + max|g|`` so that ``t`` is
    nonnegative and the simplex bound is tight at the optimum.  Pivots
    follow Bland's rule with variables ordered ``x_0..x_{m-1}, t, slacks``,
    so among tied optima the vertex reached puts mass on the
    lowest-indexed strategies.  Runs are deterministic.
    """
    g = _check_gains(gains)
    k, m = g.shape
    shifted = g + (1.0 + np.abs(g).max())

    n_vars = m + 1 + k + 1
    tab = np.zeros((k + 1, n_vars + 1))
    tab[:k, :m] = -shifted
    tab[:k, m] = 1.0
    tab[k, :m] = 1.0
    tab[:, m + 1 : m + 2 + k] = np.eye(k + 1)
    tab[k, -1] = 1.0
    obj = np.zeros(n_vars + 1)
    obj[m] = 1.0
    basis = list(range(m + 1, m + 2 + k))

    # Bland's rule terminates; the bound is a guard against float trouble
    for _ in range(10_000):
        entering = next((j for j in range(n_vars) if obj[j] > PIVOT_TOLERANCE), None)
        if entering is None:
            break
        column = tab[:, entering]
        best = None
        for r in range(k + 1):
            if column[r] > PIVOT_TOLERANCE:
                ratio = tab[r, -1] / column[r]
                key = (ratio, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            raise RuntimeError("unbounded direction in a bounded problem")
        _pivot(tab, obj, basis, best[1], entering)
    else:
        raise RuntimeError("simplex iteration limit reached")

    x = np.zeros(m)
    for r, var in enumerate(basis):
        if var < m:
            x[var] = tab[r, -1]
    x = np.clip(x, 0.0, None)
    total = x.sum()
    if total <= 0:
        raise RuntimeError("simplex returned an empty distribution")
    x /= total
    values = g @ x
    value = float(values.min())
    active = tuple(int(j) for j in np.flatnonzero(values <= value + ACTIVE_TOLERANCE))
    return LpSolution(x, value, active)


def solve_zero_sum(matrix) -> tuple[float, np.ndarray, np.ndarray]:
    """Value and optimal strategies of a zero-sum game; row maximizes ``matrix``."""
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"payoff matrix must be a non-empty 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("payoff matrix must be finite")
    row = solve_simplex_maxmin(a.T)
    col = solve_simplex_maxmin(-a)
    return row.value, row.x, col.x
