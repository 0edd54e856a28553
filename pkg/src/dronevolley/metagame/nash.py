"""Exact zero-sum matrix-game solving via linear programming."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..errors import ConfigurationError


@dataclass(frozen=True)
class MetaStrategy:
    """Probability mixture over population members."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or np.any(p < -1e-12):
            raise ConfigurationError("meta-strategy must be a nonnegative vector")
        s = float(p.sum())
        if abs(s - 1.0) > 1e-9:
            raise ConfigurationError(f"meta-strategy must sum to 1 (got {s})")
        object.__setattr__(self, "probs", np.clip(p, 0.0, None))

    def __len__(self):
        return self.probs.shape[0]

    @staticmethod
    def uniform(n: int) -> "MetaStrategy":
        return MetaStrategy(np.full(n, 1.0 / n))

    @staticmethod
    def delta(n: int, index: int) -> "MetaStrategy":
        p = np.zeros(n)
        p[index] = 1.0
        return MetaStrategy(p)


def _solve_one_side(matrix: np.ndarray) -> tuple[np.ndarray, float]:
    """Row player's maximin mixture for payoff matrix `matrix` (row maximizes)."""
    m, n = matrix.shape
    # variables: x (m mixture weights), v (game value, free)
    c = np.zeros(m + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-matrix.T, np.ones((n, 1))])
    b_ub = np.zeros(n)
    a_eq = np.zeros((1, m + 1))
    a_eq[0, :m] = 1.0
    bounds = [(0.0, None)] * m + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.array([1.0]), bounds=bounds, method="highs")
    if not res.success:
        raise ConfigurationError(f"matrix-game LP failed: {res.message}")
    x = np.clip(res.x[:m], 0.0, None)
    x = x / x.sum()
    return x, float(res.x[-1])


def solve_matrix_game(matrix) -> tuple[np.ndarray, np.ndarray, float]:
    """Equilibrium (row mix, column mix, value) of a zero-sum matrix game.

    The row player maximizes ``x^T M y``; the column player minimizes it.
    Both sides are solved exactly with the HiGHS LP solver; the duality gap
    of the returned pair is at the solver's precision (< 1e-8).
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ConfigurationError("payoff matrix must be 2-D and nonempty")
    if not np.all(np.isfinite(m)):
        raise ConfigurationError("payoff matrix entries must be finite")
    row_mix, value = _solve_one_side(m)
    col_mix, col_value = _solve_one_side(-m.T)
    return row_mix, col_mix, value


def best_pure_response_value(matrix, col_mix) -> float:
    """Row player's best pure payoff against a fixed column mixture."""
    m = np.asarray(matrix, dtype=float)
    return float(np.max(m @ np.asarray(col_mix, dtype=float)))


def duality_gap(matrix, row_mix, col_mix) -> float:
    """max_row (M y) - min_col (x M): zero at an exact equilibrium."""
    m = np.asarray(matrix, dtype=float)
    upper = float(np.max(m @ col_mix))
    lower = float(np.min(row_mix @ m))
    return upper - lower
