"""Empirical payoff estimation between policies, and cross-play grids.

A match source abstracts where games come from: the live simulator, or a
synthetic win-probability matrix (exact or sampled) for testing the
population machinery. Payoff entries are row-player win rates over decided
games; timeouts are tracked separately and count half a win per side only
when a matrix is converted for the zero-sum solver.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigurationError
from ..harness import derive_seed, run_episode
from ..policies import PolicyRef
from ..tasks import Environment, TaskSpec
from .nash import MetaStrategy, solve_matrix_game


@dataclass
class MatchStats:
    wins_a: float = 0.0
    wins_b: float = 0.0
    draws: float = 0.0

    @property
    def games(self) -> float:
        return self.wins_a + self.wins_b + self.draws

    @property
    def win_rate_a(self) -> float:
        decided = self.wins_a + self.wins_b
        return self.wins_a / decided if decided > 0 else 0.5

    @property
    def lp_value_a(self) -> float:
        """Win share with draws split evenly (used by the zero-sum solver)."""
        return (self.wins_a + 0.5 * self.draws) / self.games if self.games > 0 else 0.5


class LiveMatchSource:
    """Plays real episodes of a competitive task."""

    def __init__(self, spec: TaskSpec):
        if not spec.competitive:
            raise ConfigurationError(f"{spec.task_id.value} is not a competitive task")
        self.spec = spec
        self._env = Environment(spec)

    def play(self, ref_a, ref_b, n_games: int, seed: int) -> MatchStats:
        stats = MatchStats()
        for g in range(n_games):
            result = run_episode(
                self.spec, [ref_a, ref_b], derive_seed(seed, "game", g), env=self._env
            )
            outcome = result.outcome
            if outcome is None or outcome.winner is None:
                stats.draws += 1
            elif outcome.winner == 0:
                stats.wins_a += 1
            else:
                stats.wins_b += 1
        return stats

    def play_mixture(self, candidate, mixture: Sequence, probs, n_games: int, seed: int) -> MatchStats:
        """Candidate (as team 0) against opponents drawn from a mixture."""
        stats = MatchStats()
        probs = np.asarray(probs, dtype=float)
        rng = np.random.default_rng(derive_seed(seed, "mixture"))
        for g in range(n_games):
            opponent = mixture[int(rng.choice(len(mixture), p=probs))]
            result = run_episode(
                self.spec, [candidate, opponent], derive_seed(seed, "mixgame", g), env=self._env
            )
            outcome = result.outcome
            if outcome is None or outcome.winner is None:
                stats.draws += 1
            elif outcome.winner == 0:
                stats.wins_a += 1
            else:
                stats.wins_b += 1
        return stats


class MatrixMatchSource:
    """Synthetic source backed by a true win-probability matrix.

    Policies are integer indices into the matrix. ``exact`` returns expected
    counts; otherwise outcomes are sampled.
    """

    def __init__(self, true_matrix, exact: bool = True):
        self.matrix = np.asarray(true_matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ConfigurationError("true matrix must be square")
        self.exact = exact

    def _index(self, ref) -> int:
        if isinstance(ref, PolicyRef):
            return int(ref.params[0])
        return int(ref)

    def play(self, ref_a, ref_b, n_games: int, seed: int) -> MatchStats:
        p = float(self.matrix[self._index(ref_a), self._index(ref_b)])
        if self.exact:
            return MatchStats(wins_a=p * n_games, wins_b=(1.0 - p) * n_games)
        rng = np.random.default_rng(seed)
        wins = int(rng.binomial(n_games, p))
        return MatchStats(wins_a=wins, wins_b=n_games - wins)

    def play_mixture(self, candidate, mixture, probs, n_games: int, seed: int) -> MatchStats:
        probs = np.asarray(probs, dtype=float)
        if self.exact:
            p = float(
                sum(
                    w * self.matrix[self._index(candidate), self._index(op)]
                    for w, op in zip(probs, mixture)
                )
            )
            return MatchStats(wins_a=p * n_games, wins_b=(1.0 - p) * n_games)
        rng = np.random.default_rng(seed)
        wins = 0.0
        for _ in range(n_games):
            op = mixture[int(rng.choice(len(mixture), p=probs))]
            wins += rng.random() < self.matrix[self._index(candidate), self._index(op)]
        return MatchStats(wins_a=wins, wins_b=n_games - wins)


@dataclass
class PayoffMatrix:
    """Row-player win rates between two policy lists."""

    row_ids: list
    col_ids: list
    win_rate: np.ndarray
    lp_value: np.ndarray
    games: np.ndarray

    @property
    def square(self) -> bool:
        return len(self.row_ids) == len(self.col_ids)

    def centered(self) -> np.ndarray:
        """Zero-sum payoff for the meta-solver: win share minus one half."""
        return self.lp_value - 0.5

    def to_csv(self, path, labels: Optional[Sequence[str]] = None):
        labels_r = labels if labels is not None else [_label(r) for r in self.row_ids]
        labels_c = labels if labels is not None else [_label(c) for c in self.col_ids]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + list(labels_c))
            for i, row_label in enumerate(labels_r):
                writer.writerow([row_label] + [f"{v:.6f}" for v in self.win_rate[i]])


def _label(ref) -> str:
    if isinstance(ref, PolicyRef):
        return ref.label()
    return str(ref)


def estimate_payoff(source, ref_a, ref_b, n_games: int, seed: int) -> MatchStats:
    """Win-rate estimate for one ordered pair."""
    if n_games < 1:
        raise ConfigurationError("n_games must be >= 1")
    return source.play(ref_a, ref_b, n_games, seed)


def payoff_matrix(source, rows: Sequence, cols: Sequence, games_per_cell: int, seed: int) -> PayoffMatrix:
    nr, nc = len(rows), len(cols)
    win = np.zeros((nr, nc))
    lp = np.zeros((nr, nc))
    games = np.zeros((nr, nc), dtype=int)
    for i, a in enumerate(rows):
        for j, b in enumerate(cols):
            stats = source.play(a, b, games_per_cell, derive_seed(seed, "cell", i, j))
            win[i, j] = stats.win_rate_a
            lp[i, j] = stats.lp_value_a
            games[i, j] = games_per_cell
    return PayoffMatrix(list(rows), list(cols), win, lp, games)


def solve_zero_sum_nash(payoff: PayoffMatrix) -> tuple[MetaStrategy, MetaStrategy, float]:
    """Nash mixtures of the empirical game (entries centered at one half)."""
    row, col, value = solve_matrix_game(payoff.centered())
    return MetaStrategy(row), MetaStrategy(col), value


def crossplay_heatmap(
    source,
    populations_a: Sequence,
    meta_a: MetaStrategy,
    populations_b: Sequence,
    meta_b: MetaStrategy,
    games_per_pair: int,
    seed: int,
) -> MatchStats:
    """Mixture-vs-mixture win rate (one heatmap cell)."""
    stats = MatchStats()
    rng = np.random.default_rng(derive_seed(seed, "crossplay"))
    for g in range(games_per_pair):
        a = populations_a[int(rng.choice(len(populations_a), p=meta_a.probs))]
        b = populations_b[int(rng.choice(len(populations_b), p=meta_b.probs))]
        game = source.play(a, b, 1, derive_seed(seed, "cpgame", g))
        stats.wins_a += game.wins_a
        stats.wins_b += game.wins_b
        stats.draws += game.draws
    return stats


def crossplay_grid(source, populations: Sequence[tuple[Sequence, MetaStrategy]], games_per_pair: int, seed: int) -> PayoffMatrix:
    """Full population-vs-population win-rate grid."""
    n = len(populations)
    win = np.zeros((n, n))
    lp = np.zeros((n, n))
    games = np.full((n, n), games_per_pair, dtype=int)
    for i, (pop_a, meta_a) in enumerate(populations):
        for j, (pop_b, meta_b) in enumerate(populations):
            stats = crossplay_heatmap(
                source, pop_a, meta_a, pop_b, meta_b, games_per_pair, derive_seed(seed, "grid", i, j)
            )
            win[i, j] = stats.win_rate_a
            lp[i, j] = stats.lp_value_a
    return PayoffMatrix([f"pop{i}" for i in range(n)], [f"pop{j}" for j in range(n)], win, lp, games)
