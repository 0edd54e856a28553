"""Elo ratings and equal-pairing round-robin tournaments."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigurationError
from ..harness import derive_seed

DEFAULT_K = 168.0
DEFAULT_INIT = 1000.0


@dataclass
class EloTable:
    ratings: dict
    k: float = DEFAULT_K
    init: float = DEFAULT_INIT

    @staticmethod
    def fresh(ids: Sequence, k: float = DEFAULT_K, init: float = DEFAULT_INIT) -> "EloTable":
        return EloTable(ratings={i: float(init) for i in ids}, k=k, init=init)

    def copy(self) -> "EloTable":
        return EloTable(ratings=dict(self.ratings), k=self.k, init=self.init)

    def __getitem__(self, key) -> float:
        return self.ratings[key]


def expected_score(rating_a: float, rating_b: float) -> float:
    return 1.0 / (1.0 + 10.0 ** ((rating_b - rating_a) / 400.0))


def elo_update(table: EloTable, a, b, result: str) -> EloTable:
    """One match update. ``result`` is "a_wins", "b_wins", or "draw".

    The transfer is zero-sum, so the rating total is conserved exactly.
    """
    if a not in table.ratings or b not in table.ratings:
        raise ConfigurationError("both policies must be present in the Elo table")
    score = {"a_wins": 1.0, "b_wins": 0.0, "draw": 0.5}.get(result)
    if score is None:
        raise ConfigurationError(f"unknown result {result!r}")
    out = table.copy()
    expected = expected_score(table.ratings[a], table.ratings[b])
    delta = table.k * (score - expected)
    out.ratings[a] = table.ratings[a] + delta
    out.ratings[b] = table.ratings[b] - delta
    return out


@dataclass(frozen=True)
class MatchRecord:
    round: int
    a: object
    b: object
    result: str


@dataclass
class TournamentResult:
    table: EloTable
    matches: list

    @property
    def games_played(self) -> int:
        return len(self.matches)


def run_tournament(
    policies: Sequence,
    rounds: int,
    seed: int,
    win_matrix=None,
    source=None,
    k: float = DEFAULT_K,
    init: float = DEFAULT_INIT,
) -> TournamentResult:
    """Round-robin: every round plays each unordered pair exactly once.

    Results come either from a cross-play win-probability matrix (sampled) or
    from live games via a match source. Pair counts are exactly equal by
    construction.
    """
    if len(policies) < 2:
        raise ConfigurationError("a tournament needs at least two policies")
    if (win_matrix is None) == (source is None):
        raise ConfigurationError("provide exactly one of win_matrix or source")
    if win_matrix is not None:
        win_matrix = np.asarray(win_matrix, dtype=float)
        if win_matrix.shape != (len(policies), len(policies)):
            raise ConfigurationError("win matrix shape must match the policy list")
    table = EloTable.fresh(policies, k=k, init=init)
    matches: list[MatchRecord] = []
    pairs = list(combinations(range(len(policies)), 2))
    rng = np.random.default_rng(derive_seed(seed, "tournament"))
    for rnd in range(rounds):
        for i, j in pairs:
            a, b = policies[i], policies[j]
            if win_matrix is not None:
                result = "a_wins" if rng.random() < win_matrix[i, j] else "b_wins"
            else:
                stats = source.play(a, b, 1, derive_seed(seed, "round", rnd, i, j))
                if stats.draws > 0:
                    result = "draw"
                else:
                    result = "a_wins" if stats.wins_a > 0 else "b_wins"
            table = elo_update(table, a, b, result)
            matches.append(MatchRecord(rnd, a, b, result))
    return TournamentResult(table=table, matches=matches)
