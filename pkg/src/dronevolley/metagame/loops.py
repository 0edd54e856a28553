"""Population training loops (self-play, fictitious self-play, response
oracles with uniform or Nash meta-solvers) and approximate exploitability.

The oracle is a callable ``oracle(opponents, probs, init, seed) ->
(new_policy, achieved_win_rate)``; opponents are drawn from the mixture the
mode prescribes. Self-play responds to the latest member only; fictitious
self-play uses the uniform mixture and warm-starts from the previous iterate;
the response-oracle variants restart from scratch and weight opponents
uniformly or by the Nash mixture of the running empirical payoff matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ConfigurationError
from ..harness import derive_seed
from .nash import MetaStrategy
from .payoff import PayoffMatrix, payoff_matrix, solve_zero_sum_nash


class LoopMode(str, Enum):
    SP = "sp"
    FSP = "fsp"
    PSRO_UNIFORM = "psro-uniform"
    PSRO_NASH = "psro-nash"


@dataclass(frozen=True)
class Convergence:
    win_threshold: float = 0.9
    std_threshold: float = 0.05
    max_iters: int = 5000


@dataclass
class IterationRecord:
    index: int
    meta: MetaStrategy
    new_member: object
    achieved_win_rate: float
    converged: bool


@dataclass
class Population:
    """Append-only policy set with per-iteration metadata."""

    members: list = field(default_factory=list)
    history: list = field(default_factory=list)
    payoff: Optional[PayoffMatrix] = None
    final_meta: Optional[MetaStrategy] = None

    def labels(self) -> list[str]:
        return [getattr(m, "label", lambda: str(m))() for m in self.members]


def _mixture_for(mode: LoopMode, members, payoff: Optional[PayoffMatrix]) -> MetaStrategy:
    n = len(members)
    if mode == LoopMode.SP:
        return MetaStrategy.delta(n, n - 1)
    if mode in (LoopMode.FSP, LoopMode.PSRO_UNIFORM):
        return MetaStrategy.uniform(n)
    if payoff is None or len(payoff.row_ids) != n:
        raise ConfigurationError("nash meta-solver needs the current payoff matrix")
    row, _, _ = solve_zero_sum_nash(payoff)
    return row


def population_loop(
    source,
    mode: LoopMode,
    oracle: Callable,
    initial,
    iterations: int,
    games_per_cell: int,
    seed: int,
    convergence: Convergence = Convergence(),
) -> Population:
    """Grow a population for a fixed number of best-response iterations.

    Stops early when the oracle returns a policy already in the population
    (the empirical game is saturated). The payoff matrix is re-estimated over
    all members after each append so meta-strategies always see a square,
    current game.
    """
    mode = LoopMode(mode)
    pop = Population(members=[initial])
    pop.payoff = payoff_matrix(source, pop.members, pop.members, games_per_cell, derive_seed(seed, "payoff", 0))
    for it in range(1, iterations + 1):
        meta = _mixture_for(mode, pop.members, pop.payoff)
        warm = pop.members[-1] if mode in (LoopMode.SP, LoopMode.FSP) else None
        new_member, win_rate = oracle(
            list(pop.members), meta.probs, warm, derive_seed(seed, "oracle", it)
        )
        converged = win_rate >= convergence.win_threshold
        record = IterationRecord(
            index=it, meta=meta, new_member=new_member, achieved_win_rate=win_rate, converged=converged
        )
        pop.history.append(record)
        if new_member in pop.members:
            # best response already present: the loop has closed on itself
            pop.final_meta = meta
            break
        pop.members.append(new_member)
        pop.payoff = payoff_matrix(
            source, pop.members, pop.members, games_per_cell, derive_seed(seed, "payoff", it)
        )
        pop.final_meta = _mixture_for(mode, pop.members, pop.payoff)
    return pop


@dataclass
class ExploitabilityResult:
    best_response: object
    br_win_rate: float
    exploitability: float  # br win rate minus the symmetric-equilibrium 0.5

    @property
    def percentage_points(self) -> float:
        return 100.0 * self.exploitability


def approx_exploitability(
    target_members: Sequence,
    target_meta: MetaStrategy,
    oracle: Callable,
    seed: int,
) -> ExploitabilityResult:
    """Train/search a best response to the frozen target and report its edge."""
    if len(target_members) != len(target_meta):
        raise ConfigurationError("meta-strategy length must match the member list")
    br, win_rate = oracle(list(target_members), target_meta.probs, None, derive_seed(seed, "exploit"))
    return ExploitabilityResult(best_response=br, br_win_rate=win_rate, exploitability=win_rate - 0.5)
