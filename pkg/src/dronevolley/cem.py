"""Cross-entropy search over bounded parameter vectors.

Serves as the best-response oracle at desk scale: candidates are drawn from a
diagonal Gaussian clipped to the schema box, scored (win rate against an
opponent mixture, or any custom objective), and the distribution is refit on
the elite fraction. Fully deterministic under a fixed seed; the best
candidate ever evaluated is returned, so the reported score never decreases
across generations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .harness import derive_seed
from .policies import PolicyRef
from .policies.drills import ParamSchema


@dataclass(frozen=True)
class SearchBudget:
    generations: int = 10
    population_size: int = 24
    elite_fraction: float = 0.25
    games_per_candidate: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigurationError("population_size must be >= 2")
        if not 0.0 < self.elite_fraction <= 1.0:
            raise ConfigurationError("elite_fraction must be in (0, 1]")


@dataclass
class GenerationStats:
    generation: int
    best_score: float
    mean_score: float
    best_so_far: float


@dataclass
class SearchResult:
    best_params: np.ndarray
    best_score: float
    history: list


def cem_search(
    objective: Callable[[np.ndarray, int], float],
    schema: ParamSchema,
    budget: SearchBudget,
    init_mean: Optional[np.ndarray] = None,
    callback: Optional[Callable] = None,
) -> SearchResult:
    """Maximize ``objective(params, candidate_seed)`` over the schema box."""
    rng = np.random.default_rng(budget.seed)
    mean = schema.clip(init_mean) if init_mean is not None else schema.midpoint.copy()
    std = (schema.high - schema.low) / 4.0
    n_elite = max(1, int(round(budget.elite_fraction * budget.population_size)))

    best_params = mean.copy()
    best_score = -np.inf
    history: list[GenerationStats] = []
    for gen in range(budget.generations):
        candidates = [
            schema.clip(rng.normal(mean, std)) for _ in range(budget.population_size)
        ]
        scores = np.array(
            [
                objective(c, derive_seed(budget.seed, "cand", gen, k))
                for k, c in enumerate(candidates)
            ]
        )
        order = np.argsort(-scores, kind="stable")  # ties broken by candidate index
        elite = np.stack([candidates[i] for i in order[:n_elite]])
        mean = elite.mean(axis=0)
        std = elite.std(axis=0) + 1e-6
        top = int(order[0])
        if scores[top] > best_score:
            best_score = float(scores[top])
            best_params = candidates[top].copy()
        stats = GenerationStats(
            generation=gen,
            best_score=float(scores[top]),
            mean_score=float(scores.mean()),
            best_so_far=best_score,
        )
        history.append(stats)
        if callback is not None:
            callback(stats)
    return SearchResult(best_params=best_params, best_score=best_score, history=history)


def best_response_search(
    source,
    policy_kind: str,
    schema: ParamSchema,
    opponents: list,
    opponent_probs,
    budget: SearchBudget,
    init: Optional[PolicyRef] = None,
    convergence_win: Optional[float] = None,
) -> tuple[PolicyRef, float]:
    """CEM over a scripted policy family against a frozen opponent mixture.

    Zero decided games score a candidate 0. Returns the best candidate as a
    policy reference plus its achieved win rate.
    """

    def objective(params: np.ndarray, cand_seed: int) -> float:
        ref = PolicyRef(kind=policy_kind, params=tuple(float(v) for v in params))
        stats = source.play_mixture(ref, opponents, opponent_probs, budget.games_per_candidate, cand_seed)
        decided = stats.wins_a + stats.wins_b
        if decided <= 0:
            return 0.0
        return stats.wins_a / decided

    stop_flag = {"done": False}

    def callback(stats: GenerationStats):
        if convergence_win is not None and stats.best_so_far >= convergence_win:
            stop_flag["done"] = True

    init_mean = np.asarray(init.params, dtype=float) if init is not None and init.params else None
    result = cem_search(objective, schema, budget, init_mean=init_mean, callback=callback)
    ref = PolicyRef(kind=policy_kind, params=tuple(float(v) for v in result.best_params))
    return ref, result.best_score
