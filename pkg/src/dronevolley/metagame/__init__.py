"""Game-theoretic evaluation stack: payoffs, Nash, population loops, Elo."""

from .elo import (
    DEFAULT_INIT,
    DEFAULT_K,
    EloTable,
    MatchRecord,
    TournamentResult,
    elo_update,
    expected_score,
    run_tournament,
)
from .loops import (
    Convergence,
    ExploitabilityResult,
    IterationRecord,
    LoopMode,
    Population,
    approx_exploitability,
    population_loop,
)
from .nash import MetaStrategy, best_pure_response_value, duality_gap, solve_matrix_game
from .payoff import (
    LiveMatchSource,
    MatchStats,
    MatrixMatchSource,
    PayoffMatrix,
    crossplay_grid,
    crossplay_heatmap,
    estimate_payoff,
    payoff_matrix,
    solve_zero_sum_nash,
)

__all__ = [
    "Convergence",
    "DEFAULT_INIT",
    "DEFAULT_K",
    "EloTable",
    "ExploitabilityResult",
    "IterationRecord",
    "LiveMatchSource",
    "LoopMode",
    "MatchRecord",
    "MatchStats",
    "MatrixMatchSource",
    "MetaStrategy",
    "PayoffMatrix",
    "Population",
    "TournamentResult",
    "approx_exploitability",
    "best_pure_response_value",
    "crossplay_grid",
    "crossplay_heatmap",
    "duality_gap",
    "elo_update",
    "estimate_payoff",
    "expected_score",
    "payoff_matrix",
    "population_loop",
    "run_tournament",
    "solve_matrix_game",
    "solve_zero_sum_nash",
]
