"""Reward term bookkeeping and the per-task term tables.

Each task's reward is a set of named rows. Shaped distance rows use the
kernel ``scale * exp(-distance)`` so the row's upper bound is attained at
zero distance; unbounded anchor penalties use the negative distance itself.
Rows flagged shared broadcast one value to every drone in the owning group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spec import TaskId

INF = float("inf")


@dataclass
class RewardBreakdown:
    """Named per-drone reward rows for one transition."""

    n_drones: int
    terms: dict = field(default_factory=dict)
    shared: set = field(default_factory=set)

    def add(self, name: str, drone: int, value: float):
        row = self.terms.setdefault(name, np.zeros(self.n_drones))
        row[drone] += value

    def add_shared(self, name: str, drones, value: float):
        row = self.terms.setdefault(name, np.zeros(self.n_drones))
        for d in drones:
            row[d] += value
        self.shared.add(name)

    def term(self, name: str) -> np.ndarray:
        return self.terms.get(name, np.zeros(self.n_drones))

    @property
    def totals(self) -> np.ndarray:
        out = np.zeros(self.n_drones)
        for row in self.terms.values():
            out = out + row
        return out

    def to_dict(self) -> dict:
        return {name: row.tolist() for name, row in self.terms.items()}


def exp_kernel(distance: float, scale: float) -> float:
    return scale * math.exp(-distance)


def within_angle(direction: np.ndarray, bearing: np.ndarray, limit_deg: float = 45.0) -> bool:
    """True when the horizontal angle between direction and bearing is under the limit."""
    d = np.asarray(direction[:2], dtype=float)
    b = np.asarray(bearing[:2], dtype=float)
    nd, nb = np.linalg.norm(d), np.linalg.norm(b)
    if nd < 1e-9 or nb < 1e-9:
        return False
    cos = float(d @ b) / (nd * nb)
    return cos >= math.cos(math.radians(limit_deg))


# Declared value range per row, per task. Misbehave rows are signed; shaped
# rows are the per-step range. Used by the range-compliance tests and kept
# next to the reward code so the two cannot drift apart.
REWARD_RANGES: dict[TaskId, dict[str, tuple[float, float]]] = {
    TaskId.BACK_AND_FORTH: {
        "drone_misbehave": (-10.0, 0.0),
        "dist_to_target": (0.0, 0.5),
        "target_stay": (0.0, 2.5),
    },
    TaskId.HIT_THE_BALL: {
        "ball_misbehave": (-10.0, 0.0),
        "drone_misbehave": (-10.0, 0.0),
        "wrong_hit": (-10.0, 0.0),
        "success_hit": (0.0, 1.0),
        "distance": (0.0, INF),
        "dist_to_anchor": (-INF, 0.0),
    },
    TaskId.SOLO_BUMP: {
        "ball_misbehave": (-10.0, 0.0),
        "drone_misbehave": (-10.0, 0.0),
        "wrong_hit": (-10.0, 0.0),
        "success_hit": (0.0, 1.0),
        "success_height": (0.0, 8.0),
        "dist_to_ball_xy": (0.0, 1.0),
        "dist_to_ball_z": (0.0, 1.0),
    },
    TaskId.BUMP_AND_PASS: {
        "ball_misbehave": (-10.0, 0.0),
        "drone_misbehave": (-10.0, 0.0),
        "wrong_hit": (-10.0, 0.0),
        "success_hit": (0.0, 1.0),
        "success_cross": (0.0, 1.0),
        "dist_to_anchor": (-INF, 0.0),
        "hit_direction": (0.0, 1.0),
        "dist_to_ball": (0.0, 0.05),
    },
    TaskId.SET_AND_SPIKE_EASY: {
        "ball_misbehave": (-10.0, 0.0),
        "drone_misbehave": (-10.0, 0.0),
        "wrong_hit": (-10.0, 0.0),
        "success_hit": (0.0, 5.0),
        "downward_spike": (0.0, 5.0),
        "success_cross": (0.0, 5.0),
        "in_target": (0.0, 5.0),
        "dist_to_anchor": (-INF, 0.0),
        "hit_direction": (0.0, 1.0),
        "spike_velocity": (0.0, INF),
        "dist_to_ball": (0.0, 0.05),
        "dist_to_target": (0.0, 2.0),
    },
    TaskId.SET_AND_SPIKE_HARD: {
        "ball_misbehave": (-10.0, 0.0),
        "drone_misbehave": (-10.0, 0.0),
        "wrong_hit": (-10.0, 0.0),
        "success_hit": (0.0, 5.0),
        "downward_spike": (0.0, 5.0),
        "success_cross": (0.0, 5.0),
        "success_spike": (0.0, 5.0),
        "dist_to_anchor": (-INF, 0.0),
        "hit_direction": (0.0, 1.0),
        "spike_velocity": (0.0, INF),
        "dist_to_ball": (0.0, 0.05),
    },
    TaskId.ONE_VS_ONE: {
        "drone_misbehave": (-100.0, 0.0),
        "drone_out_of_court": (0.0, 0.2),
        "win_or_lose": (-100.0, 100.0),
        "success_hit": (0.0, 5.0),
        "dist_to_ball": (0.0, 0.5),
    },
    TaskId.THREE_VS_THREE: {
        "drone_misbehave": (-100.0, 0.0),
        "drone_collision": (-100.0, 0.0),
        "win_or_lose": (-100.0, 100.0),
        "success_hit": (0.0, 10.0),
        "dist_to_anchor": (0.0, 0.05),
        "dist_to_ball": (0.0, 0.5),
    },
}
REWARD_RANGES[TaskId.SIX_VS_SIX] = dict(REWARD_RANGES[TaskId.THREE_VS_THREE])

# Rows suppressed when shaping is disabled.
SHAPING_ROWS: dict[TaskId, frozenset[str]] = {
    TaskId.BACK_AND_FORTH: frozenset(),
    TaskId.HIT_THE_BALL: frozenset(),
    TaskId.SOLO_BUMP: frozenset({"dist_to_ball_xy", "dist_to_ball_z"}),
    TaskId.BUMP_AND_PASS: frozenset({"hit_direction", "dist_to_ball"}),
    TaskId.SET_AND_SPIKE_EASY: frozenset({"hit_direction", "spike_velocity", "dist_to_ball", "dist_to_target"}),
    TaskId.SET_AND_SPIKE_HARD: frozenset({"hit_direction", "spike_velocity", "dist_to_ball"}),
    TaskId.ONE_VS_ONE: frozenset({"success_hit", "dist_to_ball"}),
    TaskId.THREE_VS_THREE: frozenset({"success_hit", "dist_to_anchor", "dist_to_ball"}),
    TaskId.SIX_VS_SIX: frozenset({"success_hit", "dist_to_anchor", "dist_to_ball"}),
}

# Rows whose value is common to the owning group.
SHARED_ROWS: dict[TaskId, frozenset[str]] = {
    TaskId.BACK_AND_FORTH: frozenset(),
    TaskId.HIT_THE_BALL: frozenset(),
    TaskId.SOLO_BUMP: frozenset(),
    TaskId.BUMP_AND_PASS: frozenset({"ball_misbehave", "success_hit", "success_cross", "dist_to_anchor"}),
    TaskId.SET_AND_SPIKE_EASY: frozenset(
        {"ball_misbehave", "success_hit", "downward_spike", "success_cross", "in_target",
         "dist_to_anchor", "spike_velocity", "dist_to_target"}
    ),
    TaskId.SET_AND_SPIKE_HARD: frozenset(
        {"ball_misbehave", "success_hit", "downward_spike", "success_cross", "success_spike",
         "dist_to_anchor", "spike_velocity"}
    ),
    TaskId.ONE_VS_ONE: frozenset(),
    TaskId.THREE_VS_THREE: frozenset({"win_or_lose", "success_hit"}),
    TaskId.SIX_VS_SIX: frozenset({"win_or_lose", "success_hit"}),
}
