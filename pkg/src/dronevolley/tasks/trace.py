"""In-memory episode traces consumed by the metrics and replay machinery."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..rules import Outcome
from .spec import TaskSpec


@dataclass
class StepRecord:
    step: int
    drone_roots: np.ndarray          # (n_drones, 23)
    ball_position: Optional[np.ndarray]
    ball_velocity: Optional[np.ndarray]
    events: list
    violations: list
    ball_faults: list
    rewards: dict                    # term name -> list of per-drone values
    terminal: bool


@dataclass
class EpisodeTrace:
    task_id: str
    seed: int
    serving_team: int
    records: list = field(default_factory=list)
    outcome: Optional[Outcome] = None

    @property
    def length(self) -> int:
        return len(self.records)
