"""Task specifications and the nine shipped presets.

Presets live in packaged YAML files (one per task) so every number is visible
and overridable; :func:`load_task` reads them. ``TaskSpec.from_dict`` accepts
the same schema for user-supplied files.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import Optional

import numpy as np
import yaml

from ..ball import CourtGeometry
from ..defense import DefenseConfig
from ..errors import ConfigurationError


class TaskId(str, Enum):
    BACK_AND_FORTH = "back_and_forth"
    HIT_THE_BALL = "hit_the_ball"
    SOLO_BUMP = "solo_bump"
    BUMP_AND_PASS = "bump_and_pass"
    SET_AND_SPIKE_EASY = "set_and_spike_easy"
    SET_AND_SPIKE_HARD = "set_and_spike_hard"
    ONE_VS_ONE = "one_vs_one"
    THREE_VS_THREE = "three_vs_three"
    SIX_VS_SIX = "six_vs_six"


COMPETITIVE_TASKS = (TaskId.ONE_VS_ONE, TaskId.THREE_VS_THREE, TaskId.SIX_VS_SIX)
TEAM_TASKS = (TaskId.THREE_VS_THREE, TaskId.SIX_VS_SIX)


class ActionMode(str, Enum):
    CTBR = "ctbr"  # collective thrust + body rates
    PRT = "prt"    # per-rotor thrust


@dataclass(frozen=True)
class TaskSpec:
    task_id: TaskId
    court: CourtGeometry
    n_drones: int
    teams: tuple[int, ...]
    anchors: np.ndarray
    init_low: np.ndarray
    init_high: np.ndarray
    max_steps: int
    hit_limit: int
    action_mode: ActionMode = ActionMode.PRT
    shaping_enabled: bool = True
    dt: float = 0.01
    gravity: float = 9.81
    # ball initialization: "none" (no ball), "fixed", or "above_server"
    ball_mode: str = "none"
    ball_position: Optional[np.ndarray] = None
    serve_height: Optional[float] = None
    servers: Optional[tuple[int, ...]] = None
    # drone-motion limits
    z_min: float = 0.3
    remote_margin: Optional[float] = None
    # task-specific dials
    targets: Optional[np.ndarray] = None          # back_and_forth waypoints
    stay_radius: Optional[float] = None
    stay_steps: Optional[int] = None
    landing_plane_z: Optional[float] = None       # hit_the_ball metric plane
    min_bump_height: Optional[float] = None
    bump_height_max: Optional[float] = None
    pass_partner_radius: Optional[float] = None
    target_center: Optional[np.ndarray] = None
    target_radius: Optional[float] = None
    defense: Optional[DefenseConfig] = None

    def __post_init__(self):
        coerce = object.__setattr__
        coerce(self, "task_id", TaskId(self.task_id))
        coerce(self, "action_mode", ActionMode(self.action_mode))
        coerce(self, "teams", tuple(int(t) for t in self.teams))
        coerce(self, "anchors", np.asarray(self.anchors, dtype=float))
        coerce(self, "init_low", np.asarray(self.init_low, dtype=float))
        coerce(self, "init_high", np.asarray(self.init_high, dtype=float))
        if self.ball_position is not None:
            coerce(self, "ball_position", np.asarray(self.ball_position, dtype=float))
        if self.targets is not None:
            coerce(self, "targets", np.asarray(self.targets, dtype=float))
        if self.target_center is not None:
            coerce(self, "target_center", np.asarray(self.target_center, dtype=float))
        if self.servers is not None:
            coerce(self, "servers", tuple(int(s) for s in self.servers))
        self._validate()

    def _validate(self):
        n = self.n_drones
        if len(self.teams) != n:
            raise ConfigurationError("teams length must match n_drones")
        for name in ("anchors", "init_low", "init_high"):
            if getattr(self, name).shape != (n, 3):
                raise ConfigurationError(f"{name} must have shape ({n}, 3)")
        if np.any(self.init_high < self.init_low):
            raise ConfigurationError("init_high must be >= init_low componentwise")
        if self.max_steps < 1:
            raise ConfigurationError("max_steps must be >= 1")
        if self.ball_mode not in ("none", "fixed", "above_server"):
            raise ConfigurationError(f"unknown ball_mode {self.ball_mode!r}")
        if self.ball_mode == "fixed" and self.ball_position is None:
            raise ConfigurationError("fixed ball_mode requires ball_position")
        if self.ball_mode == "above_server" and (self.serve_height is None or self.servers is None):
            raise ConfigurationError("above_server ball_mode requires serve_height and servers")

    @property
    def competitive(self) -> bool:
        return self.task_id in COMPETITIVE_TASKS

    @property
    def n_teams(self) -> int:
        return len(set(self.teams))

    def team_members(self, team: int) -> list[int]:
        return [i for i, t in enumerate(self.teams) if t == team]

    @staticmethod
    def from_dict(raw: dict) -> "TaskSpec":
        raw = dict(raw)
        court_raw = raw.pop("court")
        court = CourtGeometry(
            half_length=float(court_raw["half_length"]),
            half_width=float(court_raw["half_width"]),
            net_height=float(court_raw.get("net_height", 2.43)),
        )
        defense = None
        if raw.get("defense") is not None:
            defense = DefenseConfig(**raw.pop("defense"))
        else:
            raw.pop("defense", None)
        known = {f for f in TaskSpec.__dataclass_fields__}
        extra = set(raw) - known
        if extra:
            raise ConfigurationError(f"unknown task config fields: {sorted(extra)}")
        return TaskSpec(court=court, defense=defense, **raw)

    @staticmethod
    def from_file(path) -> "TaskSpec":
        with open(path, "r", encoding="utf-8") as fh:
            return TaskSpec.from_dict(yaml.safe_load(fh))

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        out = {
            "task_id": self.task_id.value,
            "court": {
                "half_length": self.court.half_length,
                "half_width": self.court.half_width,
                "net_height": self.court.net_height,
            },
            "n_drones": self.n_drones,
            "teams": list(self.teams),
            "anchors": arr(self.anchors),
            "init_low": arr(self.init_low),
            "init_high": arr(self.init_high),
            "max_steps": self.max_steps,
            "hit_limit": self.hit_limit,
            "action_mode": self.action_mode.value,
            "shaping_enabled": self.shaping_enabled,
            "dt": self.dt,
            "gravity": self.gravity,
            "ball_mode": self.ball_mode,
            "ball_position": arr(self.ball_position),
            "serve_height": self.serve_height,
            "servers": list(self.servers) if self.servers is not None else None,
            "z_min": self.z_min,
            "remote_margin": self.remote_margin,
            "targets": arr(self.targets),
            "stay_radius": self.stay_radius,
            "stay_steps": self.stay_steps,
            "landing_plane_z": self.landing_plane_z,
            "min_bump_height": self.min_bump_height,
            "bump_height_max": self.bump_height_max,
            "pass_partner_radius": self.pass_partner_radius,
            "target_center": arr(self.target_center),
            "target_radius": self.target_radius,
            "defense": None if self.defense is None else vars(self.defense).copy(),
        }
        return {k: v for k, v in out.items() if v is not None}


_TASK_CACHE: dict = {}


def load_task(task_id, action_mode: Optional[ActionMode] = None, shaping: Optional[bool] = None) -> TaskSpec:
    """Load a shipped task preset, optionally overriding mode/shaping."""
    task_id = TaskId(task_id)
    if task_id not in _TASK_CACHE:
        ref = resources.files("dronevolley.configs.tasks").joinpath(f"{task_id.value}.yaml")
        with ref.open("r", encoding="utf-8") as fh:
            _TASK_CACHE[task_id] = TaskSpec.from_dict(yaml.safe_load(fh))
    spec = _TASK_CACHE[task_id]
    if action_mode is not None:
        spec = replace(spec, action_mode=ActionMode(action_mode))
    if shaping is not None:
        spec = replace(spec, shaping_enabled=shaping)
    return spec


def all_task_ids() -> list[TaskId]:
    return list(TaskId)
