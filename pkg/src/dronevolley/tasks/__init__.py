"""Task suite: specifications, environment, observations, rewards, metrics."""

from .env import Environment, StepResult, WorldState
from .metrics import EpisodeMetrics, compute_metrics
from .observations import build_observations, decode_observation, observation_dim
from .rewards import REWARD_RANGES, SHAPING_ROWS, SHARED_ROWS, RewardBreakdown
from .spec import ActionMode, TaskId, TaskSpec, all_task_ids, load_task
from .trace import EpisodeTrace, StepRecord

__all__ = [
    "ActionMode",
    "Environment",
    "EpisodeMetrics",
    "EpisodeTrace",
    "REWARD_RANGES",
    "RewardBreakdown",
    "SHAPING_ROWS",
    "SHARED_ROWS",
    "StepRecord",
    "StepResult",
    "TaskId",
    "TaskSpec",
    "WorldState",
    "all_task_ids",
    "build_observations",
    "compute_metrics",
    "decode_observation",
    "load_task",
    "observation_dim",
]


def reset(spec: TaskSpec, seed: int):
    """Build a fresh world for the task (functional form)."""
    return Environment(spec).reset(seed)[0]


def observe(spec: TaskSpec, world) -> "np.ndarray":
    return build_observations(spec, world)


def metrics(spec: TaskSpec, trace: EpisodeTrace) -> EpisodeMetrics:
    return compute_metrics(spec, trace)
