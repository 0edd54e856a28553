"""Per-drone observation vectors.

Frozen layout, in order: [drone root state | own position relative to the
anchor (or active target) | task extras]. Extras per task, in order:

* hit_the_ball / solo_bump: ball position relative to the drone (3), ball
  velocity (3).
* bump_and_pass / 1 vs 1: drone id one-hot (2), turn one-hot (2, whose hit is
  legal), ball relative position (3), ball velocity (3), other drone relative
  position (3).
* set_and_spike: drone id one-hot (2), hit-count one-hot (3: before the set /
  after the set / after the spike), ball relative position (3), ball velocity
  (3), other drone relative position (3).
* 3 vs 3 / 6 vs 6: ball relative position (3), ball velocity (3), team-turn
  one-hot (2), side hit-count one-hot (4: 0..3 hits used), id-within-team
  one-hot (3 or 6), hit-permission flag (1), every other drone's relative
  position (3 each, ascending drone index).

All relative quantities are world-frame differences (subject minus
reference). Under the body-rate action mode the root state drops the four
rotor throttle entries (23 -> 19).
"""

from __future__ import annotations

import numpy as np

from .spec import ActionMode, TaskId, TaskSpec

ROOT_DIM_PRT = 23
ROOT_DIM_CTBR = 19


def root_dim(mode: ActionMode) -> int:
    return ROOT_DIM_PRT if mode == ActionMode.PRT else ROOT_DIM_CTBR


def observation_dim(spec: TaskSpec) -> int:
    root = root_dim(spec.action_mode)
    tid = spec.task_id
    if tid == TaskId.BACK_AND_FORTH:
        return root + 3
    if tid in (TaskId.HIT_THE_BALL, TaskId.SOLO_BUMP):
        return root + 3 + 6
    if tid in (TaskId.BUMP_AND_PASS, TaskId.ONE_VS_ONE):
        return root + 3 + 2 + 2 + 6 + 3
    if tid in (TaskId.SET_AND_SPIKE_EASY, TaskId.SET_AND_SPIKE_HARD):
        return root + 3 + 2 + 3 + 6 + 3
    # team tasks
    team_size = spec.n_drones // 2
    return root + 3 + 6 + 2 + 4 + team_size + 1 + 3 * (spec.n_drones - 1)


def _root(state, mode: ActionMode) -> np.ndarray:
    full = state.root_state()
    return full if mode == ActionMode.PRT else full[:ROOT_DIM_CTBR]


def _onehot(index: int, size: int) -> np.ndarray:
    v = np.zeros(size)
    if 0 <= index < size:
        v[index] = 1.0
    return v


class ObsView:
    """Decoded pieces of one observation row (for scripted controllers)."""

    __slots__ = (
        "position", "orientation", "velocity", "angular_velocity", "forward", "up",
        "rel_anchor", "ball_position", "ball_velocity", "turn", "hits", "allowed",
    )

    def __init__(self, **kw):
        for name in self.__slots__:
            setattr(self, name, kw.get(name))


def decode_observation(spec: TaskSpec, row: np.ndarray) -> ObsView:
    """Rebuild world-frame quantities from a single observation row."""
    r = root_dim(spec.action_mode)
    pos = row[0:3]
    view = ObsView(
        position=pos,
        orientation=row[3:7],
        velocity=row[7:10],
        angular_velocity=row[10:13],
        forward=row[13:16],
        up=row[16:19],
        rel_anchor=row[r : r + 3],
    )
    tid = spec.task_id
    if tid == TaskId.BACK_AND_FORTH:
        return view
    k = r + 3
    if tid in (TaskId.HIT_THE_BALL, TaskId.SOLO_BUMP):
        view.ball_position = pos + row[k : k + 3]
        view.ball_velocity = row[k + 3 : k + 6]
        return view
    if tid in (TaskId.BUMP_AND_PASS, TaskId.ONE_VS_ONE):
        view.turn = int(np.argmax(row[k + 2 : k + 4]))
        view.ball_position = pos + row[k + 4 : k + 7]
        view.ball_velocity = row[k + 7 : k + 10]
        return view
    if tid in (TaskId.SET_AND_SPIKE_EASY, TaskId.SET_AND_SPIKE_HARD):
        view.hits = int(np.argmax(row[k + 2 : k + 5]))
        view.ball_position = pos + row[k + 5 : k + 8]
        view.ball_velocity = row[k + 8 : k + 11]
        return view
    team_size = spec.n_drones // 2
    view.ball_position = pos + row[k : k + 3]
    view.ball_velocity = row[k + 3 : k + 6]
    view.turn = int(np.argmax(row[k + 6 : k + 8]))
    view.hits = int(np.argmax(row[k + 8 : k + 12]))
    view.allowed = bool(row[k + 12 + team_size] > 0.5)
    return view


def build_observations(spec: TaskSpec, world) -> np.ndarray:
    """Stack every drone's observation row for the current world state."""
    n = spec.n_drones
    rows = []
    ball = world.ball
    for i in range(n):
        state = world.drones[i]
        parts = [_root(state, spec.action_mode)]
        if spec.task_id == TaskId.BACK_AND_FORTH:
            target = spec.targets[world.current_target]
            parts.append(state.position - target)
            rows.append(np.concatenate(parts))
            continue
        parts.append(state.position - spec.anchors[i])
        if spec.task_id in (TaskId.HIT_THE_BALL, TaskId.SOLO_BUMP):
            parts.append(ball.position - state.position)
            parts.append(ball.velocity.copy())
        elif spec.task_id in (TaskId.BUMP_AND_PASS, TaskId.ONE_VS_ONE):
            parts.append(_onehot(i, 2))
            turn = world.turn_drone if spec.task_id == TaskId.BUMP_AND_PASS else world.rally.turn
            parts.append(_onehot(int(turn), 2))
            parts.append(ball.position - state.position)
            parts.append(ball.velocity.copy())
            other = world.drones[1 - i]
            parts.append(other.position - state.position)
        elif spec.task_id in (TaskId.SET_AND_SPIKE_EASY, TaskId.SET_AND_SPIKE_HARD):
            parts.append(_onehot(i, 2))
            parts.append(_onehot(min(world.hits_count, 2), 3))
            parts.append(ball.position - state.position)
            parts.append(ball.velocity.copy())
            other = world.drones[1 - i]
            parts.append(other.position - state.position)
        else:  # 3 vs 3 / 6 vs 6
            rally = world.rally
            team_size = n // 2
            parts.append(ball.position - state.position)
            parts.append(ball.velocity.copy())
            parts.append(_onehot(rally.turn, 2))
            parts.append(_onehot(min(rally.hits_this_side, 3), 4))
            parts.append(_onehot(i % team_size, team_size))
            allowed = (
                spec.teams[i] == rally.turn
                and not (rally.forbid_consecutive and rally.last_hitter == i and rally.hits_this_side > 0)
                and rally.hits_this_side < rally.hit_limit
            )
            parts.append(np.array([1.0 if allowed else 0.0]))
            for j in range(n):
                if j != i:
                    parts.append(world.drones[j].position - state.position)
        rows.append(np.concatenate(parts))
    return np.stack(rows)
