"""Scripted baseline policies for the single, cooperative, and 1 vs 1 tasks."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..drone import BodyRateCommand
from ..errors import ConfigurationError
from ..tasks.observations import ObsView
from ..tasks.spec import TaskId, TaskSpec
from .base import Policy, PolicyRef
from .control import descent_time
from .drills import STRIKE_DEFAULTS, STRIKE_SCHEMA, DrillController, Skill


class HoverPolicy(Policy):
    """Holds every controlled drone at its anchor. Never strikes."""

    def __init__(self, spec, controls, ref: Optional[PolicyRef] = None):
        super().__init__(spec, controls)
        self._drills = {i: DrillController(spec, self.drone_params, i) for i in self.controls}

    def _act_one(self, index, view):
        if self.spec.task_id == TaskId.BACK_AND_FORTH:
            target = view.position - view.rel_anchor  # rel is position minus target
            return self._drills[index].act(Skill("hover", target=target), view)
        return self._drills[index].act(Skill("hover"), view)


# stiffer gains for the short-fall bump drill; the long hit benefits from the
# softer default tracking
_SOLO_BUMP_TUNING = {"kp": 11.0, "kd": 6.0, "k_att": 14.0}


def _task_defaults(spec: TaskSpec) -> np.ndarray:
    params = STRIKE_DEFAULTS.copy()
    if spec.task_id == TaskId.SOLO_BUMP:
        named = STRIKE_SCHEMA.named(params)
        named.update(_SOLO_BUMP_TUNING)
        params = np.array([named[n] for n in STRIKE_SCHEMA.names])
    return params


class SingleTaskPolicy(Policy):
    """Tuned scripted behavior for the three single-drone drills."""

    def __init__(self, spec, controls, ref: Optional[PolicyRef] = None):
        super().__init__(spec, controls)
        params = np.asarray(ref.params, dtype=float) if ref is not None and ref.params else _task_defaults(spec)
        self._drill = DrillController(spec, self.drone_params, controls[0], params)

    def _act_one(self, index, view):
        tid = self.spec.task_id
        if tid == TaskId.BACK_AND_FORTH:
            target = view.position - view.rel_anchor
            return self._drill.act(Skill("hover", target=target), view)
        if tid == TaskId.SOLO_BUMP:
            return self._drill.act(Skill("bump"), view)
        if tid == TaskId.HIT_THE_BALL:
            return self._drill.act(Skill("hit_far"), view)
        raise ConfigurationError(f"single-task policy cannot run {tid}")


class BumpPassPolicy(Policy):
    """Alternating bump-pass pair: a drone strikes only on its turn."""

    def __init__(self, spec, controls, ref: Optional[PolicyRef] = None):
        super().__init__(spec, controls)
        params = np.asarray(ref.params, dtype=float) if ref is not None and ref.params else STRIKE_DEFAULTS
        self._drills = {i: DrillController(spec, self.drone_params, i, params) for i in controls}

    def _act_one(self, index, view):
        if view.turn == index:
            return self._drills[index].act(Skill("pass", receiver=1 - index), view)
        return self._drills[index].act(Skill("hover"), view)


class SetSpikePolicy(Policy):
    """Setter feeds the attacker; the attacker spikes at the task target.

    The roles want different tracking: the setter strikes a ball dropped on
    it (soft gains keep the racket level), while the attacker chases the
    delivered arc (stiff gains).
    """

    _ATTACKER_TUNING = {"kp": 11.0, "kd": 6.5, "k_att": 14.0, "contact_offset": 0.4}
    # across-the-net spikes strike higher and keep the target shallow so the
    # exchange stays feasible and the arc can clear the net
    _HARD_ATTACKER_TUNING = {"aim_depth": 0.3, "attack_time": 0.65, "aim_lateral": 0.3, "contact_offset": 0.7}

    def __init__(self, spec, controls, ref: Optional[PolicyRef] = None):
        super().__init__(spec, controls)
        if ref is not None and ref.params:
            setter = attacker = np.asarray(ref.params, dtype=float)
        else:
            setter = STRIKE_DEFAULTS
            named = STRIKE_SCHEMA.named(STRIKE_DEFAULTS)
            named.update(self._ATTACKER_TUNING)
            if spec.task_id == TaskId.SET_AND_SPIKE_HARD:
                named.update(self._HARD_ATTACKER_TUNING)
            attacker = np.array([named[n] for n in STRIKE_SCHEMA.names])
        self._drills = {
            0: DrillController(spec, self.drone_params, 0, setter),
            1: DrillController(spec, self.drone_params, 1, attacker),
        }

    def _act_one(self, index, view):
        if index == 0 and view.hits == 0:
            return self._drills[0].act(Skill("pass", receiver=1), view)
        if index == 1 and view.hits == 1:
            if self.spec.task_id == TaskId.SET_AND_SPIKE_EASY:
                # spike down at the ground target on the own half
                tgt = np.array([self.spec.target_center[0], self.spec.target_center[1], 0.0])
                return self._drills[1].act(Skill("spike_at", target=tgt), view)
            return self._drills[1].act(Skill("attack", side=0), view)
        return self._drills[index].act(Skill("hover"), view)


class RallyPolicy(Policy):
    """1 vs 1 policy: serve when it is our serve, otherwise intercept and
    return anything descending on our side. This is the family the
    best-response search tunes."""

    def __init__(self, spec, controls, ref: Optional[PolicyRef] = None):
        super().__init__(spec, controls)
        if spec.task_id != TaskId.ONE_VS_ONE:
            raise ConfigurationError("rally policy is specific to the 1 vs 1 task")
        params = np.asarray(ref.params, dtype=float) if ref is not None and ref.params else STRIKE_DEFAULTS
        self.params = STRIKE_SCHEMA.clip(params)
        index = controls[0]
        self._drill = DrillController(spec, self.drone_params, index, self.params)
        self._side_sign = 1.0 if spec.anchors[index][0] >= 0.0 else -1.0

    def _act_one(self, index, view):
        ball = view.ball_position
        if ball is None:
            return self._drill.act(Skill("hover"), view)
        contact_z = self.spec.anchors[index][2] + float(self.params[3])
        t_c = descent_time(ball, view.ball_velocity, contact_z, self.spec.gravity)
        if t_c is None:
            return self._drill.act(Skill("hover"), view)
        contact_x = float(ball[0] + view.ball_velocity[0] * t_c)
        if contact_x * self._side_sign <= 0.0:
            return self._drill.act(Skill("hover"), view)  # arc comes down on the far side
        # position for anything descending onto this half; the contact itself
        # can only happen once the ball is here (and the turn with it)
        return self._drill.act(Skill("return"), view)


def default_policy_for(spec: TaskSpec) -> str:
    """Shipped scripted policy kind appropriate for the task."""
    tid = spec.task_id
    if tid in (TaskId.BACK_AND_FORTH, TaskId.HIT_THE_BALL, TaskId.SOLO_BUMP):
        return "scripted"
    if tid == TaskId.BUMP_AND_PASS:
        return "bump_pass"
    if tid in (TaskId.SET_AND_SPIKE_EASY, TaskId.SET_AND_SPIKE_HARD):
        return "set_spike"
    if tid == TaskId.ONE_VS_ONE:
        return "rally"
    return "hierarchical"
