"""Rule-based hierarchical team policy for the 3 vs 3 task.

A high-level event-driven rule assigns one drill per drone whenever the ball
is hit (and once at the serve): the serving drone serves while its teammates
hover; after any opponent hit the backward drone passes; after the backward
drone's contact the front-left drone sets; after the front-left drone's
contact the front-right drone attacks, choosing the left or right side of the
opposing court with equal probability. Assignments are constant between
events.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..contacts import DEFENSE_RACKET_ID, ContactKind
from ..errors import ConfigurationError
from ..tasks.spec import TaskId, TaskSpec
from .base import Policy, PolicyRef
from .drills import STRIKE_DEFAULTS, DrillController, Skill


@dataclass(frozen=True)
class TeamLayout:
    """Role indices for one side: derived from the anchor formation."""

    backward: int
    front_left: int
    front_right: int
    members: tuple[int, ...]
    side_sign: float

    @staticmethod
    def from_spec(spec: TaskSpec, team: int) -> "TeamLayout":
        members = spec.team_members(team)
        if len(members) != 3:
            raise ConfigurationError("the hierarchical policy needs a 3-drone side")
        anchors = {i: spec.anchors[i] for i in members}
        side_sign = 1.0 if anchors[members[0]][0] >= 0.0 else -1.0
        backward = max(members, key=lambda i: anchors[i][0] * side_sign)
        front = [i for i in members if i != backward]
        # "left" as seen facing the net: negative y for the positive-x side
        front.sort(key=lambda i: anchors[i][1] * side_sign)
        return TeamLayout(
            backward=backward,
            front_left=front[0],
            front_right=front[1],
            members=tuple(members),
            side_sign=side_sign,
        )


@dataclass(frozen=True)
class Assignment:
    skills: dict
    issued_at_event: int


def high_level_assign(
    layout: TeamLayout,
    scenario: str,
    event_ordinal: int = 0,
    attack_side: int = 0,
    server: Optional[int] = None,
) -> Assignment:
    """Skill table for one trigger.

    ``scenario`` is one of: serve (our side serves), await (their serve or
    after our attack), opponent_hit, own_first_hit, own_second_hit.
    """
    skills = {i: Skill("hover") for i in layout.members}
    if scenario == "serve":
        skills[server if server is not None else layout.backward] = Skill("serve")
    elif scenario == "opponent_hit":
        skills[layout.backward] = Skill("pass", receiver=layout.front_left)
    elif scenario == "own_first_hit":
        skills[layout.front_left] = Skill("set", receiver=layout.front_right)
    elif scenario == "own_second_hit":
        skills[layout.front_right] = Skill("attack", side=attack_side)
    elif scenario != "await":
        raise ConfigurationError(f"unknown assignment scenario {scenario!r}")
    return Assignment(skills=skills, issued_at_event=event_ordinal)


class HierarchicalPolicy(Policy):
    """Event-driven drill switching over the scripted low-level controllers."""

    def __init__(self, spec, controls, ref: Optional[PolicyRef] = None):
        super().__init__(spec, controls)
        if spec.task_id != TaskId.THREE_VS_THREE:
            raise ConfigurationError("the hierarchical policy targets the 3 vs 3 task")
        self.team = spec.teams[controls[0]]
        if any(spec.teams[i] != self.team for i in controls):
            raise ConfigurationError("hierarchical policy controls must be one team")
        self.layout = TeamLayout.from_spec(spec, self.team)
        params = np.asarray(ref.params, dtype=float) if ref is not None and ref.params else STRIKE_DEFAULTS
        self._drills = {i: DrillController(spec, self.drone_params, i, params) for i in controls}
        self._event_count = 0
        self.assignment = high_level_assign(self.layout, "await")

    def reset(self, seed: int):
        super().reset(seed)
        self._event_count = 0
        self._serving = True  # no contact yet: the next own contact is a serve
        # serve detection is observation-driven: start in the waiting stance and
        # switch to the serve stance on the first act() if the ball hangs over us
        self.assignment = None

    def notify_event(self, event):
        if event.kind != ContactKind.RACKET_HIT or event.drone_id == DEFENSE_RACKET_ID:
            return
        self._event_count += 1
        hitter = event.drone_id
        if hitter not in self.layout.members:
            self._serving = False
            self.assignment = high_level_assign(self.layout, "opponent_hit", self._event_count)
        elif self._serving:
            # our serve is on its way over: wait for the opponent
            self._serving = False
            self.assignment = high_level_assign(self.layout, "await", self._event_count)
        elif hitter == self.layout.backward:
            self.assignment = high_level_assign(self.layout, "own_first_hit", self._event_count)
        elif hitter == self.layout.front_left:
            side = int(self.rng.integers(0, 2))
            self.assignment = high_level_assign(
                self.layout, "own_second_hit", self._event_count, attack_side=side
            )
        else:
            self.assignment = high_level_assign(self.layout, "await", self._event_count)

    def _initial_assignment(self, obs_rows) -> Assignment:
        # our serve iff the ball sits directly above one of our drones
        best, best_xy = None, 0.35
        for k, index in enumerate(self.controls):
            view_row = obs_rows[k]
            from ..tasks.observations import decode_observation

            view = decode_observation(self.spec, view_row)
            if view.ball_position is None:
                continue
            dxy = float(np.linalg.norm(view.ball_position[:2] - view.position[:2]))
            above = view.ball_position[2] > view.position[2] + 0.5
            if above and dxy < best_xy:
                best, best_xy = index, dxy
        if best is None:
            return high_level_assign(self.layout, "await")
        return high_level_assign(self.layout, "serve", server=best)

    def act(self, obs_rows: np.ndarray) -> np.ndarray:
        if self.assignment is None:
            self.assignment = self._initial_assignment(obs_rows)
        return super().act(obs_rows)

    def _act_one(self, index, view):
        skill = self.assignment.skills[index]
        return self._drills[index].act(skill, view)
