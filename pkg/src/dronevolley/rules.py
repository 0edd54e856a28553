"""Turn-based volleyball rules: hit legality, violations, and outcomes.

The engine is a pure state machine over contact events. The harness feeds it
one optional event per step plus the current ball state; net crossings are
inferred from the ball's side changes tracked inside the rally state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .ball import BallState, CourtGeometry, Region, classify_position
from .contacts import DEFENSE_RACKET_ID, ContactEvent, ContactKind
from .drone import DroneParams, DroneState
from .errors import ConfigurationError


class ViolationKind(str, Enum):
    CROSS_NET = "cross_net"          # drone hull crosses or touches the net plane
    WRONG_TURN_HIT = "wrong_turn_hit"
    BODY_HIT = "body_hit"
    BALL_OUT = "ball_out"
    BALL_INTO_NET = "ball_into_net"
    TOO_LOW = "too_low"
    REMOTE = "remote"
    COLLISION_TEAMMATE = "collision_teammate"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    offender: int
    team: int


class Phase(str, Enum):
    SERVE = "serve"
    RALLY = "rally"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class Outcome:
    winner: Optional[int]
    reason: str  # "ball_landed_in" | "violation:<kind>" | "timeout"

    @staticmethod
    def violation(winner: int, kind: ViolationKind) -> "Outcome":
        return Outcome(winner=winner, reason=f"violation:{kind.value}")


@dataclass
class RallyState:
    """Rules-engine bookkeeping for one rally.

    ``teams`` maps drone index to team id (0 = positive-x half, 1 = negative).
    ``ball_side`` tracks which half the ball was on at the previous step so
    net crossings can be detected; ``last_ball`` keeps the previous position
    for interpolating the crossing height.
    """

    teams: tuple[int, ...]
    serving_team: int
    hit_limit: int
    turn: int = 0
    hits_this_side: int = 0
    last_hitter: Optional[int] = None
    phase: Phase = Phase.SERVE
    ball_side: int = 0
    last_ball: Optional[np.ndarray] = None
    forbid_consecutive: bool = True

    @staticmethod
    def start(teams: Sequence[int], serving_team: int, hit_limit: int, ball_x: float) -> "RallyState":
        return RallyState(
            teams=tuple(teams),
            serving_team=serving_team,
            hit_limit=hit_limit,
            turn=serving_team,
            ball_side=0 if ball_x >= 0.0 else 1,
            forbid_consecutive=hit_limit > 1,
        )

    def team_of(self, drone: int) -> int:
        return self.teams[drone]


def on_event(
    rally: RallyState,
    event: Optional[ContactEvent],
    ball: BallState,
    court: CourtGeometry,
) -> tuple[RallyState, list[Violation]]:
    """Advance the rally by one step's event (or no event).

    Returns the updated rally plus any violations the event produced. Must
    not be called after the terminal phase.
    """
    if rally.phase == Phase.TERMINAL:
        raise ConfigurationError("rules engine received an event after the terminal phase")

    violations: list[Violation] = []

    if event is not None and event.kind == ContactKind.RACKET_HIT and event.drone_id != DEFENSE_RACKET_ID:
        hitter = event.drone_id
        team = rally.team_of(hitter)
        if team != rally.turn:
            violations.append(Violation(ViolationKind.WRONG_TURN_HIT, hitter, team))
        elif rally.hits_this_side + 1 > rally.hit_limit:
            violations.append(Violation(ViolationKind.WRONG_TURN_HIT, hitter, team))
        elif rally.forbid_consecutive and rally.last_hitter == hitter and rally.hits_this_side > 0:
            violations.append(Violation(ViolationKind.WRONG_TURN_HIT, hitter, team))
        else:
            rally = replace(
                rally,
                hits_this_side=rally.hits_this_side + 1,
                last_hitter=hitter,
                phase=Phase.RALLY,
            )
    elif event is not None and event.kind == ContactKind.BODY_HIT:
        offender = event.drone_id
        violations.append(Violation(ViolationKind.BODY_HIT, offender, rally.team_of(offender)))
    elif event is not None and event.kind == ContactKind.NET:
        offender = ball.last_hitter
        team = rally.team_of(offender) if offender is not None else rally.turn
        violations.append(Violation(ViolationKind.BALL_INTO_NET, offender if offender is not None else -1, team))
    elif event is not None and event.kind == ContactKind.OUT_OF_BOUNDS:
        offender = ball.last_hitter
        team = rally.team_of(offender) if offender is not None else rally.turn
        violations.append(Violation(ViolationKind.BALL_OUT, offender if offender is not None else -1, team))

    # net-plane crossing (side change) flips the turn and resets the count
    side_now = 0 if ball.position[0] >= 0.0 else 1
    if side_now != rally.ball_side and rally.last_ball is not None:
        x0, x1 = rally.last_ball[0], ball.position[0]
        frac = abs(x0) / max(abs(x1 - x0), 1e-12)
        z_cross = rally.last_ball[2] + frac * (ball.position[2] - rally.last_ball[2])
        y_cross = rally.last_ball[1] + frac * (ball.position[1] - rally.last_ball[1])
        if z_cross < court.net_height and abs(y_cross) <= court.half_width:
            # tunneled under the net top without a net contact
            offender = ball.last_hitter
            team = rally.team_of(offender) if offender is not None else rally.turn
            violations.append(
                Violation(ViolationKind.BALL_INTO_NET, offender if offender is not None else -1, team)
            )
        else:
            rally = replace(rally, turn=1 - rally.turn, hits_this_side=0, last_hitter=None)
    rally = replace(rally, ball_side=side_now, last_ball=ball.position.copy())
    return rally, violations


@dataclass(frozen=True)
class TaskLimits:
    """Per-task drone-motion limits used by the violation scan."""

    z_min: float = 0.3
    half_margin: Optional[float] = None      # allowed distance outside the own court half
    allowed_sphere: Optional[tuple[np.ndarray, float]] = None  # (center, radius)
    teammate_collision: bool = False
    net_touch: bool = True


def check_drone_violations(
    drones: Sequence[tuple[int, int, DroneParams, DroneState]],
    court: CourtGeometry,
    limits: TaskLimits,
) -> list[Violation]:
    """Scan drone states for motion violations.

    ``drones`` rows are (drone index, team, params, state). Too-low fires
    below z_min; remote fires outside the task's allowed region; a hull
    overlapping the net plane is reported as crossing the net; teammate hull
    overlaps produce one collision violation per drone involved.
    """
    out: list[Violation] = []
    for idx, team, params, state in drones:
        x, y, z = state.position
        if z < limits.z_min:
            out.append(Violation(ViolationKind.TOO_LOW, idx, team))
        if limits.net_touch and abs(x) < params.hull_radius:
            out.append(Violation(ViolationKind.CROSS_NET, idx, team))
        if limits.allowed_sphere is not None:
            center, radius = limits.allowed_sphere
            if float(np.linalg.norm(state.position - np.asarray(center, dtype=float))) > radius:
                out.append(Violation(ViolationKind.REMOTE, idx, team))
        elif limits.half_margin is not None:
            m = limits.half_margin
            if team == 0:
                x_ok = -m <= x <= court.half_length + m
            else:
                x_ok = -court.half_length - m <= x <= m
            y_ok = abs(y) <= court.half_width + m
            if not (x_ok and y_ok):
                out.append(Violation(ViolationKind.REMOTE, idx, team))
    if limits.teammate_collision:
        for i in range(len(drones)):
            for j in range(i + 1, len(drones)):
                idx_i, team_i, params_i, state_i = drones[i]
                idx_j, team_j, params_j, state_j = drones[j]
                if team_i != team_j:
                    continue
                gap = float(np.linalg.norm(state_i.position - state_j.position))
                if gap < params_i.hull_radius + params_j.hull_radius:
                    out.append(Violation(ViolationKind.COLLISION_TEAMMATE, idx_i, team_i))
                    out.append(Violation(ViolationKind.COLLISION_TEAMMATE, idx_j, team_j))
    return out


def decide_outcome(
    rally: RallyState,
    ball: Optional[BallState],
    violations: Sequence[Violation],
    court: CourtGeometry,
    floor_event: Optional[ContactEvent],
    step_count: int,
    max_steps: int,
) -> Optional[Outcome]:
    """Terminal decision for the current step, if any.

    Any catalog violation awards the point to the opposing team immediately.
    A floor contact inside a court half awards the point to the other team;
    a floor contact out of court is an out-ball violation by the last hitter.
    Reaching the step limit without a decision is a timeout draw.
    """
    if violations:
        v = violations[0]
        return Outcome.violation(winner=1 - v.team, kind=v.kind)
    if floor_event is not None and ball is not None:
        x, y = float(floor_event.point[0]), float(floor_event.point[1])
        region = classify_position(x, y, court, float(floor_event.pre_velocity[0]))
        if region == Region.OUT:
            offender = ball.last_hitter
            team = rally.team_of(offender) if offender is not None else rally.turn
            return Outcome.violation(winner=1 - team, kind=ViolationKind.BALL_OUT)
        landed_team = 0 if region == Region.RED else 1
        return Outcome(winner=1 - landed_team, reason="ball_landed_in")
    if step_count >= max_steps:
        return Outcome(winner=None, reason="timeout")
    return None
