"""Parameterized scripted drills: Hover, Serve, Pass, Set, Attack, plus the
bump/return variants used by the single-drone tasks and the 1 vs 1 policy.

Every strike drill follows the same stateless per-step recipe: predict where
the falling ball crosses the drill's contact height, stage underneath it, and
in the final fraction of a second tilt onto the contact normal and track the
racket velocity that realizes the desired outgoing ball velocity under the
restitution exchange. Aim points differ per drill.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..drone import DroneParams
from ..errors import ConfigurationError
from ..geometry import unit
from .control import ballistic_velocity, descent_time, position_command, strike_command


@dataclass(frozen=True)
class ParamSchema:
    """Named, bounded flat parameter vector for one drill family."""

    names: tuple[str, ...]
    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "low", np.asarray(self.low, dtype=float))
        object.__setattr__(self, "high", np.asarray(self.high, dtype=float))
        if self.low.shape != self.high.shape or self.low.shape != (len(self.names),):
            raise ConfigurationError("schema bounds must match the name list")
        if not np.all(np.isfinite(self.low)) or not np.all(np.isfinite(self.high)):
            raise ConfigurationError("schema bounds must be finite")

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.low + self.high)

    def clip(self, vec: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(vec, dtype=float), self.low, self.high)

    def named(self, vec: np.ndarray) -> dict:
        return dict(zip(self.names, np.asarray(vec, dtype=float)))


STRIKE_SCHEMA = ParamSchema(
    names=(
        "kp",             # position loop gain
        "kd",             # velocity damping
        "k_att",          # attitude gain
        "contact_offset", # contact height above the drill's base altitude (m)
        "strike_time",    # seconds-to-contact when the strike posture begins
        "position_time",  # seconds-to-contact when staging begins
        "loft_time",      # outgoing flight time for lofted deliveries (s)
        "attack_time",    # outgoing flight time for spikes (s)
        "aim_depth",      # fraction of the opponent half depth to aim at
        "aim_lateral",    # fraction of the half width for sided attacks
    ),
    low=np.array([2.0, 1.0, 2.0, 0.2, 0.15, 1.0, 0.8, 0.3, 0.2, 0.0]),
    high=np.array([12.0, 8.0, 16.0, 1.2, 0.6, 4.0, 2.2, 1.2, 0.9, 0.9]),
)

STRIKE_DEFAULTS = STRIKE_SCHEMA.clip(
    np.array([6.0, 4.5, 9.0, 0.5, 0.45, 2.5, 1.9, 0.55, 0.65, 0.5])
)

# combined drone racket / ball restitution under the default configs
_EXCHANGE_E = 0.8
_RACKET_PLANE_DROP = 0.15  # ball radius + racket mount offset: drone sits this far below the contact point

# How much of the planned lateral racket velocity is pre-staged as an offset
# upstream of the contact (the rest comes from tilt during the strike).
# Overhead-fed drills keep the approach vertical.
LATERAL_LEAD = {"serve": 0.0, "bump": 0.0}
DEFAULT_LATERAL_LEAD = 0.6


@dataclass(frozen=True)
class Skill:
    """High-level drill selector handed to a drone."""

    kind: str                      # hover | serve | pass | set | attack | bump | return
    target: Optional[np.ndarray] = None   # hover target
    receiver: Optional[int] = None        # pass/set receiver drone index
    side: Optional[int] = None            # attack side: 0 = left, 1 = right

    def __post_init__(self):
        if self.kind == "attack" and self.side not in (0, 1):
            raise ConfigurationError("attack requires side 0 or 1")
        if self.target is not None:
            object.__setattr__(self, "target", np.asarray(self.target, dtype=float))


class DrillController:
    """Executes one skill for one drone, reading only its observation view."""

    def __init__(self, spec, drone_params: DroneParams, index: int, params: np.ndarray = STRIKE_DEFAULTS):
        self.spec = spec
        self.drone_params = drone_params
        self.index = index
        self.params = STRIKE_SCHEMA.clip(params)
        self.p = STRIKE_SCHEMA.named(self.params)
        self.side_sign = 1.0 if spec.anchors[index][0] >= 0.0 else -1.0
        self.anchor = spec.anchors[index].copy()

    # -------------------------------------------------------------- aiming

    def _aim_point(self, skill: Skill, contact_xy: np.ndarray) -> tuple[np.ndarray, float]:
        """Outgoing destination and flight time for the drill."""
        court = self.spec.court
        p = self.p
        if skill.kind in ("serve", "return"):
            depth = -self.side_sign * p["aim_depth"] * court.half_length
            lateral = (p["aim_lateral"] - 0.5) * court.half_width
            return np.array([depth, lateral, 0.0]), p["loft_time"]
        if skill.kind in ("pass", "set"):
            recv = self.spec.anchors[skill.receiver]
            aim = np.array([recv[0], recv[1], recv[2] + p["contact_offset"]])
            # strikes realize ~85-90% of the planned exchange: lead the lateral
            # delivery a little so the arc still arrives over the receiver
            aim[:2] += 0.15 * (aim[:2] - contact_xy)
            return aim, p["loft_time"]
        if skill.kind == "attack":
            lateral = (1.0 if skill.side == 1 else -1.0) * p["aim_lateral"] * court.half_width
            depth = -self.side_sign * p["aim_depth"] * court.half_length
            return np.array([depth, lateral, 0.0]), p["attack_time"]
        if skill.kind == "spike_at":
            return np.asarray(skill.target, dtype=float), p["attack_time"]
        if skill.kind == "bump":
            apex = self.spec.min_bump_height + 0.4 if self.spec.min_bump_height else 4.0
            return np.array([contact_xy[0], contact_xy[1], apex]), -1.0  # vertical special case
        if skill.kind == "hit_far":
            return np.array([-0.95 * court.half_length, 0.0, 2.0]), p["loft_time"]
        raise ConfigurationError(f"unknown strike drill {skill.kind!r}")

    # ------------------------------------------------------------- stepping

    def act(self, skill: Skill, view) -> "np.ndarray | None":
        """Return a body-rate command (as BodyRateCommand) for this step."""
        if skill.kind == "hover":
            target = skill.target if skill.target is not None else self.anchor
            return position_command(
                self.drone_params, view, target, kp=self.p["kp"], kd=self.p["kd"], k_att=self.p["k_att"],
                gravity=self.spec.gravity,
            )
        return self._strike_step(skill, view)

    def _strike_step(self, skill: Skill, view):
        p = self.p
        gravity = self.spec.gravity
        contact_z = self.anchor[2] + p["contact_offset"]
        hold = position_command(
            self.drone_params, view, self.anchor, kp=p["kp"], kd=p["kd"], k_att=p["k_att"], gravity=gravity
        )
        if view.ball_position is None:
            return hold
        t_c = descent_time(view.ball_position, view.ball_velocity, contact_z, gravity)
        if t_c is None or t_c > p["position_time"]:
            return hold

        contact_xy = view.ball_position[:2] + view.ball_velocity[:2] * t_c
        if contact_xy[0] * self.side_sign < -0.1:
            return hold  # the arc comes down across the net: never chase it over
        p_contact = np.array([contact_xy[0], contact_xy[1], contact_z])
        v_pre = np.array(
            [view.ball_velocity[0], view.ball_velocity[1], view.ball_velocity[2] - gravity * t_c]
        )
        aim, flight = self._aim_point(skill, contact_xy)
        if flight <= 0.0:  # vertical bump: symmetric exchange straight up
            rise = max(aim[2] - contact_z, 0.1)
            v_post = np.array([0.0, 0.0, math.sqrt(2.0 * gravity * rise)])
            # cancel incoming drift toward keeping the ball overhead
            v_post[0] = 0.3 * (self.anchor[0] - contact_xy[0])
            v_post[1] = 0.3 * (self.anchor[1] - contact_xy[1])
        else:
            v_post = ballistic_velocity(p_contact, aim, flight, gravity)
        delta = v_post - v_pre
        if float(np.linalg.norm(delta)) < 1e-9:
            return hold
        normal = unit(delta)
        if normal[2] < 0.2:  # keep the racket face broadly upward; drills do not smash straight down
            normal = unit(normal + np.array([0.0, 0.0, 0.6]))
        v_racket = (_EXCHANGE_E * v_pre + v_post) / (1.0 + _EXCHANGE_E)

        # drone position that puts the racket plane one ball radius under the contact
        stage = p_contact - _RACKET_PLANE_DROP * normal
        if t_c > p["strike_time"]:
            # wait upstream of the contact so the strike sweep carries the
            # racket through it at the planned velocity; drills fed from
            # directly overhead keep the climb vertical and let the tilt
            # supply the lateral exchange
            lateral = LATERAL_LEAD.get(skill.kind, DEFAULT_LATERAL_LEAD)
            lead = np.clip(v_racket, -3.0, 3.0) * (p["strike_time"] * 0.6)
            lead[:2] *= lateral
            if lead[2] < 0.0:
                # receding strike (spike): stage above the contact and swoop;
                # stay clear of the incoming arc while waiting
                lead[2] *= 0.8
                wait = stage - lead - np.array([0.0, 0.0, 0.05])
                wait = self._clear_of_arc(wait, view, t_c, gravity)
            else:
                lead[2] = max(0.0, lead[2])
                wait = stage - lead - np.array([0.0, 0.0, 0.05])
            return position_command(
                self.drone_params, view, wait, kp=p["kp"], kd=p["kd"], k_att=p["k_att"], gravity=gravity
            )
        return strike_command(
            self.drone_params, view, normal, v_racket, kd=max(p["kd"], 4.0), k_att=p["k_att"], gravity=gravity
        )

    def _clear_of_arc(self, wait: np.ndarray, view, t_c: float, gravity: float) -> np.ndarray:
        """Push a waiting point sideways until the ball's arc misses it."""
        ts = np.linspace(0.0, t_c, 16)
        arc = (
            view.ball_position[None, :]
            + view.ball_velocity[None, :] * ts[:, None]
            - np.array([0.0, 0.0, 0.5 * gravity]) * (ts**2)[:, None]
        )
        gap = float(np.min(np.linalg.norm(arc - wait[None, :], axis=1)))
        margin = 0.55  # hull + ball radius + slack
        if gap >= margin:
            return wait
        horiz = view.ball_velocity[:2]
        if float(np.linalg.norm(horiz)) > 0.3:
            perp = np.array([-horiz[1], horiz[0], 0.0])
        else:
            perp = np.array([0.0, 1.0, 0.0])
        perp = perp / np.linalg.norm(perp)
        return wait + perp * (margin - gap)
