"""Scripted defense racket: ballistic intercept planning and rate-limited motion.

The planner picks the point where the incoming arc descends through a preset
height, chooses the outgoing velocity that returns the ball to a target point
after a fixed flight time, and derives the racket normal, attitude, and
velocity that produce that exchange under the restitution contact model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .ball import BallState, predict_landing
from .contacts import DEFENSE_RACKET_ID, Disc
from .geometry import clamp_norm, unit

_MIN_NORMAL_DELTA = 1e-6


@dataclass
class RacketState:
    """Pose and motion of the thin defense disc. Yaw is fixed at zero."""

    position: np.ndarray
    roll: float = 0.0
    pitch: float = 0.0
    linear_velocity: np.ndarray = None
    angular_velocity: np.ndarray = None
    radius: float = 0.3
    restitution: float = 0.8

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        if self.linear_velocity is None:
            self.linear_velocity = np.zeros(3)
        if self.angular_velocity is None:
            self.angular_velocity = np.zeros(3)

    @property
    def normal(self) -> np.ndarray:
        return normal_from_angles(self.roll, self.pitch)

    def disc(self) -> Disc:
        return Disc(
            center=self.position.copy(),
            normal=self.normal,
            radius=self.radius,
            velocity=self.linear_velocity.copy(),
            restitution=self.restitution,
            owner=DEFENSE_RACKET_ID,
        )

    def copy(self) -> "RacketState":
        return RacketState(
            position=self.position.copy(),
            roll=self.roll,
            pitch=self.pitch,
            linear_velocity=self.linear_velocity.copy(),
            angular_velocity=self.angular_velocity.copy(),
            radius=self.radius,
            restitution=self.restitution,
        )


def normal_from_angles(roll: float, pitch: float) -> np.ndarray:
    """Disc normal for roll r and pitch p: [sin p cos r, -sin r, cos p cos r]."""
    return np.array(
        [
            math.sin(pitch) * math.cos(roll),
            -math.sin(roll),
            math.cos(pitch) * math.cos(roll),
        ]
    )


def angles_from_normal(n) -> tuple[float, float]:
    """Roll/pitch recovering n through normal_from_angles (needs n_z > 0)."""
    n = np.asarray(n, dtype=float)
    roll = -math.asin(max(-1.0, min(1.0, n[1])))
    pitch = math.atan2(n[0], n[2])
    return roll, pitch


@dataclass(frozen=True)
class InterceptPlan:
    p_collision: np.ndarray   # planned ball-center contact point
    n_collision: np.ndarray   # racket normal at contact (unit)
    theta_collision: tuple[float, float, float]  # (roll, pitch, 0)
    v_collision: np.ndarray   # racket velocity at contact
    t_pre: float              # time until the ball reaches the contact point
    v_ball_pre: np.ndarray
    v_ball_post: np.ndarray


def plan_intercept(
    ball: BallState,
    h_pre: float,
    p_target,
    t_post: float,
    beta: float,
    gravity: float = 9.81,
) -> Optional[InterceptPlan]:
    """Plan the racket state that returns the incoming ball to p_target.

    Contact is planned at the descending crossing of the arc with z = h_pre.
    The outgoing velocity is the ballistic solution reaching p_target after
    t_post; the racket velocity follows the restitution exchange
    v = (beta * v_pre + v_post) / (1 + beta). Returns None when the arc never
    descends through h_pre or the exchange direction is degenerate.
    """
    z0 = float(ball.position[2])
    vz = float(ball.velocity[2])
    disc = vz * vz + 2.0 * gravity * (z0 - h_pre)
    if disc < 0.0:
        return None
    t_pre = (vz + math.sqrt(disc)) / gravity
    if t_pre <= 0.0:
        return None
    p_collision = ball.position + ball.velocity * t_pre
    p_collision[2] = h_pre
    v_pre = ball.velocity.copy()
    v_pre[2] = vz - gravity * t_pre

    p_target = np.asarray(p_target, dtype=float)
    v_post = (p_target - p_collision) / t_post
    v_post[2] += 0.5 * gravity * t_post

    delta = v_post - v_pre
    if float(np.linalg.norm(delta)) < _MIN_NORMAL_DELTA:
        return None
    n = unit(delta)
    roll, pitch = angles_from_normal(n)
    v_collision = (beta * v_pre + v_post) / (1.0 + beta)
    return InterceptPlan(
        p_collision=p_collision,
        n_collision=n,
        theta_collision=(roll, pitch, 0.0),
        v_collision=v_collision,
        t_pre=t_pre,
        v_ball_pre=v_pre,
        v_ball_post=v_post,
    )


def step_racket(
    racket: RacketState,
    plan: Optional[InterceptPlan],
    t_remaining: float,
    dt: float,
    d_max: float,
    theta_max: float,
    home: Optional[RacketState] = None,
    contact_standoff: float = 0.0,
    align_time: float = 0.1,
) -> RacketState:
    """Move the racket one step toward its goal under per-step motion limits.

    With a plan, the goal is the contact pose offset by ``contact_standoff``
    along the inward normal. A static goal (zero planned contact velocity) is
    approached proportionally, covering the remaining gap over the remaining
    time, so a reachable goal is met exactly as t_remaining hits zero. A
    moving contact (nonzero planned velocity) is treated as a rendezvous: the
    gap to the moving contact point closes quadratically in the remaining
    time so the racket arrives matching the planned contact velocity. Without
    a plan the racket returns toward its home pose at the rate limits. Every
    per-step displacement and rotation is norm-clamped to d_max / theta_max;
    when time runs out with the goal unreached, the racket keeps moving
    toward it at the clamped rate (never snaps).
    """
    out = racket.copy()
    if plan is None:
        if home is None:
            out.linear_velocity = np.zeros(3)
            out.angular_velocity = np.zeros(3)
            return out
        dp = clamp_norm(home.position - racket.position, d_max)
        dang = clamp_norm(np.array([home.roll - racket.roll, home.pitch - racket.pitch]), theta_max)
    else:
        goal_p = plan.p_collision - contact_standoff * plan.n_collision
        goal_ang = np.array([plan.theta_collision[0], plan.theta_collision[1]])
        ang = np.array([racket.roll, racket.pitch])
        moving = float(np.linalg.norm(plan.v_collision)) > 0.0
        if t_remaining <= dt:
            # past (or at) the contact time: hold course under the limits
            dp = clamp_norm(plan.v_collision * dt if moving else goal_p - racket.position, d_max)
            dang = clamp_norm(goal_ang - ang, theta_max)
        elif moving:
            track = goal_p - plan.v_collision * t_remaining
            gain = min(1.0, 2.0 * dt / t_remaining)
            dp = clamp_norm(plan.v_collision * dt + (track - racket.position) * gain, d_max)
            dang = clamp_norm((goal_ang - ang) * (dt / t_remaining), theta_max)
        else:
            dp = clamp_norm((goal_p - racket.position) * (dt / t_remaining), d_max)
            dang = clamp_norm((goal_ang - ang) * (dt / t_remaining), theta_max)

    out.position = racket.position + dp
    out.roll = racket.roll + float(dang[0])
    out.pitch = racket.pitch + float(dang[1])
    out.linear_velocity = dp / dt
    out.angular_velocity = np.array([dang[0] / dt, dang[1] / dt, 0.0])
    return out


@dataclass
class DefenseConfig:
    home_position: tuple = (-4.0, 0.0, 0.5)
    radius: float = 0.3
    restitution: float = 0.8
    intercept_height: float = 1.0
    return_target: tuple = (4.5, 0.0, 0.0)
    return_flight_time: float = 1.2
    max_step_displacement: float = 0.06
    max_step_rotation: float = 0.05
    align_time: float = 0.1


class DefenseRacketController:
    """Per-episode glue: replans on hits toward its half and steps the racket."""

    def __init__(self, config: DefenseConfig, ball_radius: float, gravity: float = 9.81):
        self.config = config
        self.ball_radius = ball_radius
        self.gravity = gravity
        self.home = RacketState(
            position=np.asarray(config.home_position, dtype=float),
            radius=config.radius,
            restitution=config.restitution,
        )
        self.state = self.home.copy()
        self.plan: Optional[InterceptPlan] = None
        self.t_remaining = 0.0
        self.intercepted = False

    def reset(self):
        self.state = self.home.copy()
        self.plan = None
        self.t_remaining = 0.0
        self.intercepted = False

    def consider(self, ball: BallState):
        """Replan when the ball is headed into the racket's half."""
        if ball.velocity[0] >= 0.0:
            self.plan = None
            return
        plan = plan_intercept(
            ball,
            self.config.intercept_height,
            np.asarray(self.config.return_target, dtype=float),
            self.config.return_flight_time,
            self.config.restitution,
            self.gravity,
        )
        if plan is None or plan.p_collision[0] >= 0.0:
            self.plan = None
            return
        self.plan = plan
        self.t_remaining = plan.t_pre

    def notify_contact(self):
        self.intercepted = True
        self.plan = None

    def step(self, dt: float) -> RacketState:
        self.state = step_racket(
            self.state,
            self.plan,
            self.t_remaining,
            dt,
            self.config.max_step_displacement,
            self.config.max_step_rotation,
            home=self.home,
            contact_standoff=self.ball_radius,
            align_time=self.config.align_time,
        )
        if self.plan is not None:
            self.t_remaining -= dt
        return self.state
