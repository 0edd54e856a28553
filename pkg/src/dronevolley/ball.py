"""Ball flight, court geometry, and closed-form landing prediction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .geometry import vec3

DEFAULT_GRAVITY = 9.81


@dataclass(frozen=True)
class BallParams:
    radius: float = 0.1
    mass: float = 0.005  # carried for completeness; the restitution-only contact model never uses it
    restitution: float = 0.8
    gravity: float = DEFAULT_GRAVITY

    def __post_init__(self):
        if self.radius <= 0.0 or self.mass <= 0.0:
            raise ConfigurationError("ball radius and mass must be positive")
        if not 0.0 < self.restitution <= 1.0:
            raise ConfigurationError("ball restitution must be in (0, 1]")


@dataclass
class BallState:
    position: np.ndarray
    velocity: np.ndarray
    last_hitter: Optional[int] = None
    hits_since_cross: int = 0
    airborne: bool = True

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)

    def copy(self) -> "BallState":
        return BallState(
            position=self.position.copy(),
            velocity=self.velocity.copy(),
            last_hitter=self.last_hitter,
            hits_since_cross=self.hits_since_cross,
            airborne=self.airborne,
        )


@dataclass(frozen=True)
class CourtGeometry:
    """Rectangular court centered on the origin; the net spans x = 0."""

    half_length: float
    half_width: float
    net_height: float = 2.43

    def __post_init__(self):
        if self.half_length <= 0.0 or self.half_width <= 0.0 or self.net_height <= 0.0:
            raise ConfigurationError("court dimensions must be positive")

    def contains_xy(self, x: float, y: float) -> bool:
        # closed boundary: on-line counts as in
        return abs(x) <= self.half_length and abs(y) <= self.half_width


# Court presets: the full court is 18 m x 9 m with a 2.43 m net; the
# competitive tasks use reduced sizes (length x width): 6x3, 9x4.5, 12x6.
COURT_PRESETS = {
    "full": CourtGeometry(9.0, 4.5),
    "one_vs_one": CourtGeometry(3.0, 1.5),
    "three_vs_three": CourtGeometry(4.5, 2.25),
    "six_vs_six": CourtGeometry(6.0, 3.0),
}


class Region(str, Enum):
    RED = "red_court"      # positive x half
    BLUE = "blue_court"    # negative x half
    OUT = "out_of_court"


def step_ball(params: BallParams, ball: BallState, dt: float) -> BallState:
    """Ballistic flight update (semi-implicit Euler, gravity only)."""
    if dt <= 0.0:
        raise ConfigurationError("dt must be positive")
    velocity = ball.velocity.copy()
    velocity[2] -= params.gravity * dt
    position = ball.position + velocity * dt
    out = ball.copy()
    out.position = position
    out.velocity = velocity
    return out


def predict_landing(ball: BallState, plane_z: float, gravity: float = DEFAULT_GRAVITY):
    """Smallest t >= 0 at which the ballistic arc crosses plane_z.

    Returns (landing_xy, time) or None when the arc never reaches the plane.
    """
    z0 = float(ball.position[2])
    vz = float(ball.velocity[2])
    dz = z0 - plane_z
    if dz == 0.0:
        t = 0.0
    else:
        disc = vz * vz + 2.0 * gravity * dz
        if disc < 0.0:
            return None
        root = math.sqrt(disc)
        # roots of 0.5*g*t^2 - vz*t - dz = 0
        t_lo = (vz - root) / gravity
        t_hi = (vz + root) / gravity
        if t_lo >= 0.0:
            t = t_lo
        elif t_hi >= 0.0:
            t = t_hi
        else:
            return None
    xy = ball.position[:2] + ball.velocity[:2] * t
    return xy.copy(), t


def classify_position(x: float, y: float, court: CourtGeometry, vx: float = 0.0) -> Region:
    if not court.contains_xy(x, y):
        return Region.OUT
    if x > 0.0:
        return Region.RED
    if x < 0.0:
        return Region.BLUE
    # on the dividing line: side the ball is moving toward; stationary -> red
    return Region.RED if vx >= 0.0 else Region.BLUE


def classify_ball_region(ball: BallState, court: CourtGeometry) -> Region:
    return classify_position(float(ball.position[0]), float(ball.position[1]), court, float(ball.velocity[0]))
