"""Low-level flight commands used by the scripted drills.

All controllers emit a collective-thrust/body-rate command; the policy layer
converts it to per-rotor thrusts when the task runs in that action mode.
Everything here reads decoded observation views, never privileged state.
"""

from __future__ import annotations

import math

import numpy as np

from ..drone import BodyRateCommand, DroneParams
from ..geometry import quat_to_matrix

RATE_LIMIT = 6.0


def _tilt_rates(view, up_des: np.ndarray, k_att: float) -> np.ndarray:
    """Body rates that rotate the current up axis toward up_des (yaw held)."""
    rot = quat_to_matrix(view.orientation)
    up_body = rot.T @ up_des
    err = np.cross(np.array([0.0, 0.0, 1.0]), up_body)
    rates = k_att * err
    rates[2] = -2.0 * _yaw_of(rot)  # keep heading near zero yaw
    return np.clip(rates, -RATE_LIMIT, RATE_LIMIT)


def _yaw_of(rot: np.ndarray) -> float:
    return math.atan2(rot[1, 0], rot[0, 0])


def position_command(
    params: DroneParams,
    view,
    p_des: np.ndarray,
    v_des: np.ndarray | None = None,
    kp: float = 6.0,
    kd: float = 4.5,
    k_att: float = 8.0,
    gravity: float = 9.81,
) -> BodyRateCommand:
    """PD position hold: acceleration demand mapped to tilt + thrust."""
    if v_des is None:
        v_des = np.zeros(3)
    a_des = kp * (p_des - view.position) + kd * (v_des - view.velocity)
    a_des = np.clip(a_des, -8.0, 8.0)
    f_world = params.mass * (a_des + np.array([0.0, 0.0, gravity]))
    f_world[2] = max(f_world[2], 0.15 * params.mass * gravity)  # never command inverted flight
    norm = float(np.linalg.norm(f_world))
    up_des = f_world / norm
    rot = quat_to_matrix(view.orientation)
    thrust = float(f_world @ rot[:, 2]) / (params.n_rotors * params.max_rotor_thrust)
    return BodyRateCommand(
        collective_thrust=float(np.clip(thrust, 0.0, 1.0)),
        body_rates=_tilt_rates(view, up_des, k_att),
    )


def strike_command(
    params: DroneParams,
    view,
    normal_des: np.ndarray,
    velocity_des: np.ndarray,
    kd: float = 5.0,
    k_att: float = 10.0,
    gravity: float = 9.81,
) -> BodyRateCommand:
    """Strike posture: tilt onto the contact normal while tracking a velocity."""
    a_des = kd * (velocity_des - view.velocity)
    a_des = np.clip(a_des, -8.0, 8.0)
    f_world = params.mass * (a_des + np.array([0.0, 0.0, gravity]))
    rot = quat_to_matrix(view.orientation)
    thrust = float(f_world @ rot[:, 2]) / (params.n_rotors * params.max_rotor_thrust)
    return BodyRateCommand(
        collective_thrust=float(np.clip(thrust, 0.0, 1.0)),
        body_rates=_tilt_rates(view, normal_des, k_att),
    )


def descent_time(ball_position, ball_velocity, contact_z: float, gravity: float = 9.81):
    """Time until the arc descends through contact_z, or None if it never does."""
    z = float(ball_position[2])
    vz = float(ball_velocity[2])
    disc = vz * vz + 2.0 * gravity * (z - contact_z)
    if disc < 0.0:
        return None
    t = (vz + math.sqrt(disc)) / gravity
    return t if t > 0.0 else None


def ballistic_velocity(p_from: np.ndarray, p_to: np.ndarray, flight_time: float, gravity: float = 9.81) -> np.ndarray:
    """Launch velocity reaching p_to from p_from after flight_time."""
    v = (np.asarray(p_to, dtype=float) - np.asarray(p_from, dtype=float)) / flight_time
    v[2] += 0.5 * gravity * flight_time
    return v
