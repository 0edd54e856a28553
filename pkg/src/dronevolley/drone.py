"""Rigid-body quadrotor simulation.

Covers per-rotor thrust wrench accumulation, semi-implicit 6-DoF integration
with quaternion attitude, and the inner-loop controller that turns a
collective-thrust/body-rate command into per-rotor thrusts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from .errors import ConfigurationError, SimulationFault
from .geometry import quat_integrate, quat_normalize, quat_to_matrix, vec3

GRAVITY = 9.81
ROOT_STATE_DIM = 23


@dataclass(frozen=True)
class DroneParams:
    """Physical description of one quadrotor plus its strike disc.

    Rotor layout arrays are indexed consistently: position i, axis i, spin
    sign i and force-to-moment ratio i all describe the same rotor.
    """

    mass: float
    inertia_diag: np.ndarray
    rotor_positions_body: np.ndarray
    rotor_axes_body: np.ndarray
    rotor_spin_sign: np.ndarray
    force_to_moment: np.ndarray
    max_rotor_thrust: float
    racket_radius: float = 0.2
    racket_restitution: float = 0.8
    racket_offset_body: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.05]))
    hull_radius: float = 0.25

    def __post_init__(self):
        coerce = object.__setattr__
        coerce(self, "inertia_diag", np.asarray(self.inertia_diag, dtype=float))
        coerce(self, "rotor_positions_body", np.asarray(self.rotor_positions_body, dtype=float))
        coerce(self, "rotor_axes_body", np.asarray(self.rotor_axes_body, dtype=float))
        coerce(self, "rotor_spin_sign", np.asarray(self.rotor_spin_sign, dtype=float))
        coerce(self, "force_to_moment", np.asarray(self.force_to_moment, dtype=float))
        coerce(self, "racket_offset_body", np.asarray(self.racket_offset_body, dtype=float))
        self._validate()

    def _validate(self):
        if self.mass <= 0.0:
            raise ConfigurationError("drone mass must be positive")
        if self.inertia_diag.shape != (3,) or np.any(self.inertia_diag <= 0.0):
            raise ConfigurationError("inertia diagonal must be three positive values")
        n = self.rotor_positions_body.shape[0]
        if self.rotor_positions_body.shape != (n, 3) or self.rotor_axes_body.shape != (n, 3):
            raise ConfigurationError("rotor position/axis arrays must be (n, 3)")
        if self.rotor_spin_sign.shape != (n,) or self.force_to_moment.shape != (n,):
            raise ConfigurationError("rotor spin/force-to-moment arrays must be (n,)")
        signs = set(self.rotor_spin_sign.tolist())
        if signs != {1.0, -1.0} or abs(float(np.sum(self.rotor_spin_sign))) > 1e-12:
            raise ConfigurationError("rotor spin signs must balance (+1/-1 in equal numbers)")
        if self.max_rotor_thrust <= 0.0:
            raise ConfigurationError("max rotor thrust must be positive")
        if self.racket_radius <= 0.0:
            raise ConfigurationError("racket radius must be positive")
        if not 0.0 < self.racket_restitution <= 1.0:
            raise ConfigurationError("racket restitution must be in (0, 1]")
        if self.hull_radius <= 0.0:
            raise ConfigurationError("hull radius must be positive")

    @property
    def n_rotors(self) -> int:
        return self.rotor_positions_body.shape[0]

    @property
    def hover_thrust_fraction(self) -> float:
        return self.mass * GRAVITY / (self.n_rotors * self.max_rotor_thrust)

    @staticmethod
    def from_dict(raw: dict) -> "DroneParams":
        try:
            return DroneParams(
                mass=float(raw["mass"]),
                inertia_diag=raw["inertia_diag"],
                rotor_positions_body=raw["rotor_positions_body"],
                rotor_axes_body=raw["rotor_axes_body"],
                rotor_spin_sign=raw["rotor_spin_sign"],
                force_to_moment=raw["force_to_moment"],
                max_rotor_thrust=float(raw["max_rotor_thrust"]),
                racket_radius=float(raw.get("racket_radius", 0.2)),
                racket_restitution=float(raw.get("racket_restitution", 0.8)),
                racket_offset_body=raw.get("racket_offset_body", [0.0, 0.0, 0.05]),
                hull_radius=float(raw.get("hull_radius", 0.25)),
            )
        except KeyError as exc:
            raise ConfigurationError(f"drone config missing field {exc}") from exc

    @staticmethod
    def from_file(path) -> "DroneParams":
        with open(path, "r", encoding="utf-8") as fh:
            return DroneParams.from_dict(yaml.safe_load(fh))

    def to_dict(self) -> dict:
        return {
            "mass": self.mass,
            "inertia_diag": self.inertia_diag.tolist(),
            "rotor_positions_body": self.rotor_positions_body.tolist(),
            "rotor_axes_body": self.rotor_axes_body.tolist(),
            "rotor_spin_sign": self.rotor_spin_sign.tolist(),
            "force_to_moment": self.force_to_moment.tolist(),
            "max_rotor_thrust": self.max_rotor_thrust,
            "racket_radius": self.racket_radius,
            "racket_restitution": self.racket_restitution,
            "racket_offset_body": self.racket_offset_body.tolist(),
            "hull_radius": self.hull_radius,
        }


_DEFAULT_PARAMS_CACHE: dict = {}


def default_drone_params(model: str = "iris") -> DroneParams:
    """Load a packaged drone parameter file (cached)."""
    if model not in _DEFAULT_PARAMS_CACHE:
        ref = resources.files("dronevolley.configs.drones").joinpath(f"{model}.yaml")
        with ref.open("r", encoding="utf-8") as fh:
            _DEFAULT_PARAMS_CACHE[model] = DroneParams.from_dict(yaml.safe_load(fh))
    return _DEFAULT_PARAMS_CACHE[model]


@dataclass
class DroneState:
    """Full kinematic state of one drone.

    The flattened root state is 23 long: position (3), attitude quaternion
    (4), world linear velocity (3), body angular velocity (3), forward
    heading (3), up heading (3), normalized rotor thrusts (4).
    """

    position: np.ndarray
    orientation: np.ndarray
    velocity: np.ndarray
    angular_velocity: np.ndarray
    rotor_thrusts: np.ndarray

    @property
    def rotation_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)

    @property
    def heading_forward(self) -> np.ndarray:
        return self.rotation_matrix[:, 0]

    @property
    def heading_up(self) -> np.ndarray:
        return self.rotation_matrix[:, 2]

    def root_state(self) -> np.ndarray:
        rot = self.rotation_matrix
        return np.concatenate(
            [
                self.position,
                self.orientation,
                self.velocity,
                self.angular_velocity,
                rot[:, 0],
                rot[:, 2],
                self.rotor_thrusts,
            ]
        )

    def copy(self) -> "DroneState":
        return DroneState(
            position=self.position.copy(),
            orientation=self.orientation.copy(),
            velocity=self.velocity.copy(),
            angular_velocity=self.angular_velocity.copy(),
            rotor_thrusts=self.rotor_thrusts.copy(),
        )

    @staticmethod
    def at_rest(position, n_rotors: int = 4) -> "DroneState":
        return DroneState(
            position=vec3(position).copy(),
            orientation=np.array([1.0, 0.0, 0.0, 0.0]),
            velocity=np.zeros(3),
            angular_velocity=np.zeros(3),
            rotor_thrusts=np.zeros(n_rotors),
        )


@dataclass(frozen=True)
class BodyRateCommand:
    """Collective thrust (normalized to [0, 1]) plus body-rate setpoints."""

    collective_thrust: float
    body_rates: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "body_rates", np.asarray(self.body_rates, dtype=float))


def rotor_wrench(params: DroneParams, thrusts_normalized, orientation) -> tuple[np.ndarray, np.ndarray]:
    """World-frame force and body-frame torque from normalized rotor thrusts.

    Force is the rotated sum of the per-rotor thrust vectors; torque is the
    sum of thrust moment arms plus the spin-signed drag moment about each
    rotor axis. Linear in the thrusts.
    """
    t = np.asarray(thrusts_normalized, dtype=float) * params.max_rotor_thrust
    forces_body = params.rotor_axes_body * t[:, None]
    force_body = forces_body.sum(axis=0)
    torque = np.cross(params.rotor_positions_body, forces_body).sum(axis=0)
    torque = torque + ((params.rotor_spin_sign * params.force_to_moment)[:, None] * forces_body).sum(axis=0)
    force_world = quat_to_matrix(orientation) @ force_body
    return force_world, torque


def step_drone(
    params: DroneParams,
    state: DroneState,
    thrusts_normalized,
    gravity: float = GRAVITY,
    external_force=None,
    dt: float = 0.01,
) -> DroneState:
    """Advance one drone by dt with semi-implicit Euler.

    Velocity is updated first and the new velocity moves the position; the
    angular rate likewise integrates the quaternion. The returned quaternion
    is renormalized so its norm error stays below 1e-6 indefinitely.
    """
    if dt <= 0.0:
        raise ConfigurationError("dt must be positive")
    thrusts = np.clip(np.asarray(thrusts_normalized, dtype=float), 0.0, 1.0)
    force_world, torque = rotor_wrench(params, thrusts, state.orientation)

    accel = force_world / params.mass
    accel[2] -= gravity
    if external_force is not None:
        accel = accel + np.asarray(external_force, dtype=float) / params.mass

    velocity = state.velocity + accel * dt
    position = state.position + velocity * dt

    omega = state.angular_velocity
    j = params.inertia_diag
    omega_dot = (torque - np.cross(omega, j * omega)) / j
    omega = omega + omega_dot * dt
    orientation = quat_integrate(state.orientation, omega, dt)

    new = DroneState(
        position=position,
        orientation=orientation,
        velocity=velocity,
        angular_velocity=omega,
        rotor_thrusts=thrusts,
    )
    for name, value in (
        ("position", position),
        ("velocity", velocity),
        ("orientation", orientation),
        ("angular_velocity", omega),
    ):
        if not np.all(np.isfinite(value)):
            raise SimulationFault(name)
    return new


class RateController:
    """Proportional body-rate loop with a fixed rotor allocation matrix.

    Desired torque is J * K_rate * (rate command - rate), combined with the
    collective thrust and inverted through the geometric allocation matrix.
    Outputs are normalized per-rotor thrusts clipped to [0, 1].
    """

    def __init__(self, params: DroneParams, gains=(20.0, 20.0, 4.0), rate_limit: float = 6.0):
        self.params = params
        self.gains = np.asarray(gains, dtype=float)
        self.rate_limit = float(rate_limit)
        n = params.n_rotors
        alloc = np.zeros((4, n))
        for i in range(n):
            axis = params.rotor_axes_body[i]
            alloc[0, i] = axis[2]
            moment = np.cross(params.rotor_positions_body[i], axis)
            moment = moment + params.rotor_spin_sign[i] * params.force_to_moment[i] * axis
            alloc[1:, i] = moment
        if n != 4 or abs(np.linalg.det(alloc)) < 1e-9:
            raise ConfigurationError("rotor layout gives a singular allocation matrix")
        self._alloc_inv = np.linalg.inv(alloc)

    def allocation_matrix(self) -> np.ndarray:
        return np.linalg.inv(self._alloc_inv)

    def __call__(self, state: DroneState, cmd: BodyRateCommand) -> np.ndarray:
        p = self.params
        rates_cmd = np.clip(cmd.body_rates, -self.rate_limit, self.rate_limit)
        torque = p.inertia_diag * self.gains * (rates_cmd - state.angular_velocity)
        total_force = np.clip(cmd.collective_thrust, 0.0, 1.0) * p.n_rotors * p.max_rotor_thrust
        wrench = np.array([total_force, torque[0], torque[1], torque[2]])
        thrusts = self._alloc_inv @ wrench
        return np.clip(thrusts / p.max_rotor_thrust, 0.0, 1.0)


def ctbr_controller(params: DroneParams, state: DroneState, cmd: BodyRateCommand) -> np.ndarray:
    """One-shot functional form of :class:`RateController`."""
    return RateController(params)(state, cmd)


def hover_thrusts(params: DroneParams) -> np.ndarray:
    """Normalized thrusts that exactly balance gravity when level."""
    per_rotor = params.mass * GRAVITY / params.n_rotors
    return np.full(params.n_rotors, per_rotor / params.max_rotor_thrust)
