"""Policy interface and registry.

A policy controls a fixed set of drone indices (one side of a competitive
task, or every drone in the single/cooperative tasks). Policies see only the
per-drone observation rows plus racket-hit events forwarded by the harness,
and draw randomness from a seed handed to ``reset`` so episodes replay
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..drone import BodyRateCommand, DroneParams, DroneState, RateController, default_drone_params
from ..errors import ConfigurationError
from ..tasks.observations import ObsView, decode_observation
from ..tasks.spec import ActionMode, TaskSpec


class Policy:
    """Base class; subclasses fill in ``_act_rows``."""

    def __init__(self, spec: TaskSpec, controls: Sequence[int], drone_params: Optional[DroneParams] = None):
        self.spec = spec
        self.controls = list(controls)
        self.drone_params = drone_params if drone_params is not None else default_drone_params()
        self._rate_ctrl = RateController(self.drone_params)
        self.rng = np.random.default_rng(0)

    def reset(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def notify_event(self, event):
        """Racket-hit events from the harness (event-driven policies override)."""

    def act(self, obs_rows: np.ndarray) -> np.ndarray:
        actions = np.zeros((len(self.controls), 4))
        for k, index in enumerate(self.controls):
            view = decode_observation(self.spec, obs_rows[k])
            cmd = self._act_one(index, view)
            actions[k] = self._to_action(view, cmd)
        return actions

    def _act_one(self, index: int, view: ObsView) -> BodyRateCommand:
        raise NotImplementedError

    def _to_action(self, view: ObsView, cmd: BodyRateCommand) -> np.ndarray:
        if self.spec.action_mode == ActionMode.CTBR:
            return np.concatenate([[cmd.collective_thrust], cmd.body_rates])
        pseudo = DroneState(
            position=view.position.copy(),
            orientation=view.orientation.copy(),
            velocity=view.velocity.copy(),
            angular_velocity=view.angular_velocity.copy(),
            rotor_thrusts=np.zeros(self.drone_params.n_rotors),
        )
        return self._rate_ctrl(pseudo, cmd)


@dataclass(frozen=True)
class PolicyRef:
    """Serializable policy reference: registry kind plus optional parameters."""

    kind: str
    params: Optional[tuple] = None
    path: Optional[str] = None

    def label(self) -> str:
        return self.kind if self.params is None else f"{self.kind}[{len(self.params)}p]"

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.params is not None:
            out["params"] = list(self.params)
        if self.path is not None:
            out["path"] = self.path
        return out

    @staticmethod
    def from_dict(raw) -> "PolicyRef":
        if isinstance(raw, str):
            return PolicyRef(kind=raw)
        return PolicyRef(
            kind=raw["kind"],
            params=tuple(raw["params"]) if raw.get("params") is not None else None,
            path=raw.get("path"),
        )


_REGISTRY: dict[str, Callable] = {}


def register_policy(kind: str, factory: Callable):
    """factory(spec, controls, ref) -> Policy"""
    _REGISTRY[kind] = factory


def create_policy(ref, spec: TaskSpec, controls: Sequence[int]) -> Policy:
    if isinstance(ref, str):
        ref = PolicyRef(kind=ref)
    elif isinstance(ref, dict):
        ref = PolicyRef.from_dict(ref)
    if ref.kind not in _REGISTRY:
        raise ConfigurationError(f"unknown policy kind {ref.kind!r}; known: {sorted(_REGISTRY)}")
    return _REGISTRY[ref.kind](spec, controls, ref)


def known_policies() -> list[str]:
    return sorted(_REGISTRY)


def policy_act(ref, spec: TaskSpec, controls: Sequence[int], obs_rows: np.ndarray, seed: int = 0) -> np.ndarray:
    """Uniform one-shot entry point: build, seed, and query a policy."""
    policy = create_policy(ref, spec, controls)
    policy.reset(seed)
    return policy.act(obs_rows)
