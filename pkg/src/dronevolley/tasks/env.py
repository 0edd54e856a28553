"""Episode state and the per-step update for all nine tasks.

One step: integrate the drones (and the defense racket), resolve at most one
ball contact against the pre-flight ball, advance the ball ballistically,
update the rules/turn bookkeeping, score the reward rows, and decide
termination. Everything is driven by explicit state so episodes replay
bit-identically from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ..ball import BallParams, BallState, Region, classify_position, predict_landing, step_ball
from ..contacts import (
    DEFENSE_RACKET_ID,
    ContactEvent,
    ContactKind,
    detect_and_resolve_contacts,
)
from ..defense import DefenseConfig, InterceptPlan, RacketState, plan_intercept, step_racket
from ..drone import (
    BodyRateCommand,
    DroneParams,
    DroneState,
    RateController,
    SimulationFault,
    default_drone_params,
    step_drone,
)
from ..errors import ConfigurationError
from ..rules import (
    Outcome,
    Phase,
    RallyState,
    TaskLimits,
    Violation,
    ViolationKind,
    check_drone_violations,
    decide_outcome,
    on_event,
)
from .observations import build_observations, observation_dim
from .rewards import RewardBreakdown, SHAPING_ROWS, SHARED_ROWS, exp_kernel, within_angle
from .spec import ActionMode, TaskId, TaskSpec


@dataclass
class FlightTracker:
    """Arc bookkeeping for the ball since the most recent racket hit."""

    hitter: int
    hit_number: int
    start_point: np.ndarray
    post_velocity: np.ndarray
    max_z: float
    apex_done: bool = False
    cross_done: bool = False


@dataclass
class DefenseState:
    racket: RacketState
    plan: Optional[InterceptPlan] = None
    t_remaining: float = 0.0
    intercepted: bool = False


@dataclass
class WorldState:
    drones: list
    ball: Optional[BallState]
    rally: Optional[RallyState]
    defense: Optional[DefenseState]
    step_count: int = 0
    terminal: bool = False
    outcome: Optional[Outcome] = None
    serving_team: int = 0
    server: Optional[int] = None
    # task bookkeeping
    current_target: int = 0
    stay_count: int = 0
    target_reaches: int = 0
    turn_drone: int = 0
    hits_count: int = 0
    flight: Optional[FlightTracker] = None
    crossed_net: bool = False
    landed: bool = False
    prev_ball_position: Optional[np.ndarray] = None


@dataclass
class StepResult:
    observations: np.ndarray
    rewards: RewardBreakdown
    events: list
    violations: list
    ball_faults: list
    terminal: bool
    outcome: Optional[Outcome]


class Environment:
    """One task instance. ``reset``/``step`` drive an episode."""

    def __init__(
        self,
        spec: TaskSpec,
        drone_params: Optional[DroneParams] = None,
        ball_params: Optional[BallParams] = None,
        external_force=None,
    ):
        self.spec = spec
        self.drone_params = drone_params if drone_params is not None else default_drone_params()
        self.ball_params = ball_params if ball_params is not None else BallParams(gravity=spec.gravity)
        self.external_force = external_force
        self._rate_ctrl = RateController(self.drone_params)
        self._limits = self._build_limits()

    # ------------------------------------------------------------------ setup

    def _build_limits(self) -> TaskLimits:
        spec = self.spec
        sphere = None
        half_margin = None
        if spec.task_id == TaskId.BACK_AND_FORTH:
            center = spec.targets.mean(axis=0)
            half_span = float(np.linalg.norm(spec.targets[1] - spec.targets[0])) / 2.0
            sphere = (center, half_span + (spec.remote_margin or 1.5))
        return TaskLimits(
            z_min=spec.z_min,
            half_margin=half_margin,
            allowed_sphere=sphere,
            teammate_collision=spec.task_id in (TaskId.THREE_VS_THREE, TaskId.SIX_VS_SIX),
            net_touch=spec.task_id != TaskId.BACK_AND_FORTH,
        )

    def reset(self, seed: int, forced_serve: Optional[int] = None) -> tuple[WorldState, np.ndarray]:
        spec = self.spec
        rng = np.random.default_rng(seed)
        serving_team = int(rng.integers(0, 2)) if spec.competitive else 0
        if forced_serve is not None and spec.competitive:
            serving_team = int(forced_serve)
        drones = []
        for i in range(spec.n_drones):
            pos = rng.uniform(spec.init_low[i], spec.init_high[i])
            drones.append(DroneState.at_rest(pos, self.drone_params.n_rotors))

        ball = None
        server = None
        rally = None
        if spec.ball_mode == "fixed":
            ball = BallState(position=spec.ball_position.copy(), velocity=np.zeros(3))
        elif spec.ball_mode == "above_server":
            server = spec.servers[serving_team]
            pos = drones[server].position + np.array([0.0, 0.0, spec.serve_height])
            ball = BallState(position=pos, velocity=np.zeros(3))
        if spec.competitive:
            rally = RallyState.start(
                teams=spec.teams,
                serving_team=serving_team,
                hit_limit=spec.hit_limit,
                ball_x=float(ball.position[0]),
            )

        defense = None
        if spec.defense is not None:
            home = RacketState(
                position=np.asarray(spec.defense.home_position, dtype=float),
                radius=spec.defense.radius,
                restitution=spec.defense.restitution,
            )
            defense = DefenseState(racket=home)

        world = WorldState(
            drones=drones,
            ball=ball,
            rally=rally,
            defense=defense,
            serving_team=serving_team,
            server=server,
            prev_ball_position=None if ball is None else ball.position.copy(),
        )
        return world, build_observations(spec, world)

    # ------------------------------------------------------------------- step

    def step(self, world: WorldState, actions) -> tuple[WorldState, StepResult]:
        spec = self.spec
        if world.terminal:
            raise ConfigurationError("step() called after the episode terminated")
        actions = np.asarray(actions, dtype=float)
        if actions.shape != (spec.n_drones, 4):
            raise ConfigurationError(f"actions must have shape ({spec.n_drones}, 4)")

        # 1. drone control + integration; a numerical fault freezes the drone
        #    and counts as a crash (too-low violation)
        crashed: list[int] = []
        new_drones = []
        for i, state in enumerate(world.drones):
            if spec.action_mode == ActionMode.CTBR:
                cmd = BodyRateCommand(float(actions[i, 0]), actions[i, 1:4])
                thrusts = self._rate_ctrl(state, cmd)
            else:
                thrusts = np.clip(actions[i], 0.0, 1.0)
            ext = self.external_force(i, state) if self.external_force is not None else None
            try:
                new_drones.append(step_drone(self.drone_params, state, thrusts, spec.gravity, ext, spec.dt))
            except SimulationFault:
                crashed.append(i)
                new_drones.append(state)

        # 2. defense racket motion
        defense = world.defense
        if defense is not None:
            racket = step_racket(
                defense.racket,
                defense.plan,
                defense.t_remaining,
                spec.dt,
                spec.defense.max_step_displacement,
                spec.defense.max_step_rotation,
                home=RacketState(
                    position=np.asarray(spec.defense.home_position, dtype=float),
                    radius=spec.defense.radius,
                    restitution=spec.defense.restitution,
                ),
                contact_standoff=self.ball_params.radius,
            )
            defense = DefenseState(
                racket=racket,
                plan=defense.plan,
                t_remaining=defense.t_remaining - spec.dt if defense.plan is not None else 0.0,
                intercepted=defense.intercepted,
            )

        # 3. contacts against the pre-flight ball, then ballistic flight
        ball = world.ball
        events: list[ContactEvent] = []
        prev_ball_position = None
        if ball is not None:
            prev_ball_position = ball.position.copy()
            extra = [defense.racket.disc()] if defense is not None else []
            pairs = [(self.drone_params, d) for d in new_drones]
            ball, events = detect_and_resolve_contacts(self.ball_params, ball, pairs, spec.court, extra)
            if events and events[0].kind == ContactKind.RACKET_HIT and events[0].drone_id == DEFENSE_RACKET_ID:
                defense = replace(defense, intercepted=True, plan=None, t_remaining=0.0)
            ball = step_ball(self.ball_params, ball, spec.dt)

        step_count = world.step_count + 1
        new_world = replace(
            world,
            drones=new_drones,
            ball=ball,
            defense=defense,
            step_count=step_count,
            prev_ball_position=prev_ball_position,
        )

        # 4. drone-motion violations
        rows = [(i, spec.teams[i], self.drone_params, new_drones[i]) for i in range(spec.n_drones)]
        violations = check_drone_violations(rows, spec.court, self._limits)
        for i in crashed:
            violations.append(Violation(ViolationKind.TOO_LOW, i, spec.teams[i]))

        # 5. family bookkeeping + rewards + termination
        if spec.competitive:
            result = self._step_versus(new_world, events, violations)
        elif spec.task_id == TaskId.BACK_AND_FORTH:
            result = self._step_back_and_forth(new_world, violations)
        elif spec.task_id in (TaskId.HIT_THE_BALL, TaskId.SOLO_BUMP):
            result = self._step_single_ball(new_world, events, violations)
        elif spec.task_id == TaskId.BUMP_AND_PASS:
            result = self._step_bump_and_pass(new_world, events, violations)
        else:
            result = self._step_set_and_spike(new_world, events, violations)

        new_world, breakdown, ball_faults, outcome = result
        terminal = outcome is not None or new_world.terminal or step_count >= spec.max_steps
        new_world.terminal = terminal
        new_world.outcome = outcome

        if not spec.shaping_enabled:
            for row in SHAPING_ROWS[spec.task_id]:
                breakdown.terms.pop(row, None)

        obs = build_observations(spec, new_world)
        return new_world, StepResult(
            observations=obs,
            rewards=breakdown,
            events=events,
            violations=violations,
            ball_faults=ball_faults,
            terminal=terminal,
            outcome=outcome,
        )

    # ------------------------------------------------------------ task logic

    def _update_flight(self, world: WorldState, events) -> Optional[ContactEvent]:
        """Track the post-hit arc; returns this step's drone racket hit, if any."""
        hit = None
        for ev in events:
            if ev.kind == ContactKind.RACKET_HIT and ev.drone_id != DEFENSE_RACKET_ID:
                hit = ev
        if hit is not None:
            world.hits_count += 1
            world.flight = FlightTracker(
                hitter=hit.drone_id,
                hit_number=world.hits_count,
                start_point=hit.point.copy(),
                post_velocity=hit.post_velocity.copy(),
                max_z=float(hit.point[2]),
            )
        if world.flight is not None and world.ball is not None:
            world.flight.max_z = max(world.flight.max_z, float(world.ball.position[2]))
        return hit

    def _ball_faults(self, world: WorldState, events, *, too_low_active: bool) -> list[str]:
        """Shared ball misbehave conditions: too low, net, out of court."""
        faults = []
        ball = world.ball
        if ball is None:
            return faults
        if too_low_active and ball.position[2] < self.spec.z_min:
            faults.append("ball_too_low")
        for ev in events:
            if ev.kind == ContactKind.NET:
                faults.append("ball_net")
            if ev.kind == ContactKind.OUT_OF_BOUNDS:
                faults.append("ball_out")
        if classify_position(float(ball.position[0]), float(ball.position[1]), self.spec.court) == Region.OUT:
            faults.append("ball_out")
        return faults

    def _apex_step(self, world: WorldState) -> Optional[float]:
        """Apex height on the step the post-hit arc turns downward, else None."""
        flight = world.flight
        if flight is None or flight.apex_done or world.ball is None:
            return None
        if world.ball.velocity[2] <= 0.0:
            flight.apex_done = True
            return flight.max_z
        return None

    def _step_back_and_forth(self, world, violations):
        spec = self.spec
        rb = RewardBreakdown(spec.n_drones)
        pos = world.drones[0].position
        target = spec.targets[world.current_target]
        d = float(np.linalg.norm(pos - target))
        rb.add("dist_to_target", 0, exp_kernel(d, 0.5))
        if d <= spec.stay_radius:
            rb.add("target_stay", 0, 2.5)
            world.stay_count += 1
            if world.stay_count >= spec.stay_steps:
                world.target_reaches += 1
                world.current_target = 1 - world.current_target
                world.stay_count = 0
        else:
            world.stay_count = 0
        outcome = None
        if violations:
            rb.add("drone_misbehave", 0, -10.0)
            world.terminal = True
        return world, rb, [], outcome

    def _step_single_ball(self, world, events, violations):
        spec = self.spec
        rb = RewardBreakdown(spec.n_drones)
        pos = world.drones[0].position
        ball = world.ball
        hit = self._update_flight(world, events)
        apex = self._apex_step(world)

        if spec.task_id == TaskId.HIT_THE_BALL:
            if hit is not None and world.hits_count == 1:
                rb.add("success_hit", 0, 1.0)
            rb.add("dist_to_anchor", 0, -float(np.linalg.norm(pos - spec.anchors[0])))
            # landing measurement: first downward crossing of the metric plane after the hit
            if (
                world.hits_count >= 1
                and world.prev_ball_position is not None
                and world.prev_ball_position[2] > spec.landing_plane_z >= ball.position[2]
                and ball.velocity[2] < 0.0
            ):
                frac = (world.prev_ball_position[2] - spec.landing_plane_z) / max(
                    world.prev_ball_position[2] - ball.position[2], 1e-12
                )
                xy = world.prev_ball_position[:2] + frac * (ball.position[:2] - world.prev_ball_position[:2])
                rb.add("distance", 0, float(np.linalg.norm(xy - spec.anchors[0][:2])))
                world.landed = True
                world.terminal = True
        else:  # solo bump
            if hit is not None:
                rb.add("success_hit", 0, 1.0)
            if apex is not None and apex >= spec.min_bump_height:
                rb.add("success_height", 0, 8.0)
            d_xy = float(np.linalg.norm(ball.position[:2] - pos[:2]))
            d_z = min(abs(float(ball.position[2] - pos[2])), 10.0)
            rb.add("dist_to_ball_xy", 0, exp_kernel(d_xy, 1.0))
            rb.add("dist_to_ball_z", 0, exp_kernel(d_z, 1.0))

        for ev in events:
            if ev.kind == ContactKind.BODY_HIT:
                rb.add("wrong_hit", 0, -10.0)
                world.terminal = True
        faults = self._ball_faults(world, events, too_low_active=world.hits_count == 0 or spec.task_id == TaskId.SOLO_BUMP)
        if faults:
            rb.add("ball_misbehave", 0, -10.0)
            world.terminal = True
        if violations:
            rb.add("drone_misbehave", 0, -10.0)
            world.terminal = True
        return world, rb, faults, None

    def _step_bump_and_pass(self, world, events, violations):
        spec = self.spec
        rb = RewardBreakdown(spec.n_drones)
        both = (0, 1)
        hit = self._update_flight(world, events)
        wrong_hitter = None
        if hit is not None:
            if hit.drone_id != world.turn_drone:
                wrong_hitter = hit.drone_id
            else:
                rb.add_shared("success_hit", both, 1.0)
                world.turn_drone = 1 - world.turn_drone
                if within_angle(
                    hit.post_velocity, spec.anchors[1 - hit.drone_id] - hit.point
                ):
                    rb.add("hit_direction", hit.drone_id, 1.0)
        flight = world.flight
        if (
            flight is not None
            and not flight.cross_done
            and world.ball is not None
            and world.ball.position[2] >= spec.min_bump_height
        ):
            flight.cross_done = True
            rb.add_shared("success_cross", both, 1.0)

        mean_anchor_dist = float(
            np.mean([np.linalg.norm(world.drones[i].position - spec.anchors[i]) for i in both])
        )
        rb.add_shared("dist_to_anchor", both, -mean_anchor_dist)
        for i in both:
            d = float(np.linalg.norm(world.ball.position - world.drones[i].position))
            rb.add("dist_to_ball", i, exp_kernel(d, 0.05))

        if wrong_hitter is not None:
            rb.add("wrong_hit", wrong_hitter, -10.0)
            world.terminal = True
        for ev in events:
            if ev.kind == ContactKind.BODY_HIT:
                rb.add("wrong_hit", ev.drone_id, -10.0)
                world.terminal = True
        faults = self._ball_faults(world, events, too_low_active=True)
        if faults:
            rb.add_shared("ball_misbehave", both, -10.0)
            world.terminal = True
        for v in violations:
            rb.add("drone_misbehave", v.offender, -10.0)
        if violations:
            world.terminal = True
        return world, rb, faults, None

    def _step_set_and_spike(self, world, events, violations):
        spec = self.spec
        hard = spec.task_id == TaskId.SET_AND_SPIKE_HARD
        rb = RewardBreakdown(spec.n_drones)
        both = (0, 1)
        hits_before = world.hits_count
        hit = self._update_flight(world, events)
        wrong_hitter = None
        if hit is not None:
            expected = 0 if hits_before == 0 else 1 if hits_before == 1 else None
            if expected is None or hit.drone_id != expected:
                wrong_hitter = hit.drone_id
            else:
                rb.add_shared("success_hit", both, 5.0)
                if hit.drone_id == 1:  # the spike
                    if hit.post_velocity[2] < 0.0:
                        rb.add_shared("downward_spike", both, 5.0)
                    rb.add_shared("spike_velocity", both, max(0.0, -float(hit.post_velocity[2])))
                    aim = (
                        np.array([-spec.court.half_length / 2.0, 0.0, 0.0])
                        if hard
                        else np.array([spec.target_center[0], spec.target_center[1], 0.0])
                    )
                    if within_angle(hit.post_velocity, aim - hit.point):
                        rb.add("hit_direction", 1, 1.0)
                else:
                    if within_angle(hit.post_velocity, spec.anchors[1] - hit.point):
                        rb.add("hit_direction", 0, 1.0)
                # replan the defense on every legal hit
                if hard and world.defense is not None:
                    self._defense_replan(world)

        # one-shot net-clearing bonus
        if not world.crossed_net and world.prev_ball_position is not None and world.ball is not None:
            x0, x1 = float(world.prev_ball_position[0]), float(world.ball.position[0])
            if x0 > 0.0 >= x1 or x0 >= 0.0 > x1:
                frac = abs(x0) / max(abs(x1 - x0), 1e-12)
                z_cross = world.prev_ball_position[2] + frac * (world.ball.position[2] - world.prev_ball_position[2])
                if z_cross >= spec.court.net_height:
                    world.crossed_net = True
                    rb.add_shared("success_cross", both, 5.0)

        mean_anchor_dist = float(
            np.mean([np.linalg.norm(world.drones[i].position - spec.anchors[i]) for i in both])
        )
        rb.add_shared("dist_to_anchor", both, -mean_anchor_dist)
        for i in both:
            d = float(np.linalg.norm(world.ball.position - world.drones[i].position))
            rb.add("dist_to_ball", i, exp_kernel(d, 0.05))
        if not hard:
            land = predict_landing(world.ball, 0.0, spec.gravity)
            if land is not None:
                rb.add_shared(
                    "dist_to_target", both, exp_kernel(float(np.linalg.norm(land[0] - spec.target_center)), 2.0)
                )
            else:
                rb.add_shared("dist_to_target", both, 0.0)

        floor = next((ev for ev in events if ev.kind == ContactKind.FLOOR), None)
        if floor is not None:
            world.landed = True
            world.terminal = True
            x, y = float(floor.point[0]), float(floor.point[1])
            if not hard:
                if np.linalg.norm(np.array([x, y]) - spec.target_center) <= spec.target_radius:
                    rb.add_shared("in_target", both, 5.0)
            else:
                region = classify_position(x, y, spec.court, float(floor.pre_velocity[0]))
                if (
                    region == Region.BLUE
                    and world.hits_count >= 2
                    and not world.defense.intercepted
                ):
                    rb.add_shared("success_spike", both, 5.0)

        if wrong_hitter is not None:
            rb.add("wrong_hit", wrong_hitter, -10.0)
            world.terminal = True
        for ev in events:
            if ev.kind == ContactKind.BODY_HIT:
                rb.add("wrong_hit", ev.drone_id, -10.0)
                world.terminal = True
        faults = self._ball_faults(world, events, too_low_active=world.hits_count < 2)
        if floor is not None:
            faults = [f for f in faults if f != "ball_too_low"]
        if faults:
            rb.add_shared("ball_misbehave", both, -10.0)
            world.terminal = True
        for v in violations:
            rb.add("drone_misbehave", v.offender, -10.0)
        if violations:
            world.terminal = True
        return world, rb, faults, None

    def _defense_replan(self, world: WorldState):
        cfg = self.spec.defense
        ball = world.ball
        if ball.velocity[0] >= 0.0:
            world.defense = replace(world.defense, plan=None, t_remaining=0.0)
            return
        plan = plan_intercept(
            ball,
            cfg.intercept_height,
            np.asarray(cfg.return_target, dtype=float),
            cfg.return_flight_time,
            cfg.restitution,
            self.spec.gravity,
        )
        if plan is None or plan.p_collision[0] >= 0.0:
            world.defense = replace(world.defense, plan=None, t_remaining=0.0)
        else:
            world.defense = replace(world.defense, plan=plan, t_remaining=plan.t_pre)

    def _step_versus(self, world, events, violations):
        spec = self.spec
        rb = RewardBreakdown(spec.n_drones)
        team_size = spec.n_drones // 2
        event = events[0] if events else None

        hit = None
        if event is not None and event.kind == ContactKind.RACKET_HIT and event.drone_id != DEFENSE_RACKET_ID:
            hit = event
        prev_turn = world.rally.turn
        rally, rule_violations = on_event(world.rally, event, world.ball, spec.court)
        world.rally = rally
        if rally.turn != prev_turn:
            world.ball.hits_since_cross = 0
        all_violations = list(violations) + rule_violations

        if hit is not None and not any(
            v.kind == ViolationKind.WRONG_TURN_HIT and v.offender == hit.drone_id for v in rule_violations
        ):
            world.hits_count += 1
            world.flight = FlightTracker(
                hitter=hit.drone_id,
                hit_number=world.hits_count,
                start_point=hit.point.copy(),
                post_velocity=hit.post_velocity.copy(),
                max_z=float(hit.point[2]),
            )
            if spec.task_id == TaskId.ONE_VS_ONE:
                rb.add("success_hit", hit.drone_id, 5.0)
            else:
                team = spec.teams[hit.drone_id]
                rb.add_shared("success_hit", spec.team_members(team), 10.0)

        for i in range(spec.n_drones):
            d_ball = float(np.linalg.norm(world.ball.position - world.drones[i].position))
            rb.add("dist_to_ball", i, exp_kernel(d_ball, 0.5))
            if spec.task_id == TaskId.ONE_VS_ONE:
                rb.add("drone_out_of_court", i, exp_kernel(self._distance_outside_half(i, world), 0.2))
            else:
                d_anchor = float(np.linalg.norm(world.drones[i].position - spec.anchors[i]))
                rb.add("dist_to_anchor", i, exp_kernel(d_anchor, 0.05))

        for v in all_violations:
            if v.offender < 0:
                continue
            if v.kind in (ViolationKind.TOO_LOW, ViolationKind.CROSS_NET):
                rb.add("drone_misbehave", v.offender, -100.0)
            elif v.kind == ViolationKind.COLLISION_TEAMMATE:
                rb.add("drone_collision", v.offender, -100.0)

        floor = next((ev for ev in events if ev.kind == ContactKind.FLOOR), None)
        outcome = decide_outcome(
            world.rally, world.ball, all_violations, spec.court, floor, world.step_count, spec.max_steps
        )
        if outcome is not None and outcome.winner is not None:
            for team in (0, 1):
                value = 100.0 if team == outcome.winner else -100.0
                members = spec.team_members(team)
                if spec.task_id == TaskId.ONE_VS_ONE:
                    for m in members:
                        rb.add("win_or_lose", m, value)
                else:
                    rb.add_shared("win_or_lose", members, value)
        return world, rb, [], outcome

    def _distance_outside_half(self, i: int, world: WorldState) -> float:
        spec = self.spec
        x, y, _ = world.drones[i].position
        if spec.teams[i] == 0:
            dx = max(0.0 - x, x - spec.court.half_length, 0.0)
        else:
            dx = max(x - 0.0, -spec.court.half_length - x, 0.0)
        dy = max(abs(y) - spec.court.half_width, 0.0)
        return float(np.hypot(dx, dy))
