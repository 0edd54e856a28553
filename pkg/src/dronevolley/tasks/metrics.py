"""Per-task evaluation metrics computed from a complete episode trace."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..ball import BallState, predict_landing
from ..contacts import DEFENSE_RACKET_ID, ContactKind
from ..errors import ConfigurationError
from ..rules import Outcome
from .spec import TaskId, TaskSpec
from .trace import EpisodeTrace


@dataclass
class EpisodeMetrics:
    values: dict = field(default_factory=dict)
    outcome: Optional[Outcome] = None

    def __getitem__(self, key):
        return self.values[key]


def _racket_hits(trace: EpisodeTrace, include_defense: bool = False):
    hits = []
    for rec in trace.records:
        for ev in rec.events:
            if ev.kind == ContactKind.RACKET_HIT:
                if include_defense or ev.drone_id != DEFENSE_RACKET_ID:
                    hits.append((rec.step, ev))
    return hits


def _apex_after(trace: EpisodeTrace, start_index: int, end_index: int) -> float:
    zs = [
        float(rec.ball_position[2])
        for rec in trace.records[start_index:end_index]
        if rec.ball_position is not None
    ]
    return max(zs) if zs else float("-inf")


def _hit_record_indices(trace: EpisodeTrace) -> list[int]:
    out = []
    for i, rec in enumerate(trace.records):
        for ev in rec.events:
            if ev.kind == ContactKind.RACKET_HIT and ev.drone_id != DEFENSE_RACKET_ID:
                out.append(i)
    return out


def compute_metrics(spec: TaskSpec, trace: EpisodeTrace) -> EpisodeMetrics:
    """Evaluate the task metric(s) for one finished episode."""
    if not trace.records or not trace.records[-1].terminal:
        raise ConfigurationError("metrics require a complete episode trace")
    tid = spec.task_id
    if tid == TaskId.BACK_AND_FORTH:
        return _back_and_forth(spec, trace)
    if tid == TaskId.HIT_THE_BALL:
        return _hit_the_ball(spec, trace)
    if tid == TaskId.SOLO_BUMP:
        return _solo_bump(spec, trace)
    if tid == TaskId.BUMP_AND_PASS:
        return _bump_and_pass(spec, trace)
    if tid in (TaskId.SET_AND_SPIKE_EASY, TaskId.SET_AND_SPIKE_HARD):
        return _set_and_spike(spec, trace)
    return _versus(spec, trace)


def _back_and_forth(spec, trace):
    target_idx = 0
    stay = 0
    reaches = 0
    for rec in trace.records:
        pos = rec.drone_roots[0, :3]
        if np.linalg.norm(pos - spec.targets[target_idx]) <= spec.stay_radius:
            stay += 1
            if stay >= spec.stay_steps:
                reaches += 1
                target_idx = 1 - target_idx
                stay = 0
        else:
            stay = 0
    return EpisodeMetrics({"target_reaches": float(reaches), "round_trips": reaches // 2.0})


def _hit_the_ball(spec, trace):
    hits = _hit_record_indices(trace)
    distance = 0.0
    if hits:
        plane = spec.landing_plane_z
        found = False
        for i in range(hits[0], len(trace.records) - 1):
            a, b = trace.records[i], trace.records[i + 1]
            if a.ball_position is None or b.ball_position is None:
                continue
            if a.ball_position[2] > plane >= b.ball_position[2] and b.ball_velocity[2] < 0.0:
                frac = (a.ball_position[2] - plane) / max(a.ball_position[2] - b.ball_position[2], 1e-12)
                xy = a.ball_position[:2] + frac * (b.ball_position[:2] - a.ball_position[:2])
                distance = float(np.linalg.norm(xy - spec.anchors[0][:2]))
                found = True
                break
        if not found:
            # episode ended before the crossing: fall back to the closed-form arc
            last = trace.records[-1]
            if last.ball_position is not None:
                ball = BallState(position=last.ball_position, velocity=last.ball_velocity)
                land = predict_landing(ball, plane, spec.gravity)
                if land is not None:
                    distance = float(np.linalg.norm(land[0] - spec.anchors[0][:2]))
    return EpisodeMetrics({"landing_distance": distance, "hit": float(bool(hits))})


def _solo_bump(spec, trace):
    hit_idx = _hit_record_indices(trace)
    count = 0
    for n, i in enumerate(hit_idx):
        end = hit_idx[n + 1] if n + 1 < len(hit_idx) else len(trace.records)
        apex = _apex_after(trace, i, end)
        if spec.min_bump_height < apex <= spec.bump_height_max:
            count += 1
    return EpisodeMetrics({"bump_count": float(count), "total_hits": float(len(hit_idx))})


def _bump_and_pass(spec, trace):
    hit_idx = _hit_record_indices(trace)
    count = 0
    for n, i in enumerate(hit_idx):
        rec = trace.records[i]
        ev = next(
            e for e in rec.events if e.kind == ContactKind.RACKET_HIT and e.drone_id != DEFENSE_RACKET_ID
        )
        end = hit_idx[n + 1] if n + 1 < len(hit_idx) else len(trace.records)
        apex = _apex_after(trace, i, end)
        if apex <= spec.min_bump_height:
            continue
        partner = 1 - ev.drone_id
        ball = BallState(position=ev.point, velocity=ev.post_velocity)
        land = predict_landing(ball, float(spec.anchors[partner][2]), spec.gravity)
        if land is None:
            continue
        if np.linalg.norm(land[0] - spec.anchors[partner][:2]) <= spec.pass_partner_radius:
            count += 1
    return EpisodeMetrics({"pass_count": float(count), "total_hits": float(len(hit_idx))})


def _set_and_spike(spec, trace):
    hard = spec.task_id == TaskId.SET_AND_SPIKE_HARD
    hits = _racket_hits(trace)
    setter_hit = any(ev.drone_id == 0 for _, ev in hits)
    attacker_hit = len(hits) >= 2 and hits[1][1].drone_id == 1
    downward = attacker_hit and float(hits[1][1].post_velocity[2]) < 0.0
    final = False
    floor = None
    for rec in trace.records:
        for ev in rec.events:
            if ev.kind == ContactKind.FLOOR:
                floor = (rec.step, ev)
    if floor is not None:
        x, y = float(floor[1].point[0]), float(floor[1].point[1])
        if not hard:
            final = bool(
                np.linalg.norm(np.array([x, y]) - spec.target_center) <= spec.target_radius
            )
        else:
            intercepted = any(
                ev.kind == ContactKind.RACKET_HIT and ev.drone_id == DEFENSE_RACKET_ID
                for rec in trace.records
                for ev in rec.events
            )
            in_opponent = x < 0.0 and spec.court.contains_xy(x, y)
            final = attacker_hit and in_opponent and not intercepted
    components = (float(setter_hit), float(attacker_hit), float(downward), float(final))
    rate = 0.25 * sum(components)
    names = ("setter_hit", "attacker_hit", "downward_spike", "in_target" if not hard else "success_spike")
    values = dict(zip(names, components))
    values["success_rate"] = rate
    return EpisodeMetrics(values)


def _versus(spec, trace):
    outcome = trace.outcome
    values = {
        "episode_length": float(trace.length),
        "decided": float(outcome is not None and outcome.winner is not None),
    }
    if outcome is not None and outcome.winner is not None:
        values["winner"] = float(outcome.winner)
    return EpisodeMetrics(values, outcome=outcome)
