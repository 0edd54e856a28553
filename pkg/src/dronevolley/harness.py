"""Episode execution: seeding, batch runs, trace recording, and replay.

Per-episode seeds come from a counter-based hash of (master seed, episode
index, stream tag), so results are independent of scheduling and worker
count. Traces are line-delimited JSON with a version field; a full-verbosity
trace carries every drone root state and replays bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .contacts import ContactKind
from .errors import ConfigurationError, TraceError
from .policies import PolicyRef, create_policy
from .rules import Outcome
from .tasks import (
    Environment,
    EpisodeMetrics,
    EpisodeTrace,
    StepRecord,
    TaskSpec,
    compute_metrics,
    load_task,
)
from .tasks.spec import ActionMode

TRACE_FORMAT_VERSION = 1


def derive_seed(master_seed: int, *tags) -> int:
    """Deterministic 63-bit stream seed from the master seed and tags."""
    text = ":".join([str(int(master_seed))] + [str(t) for t in tags])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def control_groups(spec: TaskSpec) -> list[list[int]]:
    """Drone index groups, one per policy slot (one per team, or all drones)."""
    if spec.competitive:
        return [spec.team_members(0), spec.team_members(1)]
    return [list(range(spec.n_drones))]


def _as_refs(policies) -> list[PolicyRef]:
    out = []
    for p in policies:
        if isinstance(p, PolicyRef):
            out.append(p)
        elif isinstance(p, str):
            out.append(PolicyRef(kind=p))
        elif isinstance(p, dict):
            out.append(PolicyRef.from_dict(p))
        else:
            raise ConfigurationError(f"cannot interpret policy reference {p!r}")
    return out


@dataclass
class EpisodeResult:
    trace: EpisodeTrace
    metrics: EpisodeMetrics
    outcome: Optional[Outcome]


def run_episode(
    spec: TaskSpec,
    policies: Sequence,
    seed: int,
    env: Optional[Environment] = None,
    forced_serve: Optional[int] = None,
) -> EpisodeResult:
    """Run one seeded episode to termination."""
    refs = _as_refs(policies)
    groups = control_groups(spec)
    if len(refs) != len(groups):
        raise ConfigurationError(f"task needs {len(groups)} policies, got {len(refs)}")
    env = env if env is not None else Environment(spec)
    world, obs = env.reset(derive_seed(seed, "env"), forced_serve=forced_serve)
    agents = []
    for k, (ref, group) in enumerate(zip(refs, groups)):
        policy = create_policy(ref, spec, group)
        policy.reset(derive_seed(seed, "policy", k))
        agents.append((policy, group))

    trace = EpisodeTrace(task_id=spec.task_id.value, seed=seed, serving_team=world.serving_team)
    n = spec.n_drones
    while True:
        actions = np.zeros((n, 4))
        for policy, group in agents:
            actions[group] = policy.act(obs[group])
        world, res = env.step(world, actions)
        obs = res.observations
        trace.records.append(
            StepRecord(
                step=world.step_count,
                drone_roots=np.stack([d.root_state() for d in world.drones]),
                ball_position=None if world.ball is None else world.ball.position.copy(),
                ball_velocity=None if world.ball is None else world.ball.velocity.copy(),
                events=list(res.events),
                violations=list(res.violations),
                ball_faults=list(res.ball_faults),
                rewards=res.rewards.to_dict(),
                terminal=res.terminal,
            )
        )
        for ev in res.events:
            if ev.kind == ContactKind.RACKET_HIT:
                for policy, _ in agents:
                    policy.notify_event(ev)
        if res.terminal:
            break
    trace.outcome = world.outcome
    return EpisodeResult(trace=trace, metrics=compute_metrics(spec, trace), outcome=world.outcome)


# --------------------------------------------------------------------- batch


@dataclass(frozen=True)
class RunConfig:
    task: str
    policies: tuple
    n_episodes: int = 1
    seed: int = 0
    workers: int = 1
    verbosity: str = "off"  # off | events | full
    action_mode: Optional[str] = None
    shaping: Optional[bool] = None
    forced_serve: Optional[int] = None
    trace_path: Optional[str] = None

    def spec(self) -> TaskSpec:
        spec = load_task(self.task)
        if self.action_mode is not None:
            spec = replace(spec, action_mode=ActionMode(self.action_mode))
        if self.shaping is not None:
            spec = replace(spec, shaping_enabled=self.shaping)
        return spec


@dataclass
class RunAggregate:
    n_episodes: int
    metric_means: dict
    metric_stds: dict
    outcomes: dict
    per_episode: list

    def to_dict(self) -> dict:
        return {
            "n_episodes": self.n_episodes,
            "metric_means": self.metric_means,
            "metric_stds": self.metric_stds,
            "outcomes": self.outcomes,
        }


def _episode_payload(config_dict: dict, index: int):
    config = RunConfig(**config_dict)
    spec = config.spec()
    seed = derive_seed(config.seed, "episode", index)
    result = run_episode(spec, list(config.policies), seed, forced_serve=config.forced_serve)
    lines = None
    if config.verbosity != "off":
        lines = trace_lines(spec, config, seed, result, full=config.verbosity == "full")
    return index, result.metrics.values, _outcome_key(result.outcome), lines


def _outcome_key(outcome: Optional[Outcome]) -> str:
    if outcome is None:
        return "none"
    if outcome.winner is None:
        return "timeout"
    return f"team{outcome.winner}:{outcome.reason}"


def run_episodes(config: RunConfig) -> RunAggregate:
    """Run the configured batch; identical output for any worker count."""
    config_dict = vars(config).copy()
    config_dict["policies"] = tuple(
        r.to_dict() if isinstance(r, PolicyRef) else r for r in _as_refs(config.policies)
    )
    indices = list(range(config.n_episodes))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_episode_worker, [(config_dict, i) for i in indices]))
    else:
        results = [_episode_payload(config_dict, i) for i in indices]
    results.sort(key=lambda r: r[0])

    keys = sorted({k for _, values, _, _ in results for k in values})
    means, stds = {}, {}
    for k in keys:
        column = np.array([values.get(k, 0.0) for _, values, _, _ in results])
        means[k] = float(column.mean())
        stds[k] = float(column.std())
    outcomes: dict = {}
    for _, _, key, _ in results:
        outcomes[key] = outcomes.get(key, 0) + 1

    if config.trace_path is not None and config.verbosity != "off":
        with open(config.trace_path, "w", encoding="utf-8") as fh:
            for _, _, _, lines in results:
                for line in lines:
                    fh.write(line + "\n")
    return RunAggregate(
        n_episodes=config.n_episodes,
        metric_means=means,
        metric_stds=stds,
        outcomes=outcomes,
        per_episode=[values for _, values, _, _ in results],
    )


def _episode_worker(args):
    return _episode_payload(*args)


# --------------------------------------------------------------------- trace


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def trace_lines(spec: TaskSpec, config: RunConfig, seed: int, result: EpisodeResult, full: bool) -> list[str]:
    refs = [r.to_dict() for r in _as_refs(config.policies)]
    header = {
        "kind": "header",
        "format_version": TRACE_FORMAT_VERSION,
        "task": spec.task_id.value,
        "action_mode": spec.action_mode.value,
        "shaping": spec.shaping_enabled,
        "seed": seed,
        "policies": refs,
        "serving_team": result.trace.serving_team,
    }
    lines = [_dump(header)]
    for rec in result.trace.records:
        if not full and not rec.events and not rec.violations:
            continue
        row = {
            "kind": "step",
            "i": rec.step,
            "events": [
                {
                    "kind": ev.kind.value,
                    "drone": ev.drone_id,
                    "point": ev.point.tolist(),
                    "pre": ev.pre_velocity.tolist(),
                    "post": ev.post_velocity.tolist(),
                }
                for ev in rec.events
            ],
            "violations": [
                {"kind": v.kind.value, "offender": v.offender, "team": v.team} for v in rec.violations
            ],
            "ball_faults": rec.ball_faults,
            "rewards": rec.rewards,
            "terminal": rec.terminal,
        }
        if full:
            row["drones"] = rec.drone_roots.tolist()
            if rec.ball_position is not None:
                row["ball_p"] = rec.ball_position.tolist()
                row["ball_v"] = rec.ball_velocity.tolist()
        lines.append(_dump(row))
    end = {
        "kind": "end",
        "outcome": None
        if result.outcome is None
        else {"winner": result.outcome.winner, "reason": result.outcome.reason},
        "metrics": result.metrics.values,
    }
    lines.append(_dump(end))
    return lines


def read_trace(path) -> list[dict]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise TraceError(lineno, f"malformed record: {exc.msg}")
    if not rows:
        raise TraceError(1, "empty trace file")
    if rows[0].get("kind") != "header":
        raise TraceError(1, "first record must be the header")
    if rows[0].get("format_version") != TRACE_FORMAT_VERSION:
        raise TraceError(1, f"unsupported trace format version {rows[0].get('format_version')}")
    if rows[-1].get("kind") != "end":
        raise TraceError(len(rows), "trace is truncated (missing end record)")
    return rows


@dataclass
class ReplayReport:
    ok: bool
    steps_checked: int
    first_divergence: Optional[dict] = None

    def __str__(self):
        if self.ok:
            return f"replay ok: {self.steps_checked} steps match"
        d = self.first_divergence
        return f"replay DIVERGED at step {d['step']} ({d['field']}): |delta| = {d['delta']:.3e}"


def replay(path, tolerance: float = 1e-9) -> ReplayReport:
    """Re-simulate a full-verbosity trace and compare states step by step."""
    rows = read_trace(path)
    header = rows[0]
    steps = [r for r in rows if r.get("kind") == "step"]
    if not steps or "drones" not in steps[0]:
        raise TraceError(1, "replay needs a full-verbosity trace")
    spec = load_task(header["task"])
    spec = replace(spec, action_mode=ActionMode(header["action_mode"]), shaping_enabled=header["shaping"])
    config_policies = [PolicyRef.from_dict(p) for p in header["policies"]]
    result = run_episode(
        spec, config_policies, header["seed"], forced_serve=header.get("serving_team")
    )
    checked = 0
    for rec, row in zip(result.trace.records, steps):
        live = rec.drone_roots
        saved = np.asarray(row["drones"], dtype=float)
        delta = float(np.max(np.abs(live - saved))) if saved.size else 0.0
        field_name = "drone_roots"
        if "ball_p" in row and rec.ball_position is not None:
            bp = float(np.max(np.abs(rec.ball_position - np.asarray(row["ball_p"]))))
            if bp > delta:
                delta, field_name = bp, "ball_position"
        if delta > tolerance:
            return ReplayReport(
                ok=False,
                steps_checked=checked,
                first_divergence={"step": row["i"], "field": field_name, "delta": delta},
            )
        checked += 1
    if len(result.trace.records) != len(steps):
        return ReplayReport(
            ok=False,
            steps_checked=checked,
            first_divergence={"step": checked, "field": "length", "delta": float("inf")},
        )
    return ReplayReport(ok=True, steps_checked=checked)
