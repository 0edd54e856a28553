"""Contact detection and restitution response for the ball.

All contacts reflect the normal component of the relative velocity and leave
the tangential component untouched (frictionless). Simultaneous candidates
are resolved in a fixed priority order ordered racket > body > net > floor >
bounds, and at most one event is emitted per call.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .ball import BallParams, BallState, CourtGeometry
from .drone import DroneParams, DroneState

DEFENSE_RACKET_ID = -1

# generous halt box so stray balls cannot fly forever
_BOUNDS_MARGIN = 5.0
_BOUNDS_CEILING = 100.0


class ContactKind(str, Enum):
    RACKET_HIT = "racket_hit"
    BODY_HIT = "body_hit"
    FLOOR = "floor"
    NET = "net"
    OUT_OF_BOUNDS = "out_simulation_bounds"


@dataclass(frozen=True)
class ContactEvent:
    kind: ContactKind
    drone_id: Optional[int]
    point: np.ndarray
    pre_velocity: np.ndarray
    post_velocity: np.ndarray


@dataclass(frozen=True)
class Disc:
    """A rigid strike disc: drone racket or the scripted defense racket."""

    center: np.ndarray
    normal: np.ndarray  # unit
    radius: float
    velocity: np.ndarray
    restitution: float
    owner: int  # drone index, or DEFENSE_RACKET_ID


def drone_racket_disc(params: DroneParams, state: DroneState) -> Disc:
    rot = state.rotation_matrix
    return Disc(
        center=state.position + rot @ params.racket_offset_body,
        normal=rot[:, 2],
        radius=params.racket_radius,
        velocity=state.velocity,
        restitution=params.racket_restitution,
        owner=-2,  # filled by caller
    )


def reflect_on_disc(ball_params: BallParams, ball: BallState, disc: Disc) -> Optional[ContactEvent]:
    """Sphere-vs-disc test and restitution reflection.

    Contact requires the ball center within one ball radius of the disc plane
    and within (disc radius + ball radius) in-plane, while approaching. The
    combined restitution is min(disc e, ball e).
    """
    offset = ball.position - disc.center
    normal = disc.normal
    dist = float(offset @ normal)
    if dist < 0.0:
        normal = -normal
        dist = -dist
    if dist > ball_params.radius:
        return None
    in_plane = offset - (offset @ disc.normal) * disc.normal
    if float(np.linalg.norm(in_plane)) > disc.radius + ball_params.radius:
        return None
    rel_vn = float((ball.velocity - disc.velocity) @ normal)
    if rel_vn >= -1e-9:
        return None  # receding or matched velocity: no impulse, no event
    e = min(disc.restitution, ball_params.restitution)
    post = ball.velocity - (1.0 + e) * rel_vn * normal
    return ContactEvent(
        kind=ContactKind.RACKET_HIT,
        drone_id=disc.owner,
        point=ball.position.copy(),
        pre_velocity=ball.velocity.copy(),
        post_velocity=post,
    )


def _floor_contact(ball_params: BallParams, ball: BallState) -> Optional[ContactEvent]:
    if ball.position[2] > ball_params.radius or ball.velocity[2] >= 0.0:
        return None
    post = ball.velocity.copy()
    post[2] = -ball_params.restitution * post[2]
    point = ball.position.copy()
    point[2] = 0.0
    return ContactEvent(ContactKind.FLOOR, None, point, ball.velocity.copy(), post)


def _net_contact(ball_params: BallParams, ball: BallState, court: CourtGeometry) -> Optional[ContactEvent]:
    x = float(ball.position[0])
    vx = float(ball.velocity[0])
    if abs(x) > ball_params.radius:
        return None
    if x != 0.0 and x * vx >= 0.0:
        return None  # inside the slab but receding
    if x == 0.0 and vx == 0.0:
        return None
    z = float(ball.position[2])
    y = float(ball.position[1])
    if z - ball_params.radius > court.net_height or abs(y) > court.half_width:
        return None
    post = ball.velocity.copy()
    post[0] = -ball_params.restitution * post[0]
    return ContactEvent(ContactKind.NET, None, ball.position.copy(), ball.velocity.copy(), post)


def _bounds_contact(ball: BallState, court: CourtGeometry) -> Optional[ContactEvent]:
    x, y, z = ball.position
    if (
        abs(x) > 2.0 * court.half_length + _BOUNDS_MARGIN
        or abs(y) > 2.0 * court.half_width + _BOUNDS_MARGIN
        or z > _BOUNDS_CEILING
    ):
        return ContactEvent(
            ContactKind.OUT_OF_BOUNDS, None, ball.position.copy(), ball.velocity.copy(), ball.velocity.copy()
        )
    return None


def detect_and_resolve_contacts(
    ball_params: BallParams,
    ball: BallState,
    drones: Sequence[tuple[DroneParams, DroneState]],
    court: CourtGeometry,
    extra_discs: Sequence[Disc] = (),
) -> tuple[BallState, list[ContactEvent]]:
    """Resolve at most one contact for the current ball state.

    Drone rackets are tested in index order, then extra discs (defense
    racket), then body hulls, net, floor, and the simulation bounds. A racket
    hit updates the ball's rally bookkeeping; a body hit leaves the velocity
    unchanged (the rules engine penalizes it).
    """
    # rackets first
    for idx, (params, state) in enumerate(drones):
        disc = drone_racket_disc(params, state)
        disc = Disc(disc.center, disc.normal, disc.radius, disc.velocity, disc.restitution, owner=idx)
        event = reflect_on_disc(ball_params, ball, disc)
        if event is not None:
            out = ball.copy()
            out.velocity = event.post_velocity.copy()
            if idx >= 0:
                out.last_hitter = idx
                out.hits_since_cross += 1
            return out, [event]
    for disc in extra_discs:
        event = reflect_on_disc(ball_params, ball, disc)
        if event is not None:
            out = ball.copy()
            out.velocity = event.post_velocity.copy()
            return out, [event]

    # body hulls (no impulse). A ball inside the racket's capture column —
    # above the disc plane and within its in-plane reach — is on course for a
    # racket contact and must not graze the hull first.
    for idx, (params, state) in enumerate(drones):
        gap = float(np.linalg.norm(ball.position - state.position))
        if gap > ball_params.radius + params.hull_radius:
            continue
        disc = drone_racket_disc(params, state)
        offset = ball.position - disc.center
        height = float(offset @ disc.normal)
        in_plane = float(np.linalg.norm(offset - height * disc.normal))
        if height >= -ball_params.radius and in_plane <= disc.radius + ball_params.radius:
            continue
        event = ContactEvent(
            ContactKind.BODY_HIT, idx, ball.position.copy(), ball.velocity.copy(), ball.velocity.copy()
        )
        return ball, [event]

    event = _net_contact(ball_params, ball, court)
    if event is not None:
        out = ball.copy()
        out.velocity = event.post_velocity.copy()
        return out, [event]

    event = _floor_contact(ball_params, ball)
    if event is not None:
        out = ball.copy()
        out.velocity = event.post_velocity.copy()
        out.airborne = False
        return out, [event]

    event = _bounds_contact(ball, court)
    if event is not None:
        return ball, [event]

    return ball, []
