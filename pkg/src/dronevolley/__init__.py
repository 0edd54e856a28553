"""Deterministic multi-drone volleyball simulation and evaluation toolkit."""

from .ball import BallParams, BallState, CourtGeometry, Region, classify_ball_region, predict_landing, step_ball
from .contacts import ContactEvent, ContactKind, detect_and_resolve_contacts
from .defense import InterceptPlan, RacketState, plan_intercept, step_racket
from .drone import (
    BodyRateCommand,
    DroneParams,
    DroneState,
    RateController,
    ctbr_controller,
    default_drone_params,
    rotor_wrench,
    step_drone,
)
from .errors import ConfigurationError, SimulationFault, TraceError
from .rules import Outcome, RallyState, TaskLimits, Violation, ViolationKind, check_drone_violations, decide_outcome, on_event
from .tasks import Environment, TaskId, TaskSpec, load_task

__version__ = "0.1.0"
