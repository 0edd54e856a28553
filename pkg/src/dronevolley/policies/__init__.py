"""Policy interface, scripted drills, the hierarchical team policy, and the
registry mapping serializable references to runnable policies."""

from .base import Policy, PolicyRef, create_policy, known_policies, policy_act, register_policy
from .control import ballistic_velocity, descent_time, position_command, strike_command
from .drills import STRIKE_DEFAULTS, STRIKE_SCHEMA, DrillController, ParamSchema, Skill
from .external import ExternalPolicy, load_weights_file
from .hierarchical import Assignment, HierarchicalPolicy, TeamLayout, high_level_assign
from .scripted import (
    BumpPassPolicy,
    HoverPolicy,
    RallyPolicy,
    SetSpikePolicy,
    SingleTaskPolicy,
    default_policy_for,
)

register_policy("hover", lambda spec, controls, ref: HoverPolicy(spec, controls, ref))
register_policy("scripted", lambda spec, controls, ref: SingleTaskPolicy(spec, controls, ref))
register_policy("bump_pass", lambda spec, controls, ref: BumpPassPolicy(spec, controls, ref))
register_policy("set_spike", lambda spec, controls, ref: SetSpikePolicy(spec, controls, ref))
register_policy("rally", lambda spec, controls, ref: RallyPolicy(spec, controls, ref))
register_policy("hierarchical", lambda spec, controls, ref: HierarchicalPolicy(spec, controls, ref))
register_policy("external", lambda spec, controls, ref: ExternalPolicy(spec, controls, ref))

__all__ = [
    "Assignment",
    "BumpPassPolicy",
    "DrillController",
    "ExternalPolicy",
    "HierarchicalPolicy",
    "HoverPolicy",
    "ParamSchema",
    "Policy",
    "PolicyRef",
    "RallyPolicy",
    "STRIKE_DEFAULTS",
    "STRIKE_SCHEMA",
    "SetSpikePolicy",
    "SingleTaskPolicy",
    "Skill",
    "TeamLayout",
    "ballistic_velocity",
    "create_policy",
    "default_policy_for",
    "descent_time",
    "high_level_assign",
    "known_policies",
    "load_weights_file",
    "policy_act",
    "position_command",
    "register_policy",
    "strike_command",
]
