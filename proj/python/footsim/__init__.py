"""Python bindings for the footsim simulation core."""

import json

from ._footsim import (
    FootsimError,
    Scenario,
    Session,
    canonical_config,
    config_hash,
    evaluate,
    fsm_color,
    protocol_ids,
    replay_metrics,
    scenario_ids,
    solve_pass,
)

__all__ = [
    "FootsimError",
    "Scenario",
    "Session",
    "canonical_config",
    "config_hash",
    "evaluate",
    "fsm_color",
    "frame",
    "protocol_ids",
    "replay_metrics",
    "scenario_ids",
    "solve_pass",
]


def frame(scenario):
    """The scenario's latest frame as a dict."""
    return json.loads(scenario.frame_json())
