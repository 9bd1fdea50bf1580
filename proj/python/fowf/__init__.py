"""Floating wind farm power tracking simulator."""

import json as _json

from ._fowf import (
    FowfError,
    composite_score,
    default_scenario,
    find_delta_star,
    initial_deficit,
    normalize_regd_signal,
    precision_score,
    sigmoid_weight,
    wake_diameter,
)
from ._fowf import run_scenario as _run_scenario


def run_scenario(scenario, base_dir="."):
    """Run a scenario given as a dict or JSON string; returns a dict of series and the scorecard."""
    if not isinstance(scenario, str):
        scenario = _json.dumps(scenario)
    return _run_scenario(scenario, base_dir)


def load_default_scenario():
    return _json.loads(default_scenario())


__all__ = [
    "FowfError",
    "composite_score",
    "default_scenario",
    "find_delta_star",
    "initial_deficit",
    "load_default_scenario",
    "normalize_regd_signal",
    "precision_score",
    "run_scenario",
    "sigmoid_weight",
    "wake_diameter",
]
