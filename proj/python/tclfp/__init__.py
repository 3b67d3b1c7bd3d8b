"""Aggregate power tracking of thermostatically controlled load populations."""

import json

from ._core import TclfpError, check, smoothstep, switch_logic
from ._core import default_scenario as _default_scenario
from ._core import run as _run

__all__ = ["TclfpError", "check", "default_scenario", "run", "smoothstep", "switch_logic"]


def default_scenario():
    """Benchmark scenario as a dict."""
    return json.loads(_default_scenario())


def run(scenario=None, mode="", seed=None, horizon=None):
    """Run a scenario given as a dict, JSON text or None (benchmark)."""
    if isinstance(scenario, dict):
        scenario = json.dumps(scenario)
    return _run(scenario or "", mode=mode, seed=seed, horizon=horizon)
