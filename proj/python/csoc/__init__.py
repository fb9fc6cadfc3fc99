"""Complex stochastic optimal control: numerical checks from diffusion moments to Dirac plane waves."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_scenario_json


def run_scenario(name, ini=""):
    """Run one CLI scenario in memory; returns (passed, report dict)."""
    passed, text = run_scenario_json(name, ini)
    return passed, json.loads(text)
