"""
CLI Module
"""

from .scenario import Scenario, load_scenario, dump_scenario, with_setting, lookup_path
from .sampling import ShotSample, monte_carlo_shots, point_rng, projection_stderr
from .engine import PointResult, ScenarioEngine
from .output import RunOutput, config_hash, read_shots
from .main import main

__all__ = [
    "Scenario",
    "load_scenario",
    "dump_scenario",
    "with_setting",
    "lookup_path",
    "ShotSample",
    "monte_carlo_shots",
    "point_rng",
    "projection_stderr",
    "PointResult",
    "ScenarioEngine",
    "RunOutput",
    "config_hash",
    "read_shots",
    "main",
]
