"""Peak age-of-information simulator for VRU awareness messages over C-V2X.

Compares a MEC host collocated with the radio node against a conventional
remote-cloud architecture in a single-cell, time-slotted freeway scenario.
"""
from .config import (Architecture, ScenarioConfig, calibrated_defaults, load_config,
                     validate)
from .engine import SimResult, SweepResult, run, run_pair, sweep_density, sweep_interarrival

__all__ = [
    "Architecture", "ScenarioConfig", "SimResult", "SweepResult", "calibrated_defaults",
    "load_config", "run", "run_pair", "sweep_density", "sweep_interarrival", "validate",
]
__version__ = "0.1.0"
