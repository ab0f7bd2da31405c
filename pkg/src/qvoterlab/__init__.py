"""Multilayer 3-state q-voter opinion dynamics laboratory."""

__version__ = "0.1.0"

from .dynamics import (
    Configuration,
    OPINION_A,
    OPINION_B,
    OPINION_U,
    SimulationParams,
    run,
)
from .graphs import MultiplexNetwork, aggregate, build, read_edge_file, write_edge_file
from .harness import ExperimentSpec, run_phase1, run_phase2, summarize
from .meanfield import MfaParams, MfaState, phase_portrait, stationary_scan
from .scenarios import PRESETS, ScenarioSpec, generate_scenario, preset
from .seeding import SeedPlan, Strategy, apply_seeds, select_seeds

__all__ = [
    "Configuration",
    "ExperimentSpec",
    "MfaParams",
    "MfaState",
    "MultiplexNetwork",
    "OPINION_A",
    "OPINION_B",
    "OPINION_U",
    "PRESETS",
    "ScenarioSpec",
    "SeedPlan",
    "SimulationParams",
    "Strategy",
    "aggregate",
    "apply_seeds",
    "build",
    "generate_scenario",
    "phase_portrait",
    "preset",
    "read_edge_file",
    "run",
    "run_phase1",
    "run_phase2",
    "select_seeds",
    "stationary_scan",
    "summarize",
    "write_edge_file",
]
