"""Robust time-optimal path tracking for robot manipulators."""

from contextlib import suppress

from robust_topt.config.settings import ToptSettings
from robust_topt.control import (
    OSController,
    PathController,
    TOPTController,
    TrackingGains,
    TTController,
    build_controller,
)
from robust_topt.dynamics import DynamicsModel, load_model, model_from_config
from robust_topt.exceptions import (
    ConfigurationError,
    DegenerateProfileError,
    DivergenceError,
    InfeasibleProblemError,
    SimulationError,
    ToptError,
)
from robust_topt.geometry import PathSpline, load_path
from robust_topt.models import ControlMode, RobotConfig, ScenarioConfig, load_scenario
from robust_topt.reachability import (
    ControllableSets,
    DiscretizationGrid,
    Interval,
    NominalProfile,
    compute_controllable_sets,
    solve_nominal_parameterization,
)
from robust_topt.service import ExperimentService
from robust_topt.sim import SimResult, TerminalStatus, exponential_decay_fit, simulate

# Auto-initialize logging from config on package import (best-effort)
with suppress(Exception):
    from robust_topt.config import setup_logging

    with suppress(Exception):
        setup_logging()

__version__ = "0.1.0"

__all__ = [
    # Version
    "__version__",
    # Configuration
    "ToptSettings",
    "RobotConfig",
    "ScenarioConfig",
    "ControlMode",
    "load_scenario",
    # Models
    "DynamicsModel",
    "model_from_config",
    "PathSpline",
    "load_path",
    "load_model",
    # Reachability
    "Interval",
    "DiscretizationGrid",
    "ControllableSets",
    "NominalProfile",
    "compute_controllable_sets",
    "solve_nominal_parameterization",
    # Control
    "TrackingGains",
    "PathController",
    "TOPTController",
    "OSController",
    "TTController",
    "build_controller",
    # Simulation
    "simulate",
    "SimResult",
    "TerminalStatus",
    "exponential_decay_fit",
    # Services
    "ExperimentService",
    # Exceptions
    "ToptError",
    "ConfigurationError",
    "InfeasibleProblemError",
    "DegenerateProfileError",
    "SimulationError",
    "DivergenceError",
]
