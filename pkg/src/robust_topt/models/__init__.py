"""Validated configuration models."""

from robust_topt.models.robot import (
    LinkModel,
    ModelKind,
    PathConfig,
    RobotConfig,
    WaypointModel,
    load_path_config,
    load_robot_config,
)
from robust_topt.models.scenario import (
    ControlMode,
    ScenarioConfig,
    load_scenario,
    record_calibration,
)

__all__ = [
    "ControlMode",
    "LinkModel",
    "ModelKind",
    "PathConfig",
    "RobotConfig",
    "ScenarioConfig",
    "WaypointModel",
    "load_path_config",
    "load_robot_config",
    "load_scenario",
    "record_calibration",
]
