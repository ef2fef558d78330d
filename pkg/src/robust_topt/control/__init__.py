"""Computed-torque tracking and online path controllers."""

from robust_topt.control.gains import TrackingGains
from robust_topt.control.path_controllers import (
    ControlCommand,
    ControllerState,
    OnlinePathController,
    OSController,
    PathController,
    PathDecision,
    TOPTController,
    TTController,
    build_controller,
    os_path_control,
    reference_point,
    topt_path_control,
)
from robust_topt.control.reference import ReferenceSample, TimedReference, tt_reference
from robust_topt.control.tracking import (
    DesiredState,
    clamp_torque,
    computed_torque,
    computed_torque_unclamped,
    desired_state,
    tracking_error,
)

__all__ = [
    "ControlCommand",
    "ControllerState",
    "DesiredState",
    "OnlinePathController",
    "OSController",
    "PathController",
    "PathDecision",
    "ReferenceSample",
    "TOPTController",
    "TTController",
    "TimedReference",
    "TrackingGains",
    "build_controller",
    "clamp_torque",
    "computed_torque",
    "computed_torque_unclamped",
    "desired_state",
    "os_path_control",
    "reference_point",
    "topt_path_control",
    "tracking_error",
    "tt_reference",
]
