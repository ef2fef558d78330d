"""Discretization, robust torque constraints and controllable sets."""

from robust_topt.reachability.constraints import (
    StageBuild,
    StageConstraints,
    build_stage_constraints,
    cone_interval,
    nominal_u_interval,
    realized_torque,
    robust_u_interval,
    transition,
    transition_window,
    u_interval,
    worst_case_perturbation,
)
from robust_topt.reachability.grid import DiscretizationGrid
from robust_topt.reachability.interval import EMPTY, REAL_LINE, Interval
from robust_topt.reachability.io import (
    SetPlotData,
    build_plot_data,
    read_plot_data,
    read_sets_csv,
    write_plot_data,
    write_sets_csv,
)
from robust_topt.reachability.profile import (
    NominalProfile,
    greatest_control,
    profile_times,
    segment_time,
    solve_nominal_parameterization,
)
from robust_topt.reachability.sets import (
    ControllableSets,
    compute_controllable_sets,
    robust_one_step_set,
)

__all__ = [
    "EMPTY",
    "REAL_LINE",
    "ControllableSets",
    "DiscretizationGrid",
    "Interval",
    "NominalProfile",
    "SetPlotData",
    "StageBuild",
    "StageConstraints",
    "build_plot_data",
    "build_stage_constraints",
    "compute_controllable_sets",
    "cone_interval",
    "greatest_control",
    "nominal_u_interval",
    "profile_times",
    "read_plot_data",
    "read_sets_csv",
    "realized_torque",
    "robust_one_step_set",
    "robust_u_interval",
    "segment_time",
    "solve_nominal_parameterization",
    "transition",
    "transition_window",
    "u_interval",
    "worst_case_perturbation",
    "write_plot_data",
    "write_sets_csv",
]
