"""Service layer for experiment orchestration."""

from robust_topt.service.experiment import (
    Calibration,
    ComparisonReport,
    ComparisonRow,
    ExperimentService,
    FeasibilitySweep,
    SolveReport,
    read_comparison_csv,
    write_comparison_csv,
)

__all__ = [
    "Calibration",
    "ComparisonReport",
    "ComparisonRow",
    "ExperimentService",
    "FeasibilitySweep",
    "SolveReport",
    "read_comparison_csv",
    "write_comparison_csv",
]
