"""Coupled robot and path-parameterization simulation."""

from robust_topt.sim.analysis import DecayFit, exponential_decay_fit, fit_decay
from robust_topt.sim.results import (
    SimResult,
    Telemetry,
    TerminalStatus,
    read_summary_json,
    read_telemetry_csv,
    write_summary_json,
    write_telemetry_csv,
)
from robust_topt.sim.simulator import simulate
from robust_topt.sim.state import CoupledState

__all__ = [
    "CoupledState",
    "DecayFit",
    "SimResult",
    "Telemetry",
    "TerminalStatus",
    "exponential_decay_fit",
    "fit_decay",
    "read_summary_json",
    "read_telemetry_csv",
    "simulate",
    "write_summary_json",
    "write_telemetry_csv",
]
