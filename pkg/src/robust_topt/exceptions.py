"""Core exception hierarchy for robust-topt.

These exceptions cover configuration, path evaluation, dynamics, set
computation and simulation failures. All custom exceptions inherit from
``ToptError`` so callers may catch that base class for any library error.

Empty intervals and flagged-infeasible set results are returned as values;
only conditions that make a result meaningless are raised.
"""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any


class ToptError(Exception):
    """Base exception for all library errors."""

    def __init__(self, message: str, *, details: Mapping[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.details: Mapping[str, Any] | None = details

    def __str__(self) -> str:  # pragma: no cover - delegating to message
        return self.message


class ConfigurationError(ToptError):
    """Raised when a scenario, robot or path configuration is invalid."""


class PathDomainError(ToptError):
    """Raised when a path is evaluated outside its [0, 1] domain."""


class SplineError(ToptError):
    """Raised for unusable waypoints (too few, non-monotone, ragged)."""


class DimensionError(ToptError):
    """Raised when a vector length does not match the joint count."""


class SingularMassMatrixError(ToptError):
    """Raised when the mass matrix cannot be inverted."""


class InfeasibleProblemError(ToptError):
    """Raised when no state can robustly reach the terminal set."""

    def __init__(
        self,
        message: str,
        *,
        first_empty_stage: int | None = None,
        details: Mapping[str, Any] | None = None,
    ) -> None:
        super().__init__(message, details=details)
        self.first_empty_stage = first_empty_stage


class DegenerateProfileError(ToptError):
    """Raised when a velocity profile stalls at an interior point."""


class SimulationError(ToptError):
    """Base class for simulation failures."""


class DivergenceError(SimulationError):
    """Raised when the tracking error exceeds the divergence guard."""


class IntegratorError(SimulationError):
    """Raised when the ODE solver fails between control samples."""
