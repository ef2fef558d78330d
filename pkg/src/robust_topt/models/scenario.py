"""Scenario configuration model."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Self

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from robust_topt.exceptions import ConfigurationError


class ControlMode(str, Enum):
    """Path controller variants."""

    TOPT = "topt"  # robust time-optimal path tracking
    OS = "os"  # online scaling of the nominal profile
    TT = "tt"  # fixed time-indexed trajectory tracking


class ScenarioConfig(BaseModel):
    """One experiment: robot, path, discretization and run protocol.

    Attributes:
        name: Scenario identifier
        robot: Robot JSON path (relative paths resolve against the scenario file)
        path: Path JSON path
        stages: Number of stages N
        radius: Perturbation radius R used for the controllable sets
        omega: Tracking bandwidth; Kp = omega² I, Kd = 2 omega I
        terminal: Admissible terminal path velocities I_end as [lo, hi] on sqrt(x)
        start_velocity: Initial path velocity sqrt(x_0)
        initial_error: Norm of the initial joint position error (rad)
        seed: Seed for the random error direction
        runs: Number of seeded runs in a feasibility sweep
        modes: Controllers compared by ``compare``
        plant_mass_scale: Mass/inertia multiplier of the simulated plant
        dt_control: Optional override of the control sample time (s)
        output_dir: Directory for CSV/JSON artifacts
        error_radius_calibrated: Largest initial-error norm with no infeasible
            TOPT run, as last recorded by ``calibrate``
    """

    name: str = "scenario"
    robot: Path
    path: Path
    stages: int = Field(100, ge=2)
    radius: float = Field(0.5, ge=0.0)
    omega: float = Field(20.0, gt=0.0)
    terminal: tuple[float, float] = (0.0, 0.0)
    start_velocity: float = Field(0.0, ge=0.0)
    initial_error: float = Field(0.1, ge=0.0)
    seed: int = 0
    runs: int = Field(100, ge=1)
    modes: list[ControlMode] = Field(
        default_factory=lambda: [ControlMode.TOPT, ControlMode.OS, ControlMode.TT]
    )
    plant_mass_scale: float = Field(1.0, gt=0.0)
    dt_control: float | None = Field(None, gt=0.0)
    output_dir: Path = Path("runs")
    error_radius_calibrated: float | None = Field(None, ge=0.0)

    @field_validator("terminal")
    @classmethod
    def validate_terminal(cls, v: tuple[float, float]) -> tuple[float, float]:
        """Require 0 <= lo <= hi."""
        lo, hi = v
        if lo < 0 or hi < lo:
            raise ValueError(f"terminal interval must satisfy 0 <= lo <= hi, got {v}")
        return v

    @model_validator(mode="after")
    def validate_modes(self) -> Self:
        """Reject empty or duplicated mode lists."""
        if not self.modes:
            raise ValueError("at least one controller mode is required")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("controller modes must be unique")
        return self

    @property
    def terminal_squared(self) -> tuple[float, float]:
        """Terminal set X_f on the squared velocity."""
        return self.terminal[0] ** 2, self.terminal[1] ** 2

    def resolve(self, base_dir: Path) -> ScenarioConfig:
        """Return a copy with robot/path paths made absolute against ``base_dir``."""
        update: dict[str, Any] = {}
        for key in ("robot", "path"):
            value: Path = getattr(self, key)
            if not value.is_absolute():
                update[key] = (base_dir / value).resolve()
        return self.model_copy(update=update)

    def with_overrides(self, **overrides: Any) -> ScenarioConfig:
        """Apply CLI overrides, ignoring ``None`` values, and re-validate."""
        update = {k: v for k, v in overrides.items() if v is not None}
        if not update:
            return self
        try:
            return ScenarioConfig.model_validate({**self.model_dump(), **update})
        except ValidationError as e:
            raise ConfigurationError("Invalid scenario override", details={"errors": e.errors()})


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Load a scenario YAML file and resolve its relative file references."""
    scenario_path = Path(path)
    try:
        raw = yaml.safe_load(scenario_path.read_text(encoding="utf-8")) or {}
    except FileNotFoundError:
        raise ConfigurationError(f"Scenario file not found: {scenario_path}")
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML in {scenario_path}: {e}")
    try:
        scenario = ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(
            f"Invalid scenario {scenario_path}", details={"errors": e.errors()}
        )
    return scenario.resolve(scenario_path.parent)


def record_calibration(path: str | Path, error_norm: float) -> None:
    """Store ``error_norm`` as ``error_radius_calibrated`` in the scenario YAML.

    Other keys keep their values and order; YAML comments are not preserved.
    """
    scenario_path = Path(path)
    try:
        raw = yaml.safe_load(scenario_path.read_text(encoding="utf-8")) or {}
    except FileNotFoundError:
        raise ConfigurationError(f"Scenario file not found: {scenario_path}")
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML in {scenario_path}: {e}")
    raw["error_radius_calibrated"] = float(error_norm)
    try:
        ScenarioConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigurationError(
            f"Invalid calibration for {scenario_path}", details={"errors": e.errors()}
        )
    scenario_path.write_text(
        yaml.safe_dump(raw, sort_keys=False, allow_unicode=True), encoding="utf-8"
    )
