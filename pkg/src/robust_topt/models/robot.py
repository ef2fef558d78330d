"""Robot and path definition models for input validation."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Self

import orjson
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from robust_topt.exceptions import ConfigurationError


class ModelKind(str, Enum):
    """Built-in closed-form dynamics models."""

    POINT_MASS = "point_mass"  # 1-DOF prismatic unit, double integrator
    PENDULUM = "pendulum"  # 1-DOF revolute link
    PLANAR_2DOF = "planar_2dof"  # 2-DOF planar arm, relative joint angles


class LinkModel(BaseModel):
    """Inertial and kinematic parameters of one link.

    Attributes:
        mass: Link mass (kg)
        length: Joint-to-joint length (m)
        com: Distance from the proximal joint to the center of mass (m)
        inertia: Moment of inertia about the center of mass (kg·m²)
    """

    mass: float = Field(..., gt=0.0)
    length: float = Field(0.0, ge=0.0)
    com: float = Field(0.0, ge=0.0)
    inertia: float = Field(0.0, ge=0.0)


class RobotConfig(BaseModel):
    """Validated robot definition.

    Attributes:
        name: Free-form identifier used in reports
        kind: Which closed-form model the links parameterize
        gravity: Gravity vector in the motion plane (m/s²); for a point mass only
            the first component (along the joint axis) is used
        links: One entry per joint
        tau_min: Lower torque bound per joint (N·m)
        tau_max: Upper torque bound per joint (N·m)
    """

    name: str = "robot"
    kind: ModelKind
    gravity: tuple[float, float] = (0.0, -9.81)
    links: list[LinkModel] = Field(..., min_length=1, max_length=2)
    tau_min: list[float]
    tau_max: list[float]

    @model_validator(mode="after")
    def validate_shapes(self) -> Self:
        """Check joint counts and torque-bound ordering."""
        expected = 2 if self.kind == ModelKind.PLANAR_2DOF else 1
        if len(self.links) != expected:
            raise ValueError(f"{self.kind.value} needs {expected} link(s), got {len(self.links)}")
        if len(self.tau_min) != expected or len(self.tau_max) != expected:
            raise ValueError(f"torque bounds must have length {expected}")
        for j, (lo, hi) in enumerate(zip(self.tau_min, self.tau_max, strict=True)):
            if not lo < hi:
                raise ValueError(f"tau_min < tau_max violated at joint {j}: {lo} >= {hi}")
        return self

    @property
    def joint_count(self) -> int:
        return len(self.links)


class WaypointModel(BaseModel):
    """One path waypoint: path coordinate and joint positions."""

    s: float = Field(..., ge=0.0, le=1.0)
    q: list[float] = Field(..., min_length=1)


class PathConfig(BaseModel):
    """Validated path definition ``{"waypoints": [{"s": .., "q": [..]}, ...]}``."""

    waypoints: list[WaypointModel] = Field(..., min_length=2)

    @field_validator("waypoints")
    @classmethod
    def validate_waypoints(cls, v: list[WaypointModel]) -> list[WaypointModel]:
        """Require strictly increasing s from 0 to 1 and equal vector lengths."""
        s_values = [w.s for w in v]
        if s_values[0] != 0.0 or s_values[-1] != 1.0:
            raise ValueError("waypoints must start at s=0 and end at s=1")
        if any(b <= a for a, b in zip(s_values, s_values[1:], strict=False)):
            raise ValueError("waypoint s-values must be strictly increasing")
        if len({len(w.q) for w in v}) != 1:
            raise ValueError("all waypoint vectors must have the same length")
        return v

    @property
    def joint_count(self) -> int:
        return len(self.waypoints[0].q)


def _load_json(path: str | Path) -> object:
    try:
        return orjson.loads(Path(path).read_bytes())
    except FileNotFoundError:
        raise ConfigurationError(f"Config file not found: {path}")
    except orjson.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid JSON in {path}: {e}")


def load_robot_config(path: str | Path) -> RobotConfig:
    """Read and validate a robot JSON file."""
    try:
        return RobotConfig.model_validate(_load_json(path))
    except ValidationError as e:
        raise ConfigurationError(f"Invalid robot config {path}", details={"errors": e.errors()})


def load_path_config(path: str | Path) -> PathConfig:
    """Read and validate a path JSON file."""
    try:
        return PathConfig.model_validate(_load_json(path))
    except ValidationError as e:
        raise ConfigurationError(f"Invalid path config {path}", details={"errors": e.errors()})
