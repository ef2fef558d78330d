"""Closed-form manipulator models.

Every model supplies the mass matrix M(q), its partial derivatives ∂M/∂q_k and
the potential torques h(q). The Coriolis term is assembled from Christoffel
symbols of the first kind,

    Γ_ijk = ½ (∂M_ij/∂q_k + ∂M_ik/∂q_j − ∂M_jk/∂q_i),

so that q̇ᵀC(q)q̇ is the vector Σ_jk Γ_ijk q̇_j q̇_k.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray

from robust_topt.exceptions import DimensionError
from robust_topt.models.robot import ModelKind, RobotConfig, load_robot_config

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]


@dataclass(frozen=True)
class Link:
    """Link parameters: mass (kg), length (m), center-of-mass offset (m), inertia (kg·m²)."""

    mass: float
    length: float = 0.0
    com: float = 0.0
    inertia: float = 0.0

    def scaled(self, factor: float) -> Link:
        return replace(self, mass=self.mass * factor, inertia=self.inertia * factor)


@dataclass(frozen=True, eq=False)
class DynamicsModel(ABC):
    """Rigid-body model M(q)q̈ + q̇ᵀC(q)q̇ + h(q) = τ with torque bounds."""

    links: tuple[Link, ...]
    tau_min: Vector
    tau_max: Vector
    gravity: tuple[float, float] = (0.0, -9.81)
    name: str = "robot"

    def __post_init__(self) -> None:
        n = len(self.links)
        lo = np.asarray(self.tau_min, dtype=float).reshape(-1)
        hi = np.asarray(self.tau_max, dtype=float).reshape(-1)
        if lo.shape != (n,) or hi.shape != (n,):
            raise DimensionError(f"torque bounds must have length {n}")
        if np.any(lo >= hi):
            raise ValueError("tau_min < tau_max must hold componentwise")
        object.__setattr__(self, "tau_min", lo)
        object.__setattr__(self, "tau_max", hi)

    @property
    def joint_count(self) -> int:
        return len(self.links)

    @abstractmethod
    def mass_matrix(self, q: Vector) -> Matrix:
        """M(q), symmetric positive definite."""

    @abstractmethod
    def mass_matrix_derivative(self, q: Vector) -> NDArray[np.float64]:
        """Array D with D[i, j, k] = ∂M_ij/∂q_k."""

    @abstractmethod
    def gravity_torque(self, q: Vector) -> Vector:
        """h(q)."""

    @abstractmethod
    def potential_energy(self, q: Vector) -> float:
        """Potential whose gradient is h(q)."""

    def christoffel(self, q: Vector) -> NDArray[np.float64]:
        """C(q) as the (n, n, n) Christoffel tensor Γ_ijk."""
        D = self.mass_matrix_derivative(q)
        return 0.5 * (D + D.transpose(0, 2, 1) - D.transpose(2, 0, 1))

    def coriolis(self, q: Vector, qd: Vector, qd2: Vector | None = None) -> Vector:
        """q̇ᵀC(q)q̇, or the bilinear form with a second velocity ``qd2``."""
        other = qd if qd2 is None else qd2
        return np.einsum("ijk,j,k->i", self.christoffel(q), qd, other)

    def energy(self, q: ArrayLike, qd: ArrayLike) -> float:
        """Total mechanical energy ½q̇ᵀMq̇ + V(q)."""
        qv = self.check(q)
        qdv = self.check(qd)
        return float(0.5 * qdv @ self.mass_matrix(qv) @ qdv + self.potential_energy(qv))

    def check(self, v: ArrayLike, name: str = "vector") -> Vector:
        arr = np.asarray(v, dtype=float).reshape(-1)
        if arr.shape != (self.joint_count,):
            raise DimensionError(
                f"{name} has length {arr.size}, expected {self.joint_count}",
                details={"name": name, "length": arr.size},
            )
        return arr

    def scaled(self, mass_scale: float) -> Self:
        """Copy with every link mass and inertia multiplied by ``mass_scale``."""
        if mass_scale <= 0:
            raise ValueError(f"mass_scale must be positive, got {mass_scale}")
        return replace(self, links=tuple(link.scaled(mass_scale) for link in self.links))


@dataclass(frozen=True, eq=False)
class PointMass(DynamicsModel):
    """One prismatic joint carrying a mass; gravity acts along gravity[0]."""

    def mass_matrix(self, q: Vector) -> Matrix:
        return np.array([[self.links[0].mass]])

    def mass_matrix_derivative(self, q: Vector) -> NDArray[np.float64]:
        return np.zeros((1, 1, 1))

    def gravity_torque(self, q: Vector) -> Vector:
        return np.array([-self.links[0].mass * self.gravity[0]])

    def potential_energy(self, q: Vector) -> float:
        return float(-self.links[0].mass * self.gravity[0] * q[0])


@dataclass(frozen=True, eq=False)
class Pendulum(DynamicsModel):
    """One revolute link; q measured from the plane's x-axis."""

    def mass_matrix(self, q: Vector) -> Matrix:
        link = self.links[0]
        return np.array([[link.inertia + link.mass * link.com**2]])

    def mass_matrix_derivative(self, q: Vector) -> NDArray[np.float64]:
        return np.zeros((1, 1, 1))

    def gravity_torque(self, q: Vector) -> Vector:
        link = self.links[0]
        gx, gy = self.gravity
        s, c = math.sin(q[0]), math.cos(q[0])
        return np.array([-link.mass * link.com * (-s * gx + c * gy)])

    def potential_energy(self, q: Vector) -> float:
        link = self.links[0]
        gx, gy = self.gravity
        return float(-link.mass * link.com * (math.cos(q[0]) * gx + math.sin(q[0]) * gy))


@dataclass(frozen=True, eq=False)
class PlanarArm2DOF(DynamicsModel):
    """Two revolute links in a plane, relative joint angles (Spong form).

    M11 = α + 2β cos q2, M12 = δ + β cos q2, M22 = δ with
    α = I1 + I2 + m1 lc1² + m2 (l1² + lc2²), β = m2 l1 lc2, δ = I2 + m2 lc2².
    """

    def _inertial_constants(self) -> tuple[float, float, float]:
        l1, l2 = self.links
        alpha = l1.inertia + l2.inertia + l1.mass * l1.com**2 + l2.mass * (l1.length**2 + l2.com**2)
        beta = l2.mass * l1.length * l2.com
        delta = l2.inertia + l2.mass * l2.com**2
        return alpha, beta, delta

    def mass_matrix(self, q: Vector) -> Matrix:
        alpha, beta, delta = self._inertial_constants()
        c2 = math.cos(q[1])
        m12 = delta + beta * c2
        return np.array([[alpha + 2.0 * beta * c2, m12], [m12, delta]])

    def mass_matrix_derivative(self, q: Vector) -> NDArray[np.float64]:
        _, beta, _ = self._inertial_constants()
        s2 = math.sin(q[1])
        D = np.zeros((2, 2, 2))
        D[:, :, 1] = [[-2.0 * beta * s2, -beta * s2], [-beta * s2, 0.0]]
        return D

    def _com_jacobians(self, q: Vector) -> tuple[Matrix, Matrix]:
        l1, l2 = self.links
        s1, c1 = math.sin(q[0]), math.cos(q[0])
        s12, c12 = math.sin(q[0] + q[1]), math.cos(q[0] + q[1])
        J1 = np.array([[-l1.com * s1, 0.0], [l1.com * c1, 0.0]])
        J2 = np.array(
            [
                [-l1.length * s1 - l2.com * s12, -l2.com * s12],
                [l1.length * c1 + l2.com * c12, l2.com * c12],
            ]
        )
        return J1, J2

    def gravity_torque(self, q: Vector) -> Vector:
        g = np.asarray(self.gravity, dtype=float)
        J1, J2 = self._com_jacobians(q)
        return -(self.links[0].mass * J1.T @ g + self.links[1].mass * J2.T @ g)

    def potential_energy(self, q: Vector) -> float:
        l1, l2 = self.links
        g = np.asarray(self.gravity, dtype=float)
        r1 = l1.com * np.array([math.cos(q[0]), math.sin(q[0])])
        r2 = l1.length * np.array([math.cos(q[0]), math.sin(q[0])]) + l2.com * np.array(
            [math.cos(q[0] + q[1]), math.sin(q[0] + q[1])]
        )
        return float(-(l1.mass * g @ r1 + l2.mass * g @ r2))


_MODEL_TYPES: dict[ModelKind, type[DynamicsModel]] = {
    ModelKind.POINT_MASS: PointMass,
    ModelKind.PENDULUM: Pendulum,
    ModelKind.PLANAR_2DOF: PlanarArm2DOF,
}


def model_from_config(config: RobotConfig) -> DynamicsModel:
    """Instantiate the closed-form model a robot config describes."""
    model_type = _MODEL_TYPES[config.kind]
    return model_type(
        links=tuple(Link(**link.model_dump()) for link in config.links),
        tau_min=np.asarray(config.tau_min, dtype=float),
        tau_max=np.asarray(config.tau_max, dtype=float),
        gravity=config.gravity,
        name=config.name,
    )


def load_model(path: str | Path) -> DynamicsModel:
    """Read a robot JSON file and build its model."""
    return model_from_config(load_robot_config(path))
