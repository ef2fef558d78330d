"""Robust torque constraints of one stage.

Each joint j contributes two second-order cone constraints in (u, x):

    R‖(u, x, 1)‖₂ ≤ τ_max,j − a_j u − b_j x − c_j
    R‖(u, x, 1)‖₂ ≤ a_j u + b_j x + c_j − τ_min,j

They are the robust counterparts of τ_min ≤ (a + Δa)u + (b + Δb)x + (c + Δc) ≤ τ_max
over all perturbations with ‖(Δa, Δb, Δc)‖₂ ≤ R. For fixed x both take the form
R√(u² + k) ≤ ρ − αu with k = x² + 1, a concave inequality in u whose solution
set is an interval found in closed form.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from robust_topt.dynamics.coefficients import CoefficientTriple, nominal_coefficients
from robust_topt.dynamics.models import DynamicsModel
from robust_topt.geometry.path import PathSpline
from robust_topt.reachability.grid import DiscretizationGrid
from robust_topt.reachability.interval import EMPTY, REAL_LINE, Interval


@dataclass(frozen=True, eq=False)
class StageConstraints:
    """Nominal coefficients, perturbation radius and torque bounds at one stage."""

    index: int
    s: float
    coefficients: CoefficientTriple
    radius: float
    tau_min: NDArray[np.float64]
    tau_max: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        if not self.coefficients.is_finite():
            raise ValueError(f"non-finite coefficients at stage {self.index}")

    def u_interval(self, x: float) -> Interval:
        return robust_u_interval(self, x)


def cone_interval(alpha: float, rho: float, radius: float, k: float) -> Interval:
    """Solution set of R√(u² + k) ≤ ρ − αu in u (k ≥ 1).

    Closed interval, possibly a half-line or empty; double roots are kept.
    """
    if radius == 0.0:
        if alpha > 0.0:
            return Interval(-math.inf, rho / alpha)
        if alpha < 0.0:
            return Interval(rho / alpha, math.inf)
        return REAL_LINE if rho >= 0.0 else EMPTY

    r2 = radius * radius
    a2 = alpha * alpha

    if a2 < r2:
        # concave with an interior maximum ρ − √k·√(R² − α²)
        slack = r2 - a2
        if rho < 0.0 or rho * rho < k * slack:
            return EMPTY
        root = radius * math.sqrt(max(rho * rho - k * slack, 0.0))
        lo = (-alpha * rho - root) / slack
        hi = (-alpha * rho + root) / slack
        return Interval(min(lo, hi), max(lo, hi))

    if a2 == r2:
        # supremum ρ approached at one infinity, never attained
        if rho <= 0.0:
            return EMPTY
        u0 = (rho * rho - r2 * k) / (2.0 * alpha * rho)
        return Interval(-math.inf, u0) if alpha > 0.0 else Interval(u0, math.inf)

    # |α| > R: strictly monotone, exactly one genuine root of the squared equation
    slack = r2 - a2
    root = radius * math.sqrt(rho * rho + k * (a2 - r2))
    candidates = ((-alpha * rho - root) / slack, (-alpha * rho + root) / slack)
    u0 = max(candidates, key=lambda u: rho - alpha * u)
    return Interval(-math.inf, u0) if alpha > 0.0 else Interval(u0, math.inf)


def u_interval(
    coefficients: CoefficientTriple,
    x: float,
    tau_min: NDArray[np.float64],
    tau_max: NDArray[np.float64],
    radius: float = 0.0,
) -> Interval:
    """Intersection over joints of the admissible u at squared velocity ``x``."""
    k = x * x + 1.0
    result = REAL_LINE
    for a, b, c, lo, hi in zip(
        coefficients.a, coefficients.b, coefficients.c, tau_min, tau_max, strict=True
    ):
        drift = float(b) * x + float(c)
        result = result.intersect(cone_interval(float(a), float(hi) - drift, radius, k))
        if result.is_empty:
            return EMPTY
        result = result.intersect(cone_interval(-float(a), drift - float(lo), radius, k))
        if result.is_empty:
            return EMPTY
    return result


def robust_u_interval(stage: StageConstraints, x: float) -> Interval:
    """Admissible path accelerations at ``x`` under every perturbation of radius R."""
    if x < 0.0:
        return EMPTY
    return u_interval(stage.coefficients, x, stage.tau_min, stage.tau_max, stage.radius)


def nominal_u_interval(
    coefficients: CoefficientTriple,
    x: float,
    tau_min: NDArray[np.float64],
    tau_max: NDArray[np.float64],
) -> Interval:
    """Linear admissible interval for known (for example measured) coefficients."""
    return u_interval(coefficients, max(x, 0.0), tau_min, tau_max, 0.0)


def worst_case_perturbation(u: float, x: float, radius: float) -> NDArray[np.float64]:
    """Δ* = R(u, x, 1)/‖(u, x, 1)‖₂, the perturbation maximizing the torque at (u, x)."""
    v = np.array([u, x, 1.0])
    return radius * v / np.linalg.norm(v)


def realized_torque(
    coefficients: CoefficientTriple, perturbation: NDArray[np.float64], u: float, x: float
) -> NDArray[np.float64]:
    """(a + Δa)u + (b + Δb)x + (c + Δc) per joint; ``perturbation`` is (n, 3) or (3,)."""
    delta = np.broadcast_to(np.asarray(perturbation, dtype=float), coefficients.stacked().shape)
    return (coefficients.stacked() + delta) @ np.array([u, x, 1.0])


def transition(x: float, u: float, delta: float) -> float:
    """x_{i+1} = x_i + 2Δ_i u_i."""
    return x + 2.0 * delta * u


def transition_window(x: float, target: Interval, delta: float) -> Interval:
    """Controls u with x + 2Δu inside ``target``."""
    if target.is_empty:
        return EMPTY
    return Interval((target.lo - x) / (2.0 * delta), (target.hi - x) / (2.0 * delta))


@dataclass(frozen=True)
class StageBuild:
    """Stage constraints plus the wall time spent evaluating coefficients."""

    stages: list[StageConstraints]
    coefficient_seconds: float


def build_stage_constraints(
    model: DynamicsModel,
    path: PathSpline,
    grid: DiscretizationGrid,
    radius: float,
) -> StageBuild:
    """Evaluate nominal coefficients at s_0 … s_{N−1}."""
    start = time.perf_counter()
    stages = [
        StageConstraints(
            index=i,
            s=float(s),
            coefficients=nominal_coefficients(model, path, float(s)),
            radius=radius,
            tau_min=model.tau_min,
            tau_max=model.tau_max,
        )
        for i, s in enumerate(grid.s_values[:-1])
    ]
    return StageBuild(stages=stages, coefficient_seconds=time.perf_counter() - start)
