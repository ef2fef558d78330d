"""Computed-torque trajectory tracking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike

from robust_topt.control.gains import TrackingGains
from robust_topt.dynamics.models import DynamicsModel, Vector
from robust_topt.geometry.path import PathSpline

if TYPE_CHECKING:
    from robust_topt.sim.state import CoupledState


@dataclass(frozen=True, eq=False)
class DesiredState:
    """q_d = p(s), q̇_d = p′ṡ, q̈_d = p′u + p″ṡ²."""

    q: Vector
    qd: Vector
    qdd: Vector


def desired_state(path: PathSpline, s: float, sd: float, u: float) -> DesiredState:
    p, dp, ddp = path.evaluate_all(min(max(s, 0.0), 1.0))
    return DesiredState(q=p, qd=dp * sd, qdd=dp * u + ddp * sd * sd)


def tracking_error(path: PathSpline, state: CoupledState) -> tuple[Vector, Vector]:
    """(e, ė) with e = q_d − q measured against the point p(s) of the current path state."""
    s = min(max(state.s, 0.0), 1.0)
    p, dp, _ = path.evaluate_all(s)
    return p - state.q, dp * state.sd - state.qd


def computed_torque_unclamped(
    model: DynamicsModel,
    q: ArrayLike,
    qd: ArrayLike,
    qdd_desired: ArrayLike,
    e: ArrayLike,
    ed: ArrayLike,
    gains: TrackingGains,
) -> Vector:
    """τ = M(q)[q̈_d + Kp e + Kd ė] + q̇ᵀC(q)q̇ + h(q)."""
    qv = model.check(q, "q")
    qdv = model.check(qd, "qd")
    accel = (
        model.check(qdd_desired, "qdd_desired")
        + gains.kp @ model.check(e, "e")
        + gains.kd @ model.check(ed, "ed")
    )
    return model.mass_matrix(qv) @ accel + model.coriolis(qv, qdv) + model.gravity_torque(qv)


def clamp_torque(model: DynamicsModel, tau: Vector) -> Vector:
    return np.clip(tau, model.tau_min, model.tau_max)


def computed_torque(
    model: DynamicsModel,
    state: CoupledState,
    qdd_desired: ArrayLike,
    e: ArrayLike,
    ed: ArrayLike,
    gains: TrackingGains,
) -> Vector:
    """Computed-torque law clamped componentwise to [τ_min, τ_max]."""
    tau = computed_torque_unclamped(model, state.q, state.qd, qdd_desired, e, ed, gains)
    return clamp_torque(model, tau)
