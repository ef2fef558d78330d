"""Inverse and forward rigid-body dynamics."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike

from robust_topt.dynamics.models import DynamicsModel, Vector
from robust_topt.exceptions import SingularMassMatrixError


def inverse_dynamics(model: DynamicsModel, q: ArrayLike, qd: ArrayLike, qdd: ArrayLike) -> Vector:
    """τ = M(q)q̈ + q̇ᵀC(q)q̇ + h(q)."""
    qv = model.check(q, "q")
    qdv = model.check(qd, "qd")
    qddv = model.check(qdd, "qdd")
    return model.mass_matrix(qv) @ qddv + model.coriolis(qv, qdv) + model.gravity_torque(qv)


def forward_dynamics(model: DynamicsModel, q: ArrayLike, qd: ArrayLike, tau: ArrayLike) -> Vector:
    """q̈ = M(q)⁻¹(τ − q̇ᵀC(q)q̇ − h(q)).

    Raises:
        SingularMassMatrixError: M(q) is singular (invalid model parameters)
    """
    qv = model.check(q, "q")
    qdv = model.check(qd, "qd")
    tauv = model.check(tau, "tau")
    M = model.mass_matrix(qv)
    rhs = tauv - model.coriolis(qv, qdv) - model.gravity_torque(qv)
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        raise SingularMassMatrixError(
            f"mass matrix of {model.name!r} is singular", details={"q": qv.tolist()}
        )
