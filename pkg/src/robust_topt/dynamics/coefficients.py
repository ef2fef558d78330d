"""Path-parameterization torque coefficients.

Along the path q = p(s) the joint torques are affine in the path acceleration
u = s̈ and the squared path velocity x = ṡ²:

    τ = a·u + b·x + c

With the tracking error e = q_d − q the measured configuration is
q = p(s) − e and q̇ = p′(s)ṡ − ė, and the computed-torque law expands to the
same affine form with perturbed coefficients (â, b̂, ĉ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from robust_topt.dynamics.models import DynamicsModel, Matrix, Vector
from robust_topt.geometry.path import PathSpline


@dataclass(frozen=True, eq=False)
class CoefficientTriple:
    """Per-joint coefficients of u, x and 1 in the joint-torque expression."""

    a: Vector
    b: Vector
    c: Vector

    def torque(self, u: float, x: float) -> Vector:
        return self.a * u + self.b * x + self.c

    def stacked(self) -> Matrix:
        """(n, 3) array with one row (a_j, b_j, c_j) per joint."""
        return np.column_stack([self.a, self.b, self.c])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.stacked())))


def nominal_coefficients(model: DynamicsModel, path: PathSpline, s: float) -> CoefficientTriple:
    """a = M(p)p′, b = M(p)p″ + p′ᵀC(p)p′, c = h(p)."""
    p, dp, ddp = path.evaluate_all(s)
    M = model.mass_matrix(p)
    return CoefficientTriple(
        a=M @ dp,
        b=M @ ddp + model.coriolis(p, dp),
        c=model.gravity_torque(p),
    )


def perturbed_coefficients(
    model: DynamicsModel,
    path: PathSpline,
    s: float,
    sd: float,
    e: ArrayLike,
    ed: ArrayLike,
    Kp: Matrix,
    Kd: Matrix,
) -> CoefficientTriple:
    """Coefficients of the computed-torque law under tracking error (e, ė).

    â = M(q)p′
    b̂ = M(q)p″ + p′ᵀC(q)p′
    ĉ = M(q)[Kp e + Kd ė] − 2ṡ ėᵀC(q)p′ + ėᵀC(q)ė + h(q),   q = p(s) − e

    Equal to :func:`nominal_coefficients` when e = ė = 0.
    """
    ev = model.check(e, "e")
    edv = model.check(ed, "ed")
    p, dp, ddp = path.evaluate_all(s)
    q = p - ev
    M = model.mass_matrix(q)
    gamma = model.christoffel(q)

    def quad(v: Vector, w: Vector) -> Vector:
        return np.einsum("ijk,j,k->i", gamma, v, w)

    return CoefficientTriple(
        a=M @ dp,
        b=M @ ddp + quad(dp, dp),
        c=M @ (Kp @ ev + Kd @ edv) - 2.0 * sd * quad(edv, dp) + quad(edv, edv)
        + model.gravity_torque(q),
    )
