"""Manipulator dynamics and path coefficients."""

from robust_topt.dynamics.coefficients import (
    CoefficientTriple,
    nominal_coefficients,
    perturbed_coefficients,
)
from robust_topt.dynamics.equations import forward_dynamics, inverse_dynamics
from robust_topt.dynamics.models import (
    DynamicsModel,
    Link,
    Pendulum,
    PlanarArm2DOF,
    PointMass,
    load_model,
    model_from_config,
)

__all__ = [
    "CoefficientTriple",
    "DynamicsModel",
    "Link",
    "Pendulum",
    "PlanarArm2DOF",
    "PointMass",
    "forward_dynamics",
    "inverse_dynamics",
    "load_model",
    "model_from_config",
    "nominal_coefficients",
    "perturbed_coefficients",
]
