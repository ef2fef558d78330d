"""Shared pytest fixtures for models, paths and controllers.

Run with:
    uv run pytest tests/ -v --tb=short
    uv run pytest tests/ -m "not slow"
"""

from pathlib import Path

import numpy as np
import pytest

from robust_topt.config.settings import ToptSettings
from robust_topt.dynamics import CoefficientTriple, Link, Pendulum, PlanarArm2DOF, PointMass
from robust_topt.geometry import build_spline
from robust_topt.reachability import DiscretizationGrid, Interval, StageConstraints

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "config" / "scenarios"


@pytest.fixture
def scenario_dir() -> Path:
    """Directory of the shipped scenario files."""
    return SCENARIO_DIR


@pytest.fixture
def point_mass():
    """Unit mass on a prismatic joint, no gravity, |tau| <= 1."""
    return PointMass(
        links=(Link(mass=1.0),),
        tau_min=np.array([-1.0]),
        tau_max=np.array([1.0]),
        gravity=(0.0, 0.0),
        name="double_integrator",
    )


@pytest.fixture
def pendulum():
    """Point-mass pendulum, 2 kg at 0.5 m."""
    return Pendulum(
        links=(Link(mass=2.0, length=0.5, com=0.5, inertia=0.0),),
        tau_min=np.array([-30.0]),
        tau_max=np.array([30.0]),
        name="pendulum",
    )


@pytest.fixture
def two_link():
    """Two-link arm with the shipped scenario parameters."""
    return PlanarArm2DOF(
        links=(
            Link(mass=12.0, length=0.6, com=0.3, inertia=0.6),
            Link(mass=9.0, length=0.5, com=0.25, inertia=0.4),
        ),
        tau_min=np.array([-300.0, -100.0]),
        tau_max=np.array([300.0, 100.0]),
        name="two_link_vertical",
    )


@pytest.fixture
def straight_path():
    """p(s) = s for one joint."""
    return build_spline([(0.0, [0.0]), (1.0, [1.0])])


@pytest.fixture
def swing_path():
    """Pendulum path through the bottom of its arc."""
    return build_spline([(0.0, [-1.2]), (0.5, [0.2]), (1.0, [1.2])])


@pytest.fixture
def two_link_path():
    """Shipped two-link path."""
    return build_spline(
        [
            (0.0, [-0.5, 0.3]),
            (0.35, [0.0, 1.2]),
            (0.7, [0.5, 0.6]),
            (1.0, [0.9, 0.2]),
        ]
    )


@pytest.fixture
def rest_to_rest() -> Interval:
    """Terminal set X_f = [0, 0]."""
    return Interval(0.0, 0.0)


@pytest.fixture
def rng():
    """Seeded generator so sampled oracles are reproducible."""
    return np.random.default_rng(12345)


@pytest.fixture
def settings() -> ToptSettings:
    """Settings with library defaults, independent of environment overrides."""
    return ToptSettings(_env_file=None)  # type: ignore[call-arg]


def _unit_stage(
    radius: float = 0.0,
    *,
    a: float = 1.0,
    b: float = 0.0,
    c: float = 0.0,
    bounds: tuple[float, float] = (-1.0, 1.0),
    index: int = 0,
) -> StageConstraints:
    """Single-joint stage with constant coefficients."""
    return StageConstraints(
        index=index,
        s=0.0,
        coefficients=CoefficientTriple(a=np.array([a]), b=np.array([b]), c=np.array([c])),
        radius=radius,
        tau_min=np.array([bounds[0]]),
        tau_max=np.array([bounds[1]]),
    )


def _uniform_stages(grid: DiscretizationGrid, **kwargs) -> list[StageConstraints]:
    """The same single-joint stage repeated over every stage of ``grid``."""
    return [_unit_stage(index=i, **kwargs) for i in range(grid.stages)]


@pytest.fixture
def make_stage():
    """Factory for single-joint stages with constant coefficients."""
    return _unit_stage


@pytest.fixture
def make_stages():
    """Factory repeating one constant stage over a grid."""
    return _uniform_stages
