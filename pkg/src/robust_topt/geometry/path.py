"""Geometric path p(s) on s ∈ [0, 1] backed by natural cubic splines."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline

from robust_topt.exceptions import PathDomainError, SplineError
from robust_topt.models.robot import PathConfig, load_path_config

Order = Literal[0, 1, 2]


@dataclass(frozen=True, eq=False)
class PathSpline:
    """Piecewise cubic joint-space path with its first two derivatives.

    The spline is immutable after construction; evaluation never extrapolates
    outside [0, 1].
    """

    knots: NDArray[np.float64]
    waypoints: NDArray[np.float64]
    _pieces: tuple[CubicSpline, CubicSpline, CubicSpline] = field(repr=False)

    @property
    def joint_count(self) -> int:
        return int(self.waypoints.shape[1])

    @property
    def coefficients(self) -> NDArray[np.float64]:
        """Polynomial coefficients, shape (4, segments, joints), highest power first."""
        return np.asarray(self._pieces[0].c)

    def evaluate(self, s: float, order: Order = 0) -> NDArray[np.float64]:
        if not 0.0 <= s <= 1.0:
            raise PathDomainError(f"path evaluated at s={s!r}, outside [0, 1]", details={"s": s})
        if order not in (0, 1, 2):
            raise ValueError(f"order must be 0, 1 or 2, got {order}")
        return np.asarray(self._pieces[order](s), dtype=float)

    def evaluate_all(self, s: float) -> tuple[NDArray[np.float64], ...]:
        """Return (p, p′, p″) at ``s`` in one call."""
        return self.evaluate(s, 0), self.evaluate(s, 1), self.evaluate(s, 2)


def build_spline(waypoints: Sequence[tuple[float, ArrayLike]]) -> PathSpline:
    """Interpolate waypoints with a natural cubic spline.

    Args:
        waypoints: ``(s, q)`` pairs; s strictly increasing from 0 to 1, equal-length q

    Returns:
        The interpolating path

    Raises:
        SplineError: fewer than two waypoints, bad s-values or ragged vectors
    """
    if len(waypoints) < 2:
        raise SplineError(f"need at least 2 waypoints, got {len(waypoints)}")

    s_values = np.array([float(s) for s, _ in waypoints])
    vectors = [np.atleast_1d(np.asarray(q, dtype=float)) for _, q in waypoints]
    if len({v.shape for v in vectors}) != 1 or vectors[0].ndim != 1 or vectors[0].size == 0:
        raise SplineError("waypoint vectors must be non-empty and of equal length")
    if s_values[0] != 0.0 or s_values[-1] != 1.0:
        raise SplineError(
            f"waypoints must span [0, 1], got [{s_values[0]}, {s_values[-1]}]",
            details={"s_values": s_values.tolist()},
        )
    if np.any(np.diff(s_values) <= 0.0):
        raise SplineError(
            "waypoint s-values must be strictly increasing",
            details={"s_values": s_values.tolist()},
        )

    q = np.vstack(vectors)
    spline = CubicSpline(s_values, q, axis=0, bc_type="natural", extrapolate=False)
    return PathSpline(
        knots=s_values,
        waypoints=q,
        _pieces=(spline, spline.derivative(1), spline.derivative(2)),
    )


def eval_path(path: PathSpline, s: float, order: Order = 0) -> NDArray[np.float64]:
    """Evaluate p(s), p′(s) or p″(s); rejects s outside [0, 1]."""
    return path.evaluate(s, order)


def spline_from_config(config: PathConfig) -> PathSpline:
    return build_spline([(w.s, w.q) for w in config.waypoints])


def load_path(path: str | Path) -> PathSpline:
    """Read a path JSON file and build its spline."""
    return spline_from_config(load_path_config(path))
