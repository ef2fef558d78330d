"""Nominal time-optimal parameterization by a greedy forward pass."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from robust_topt.exceptions import InfeasibleProblemError
from robust_topt.reachability.constraints import (
    StageConstraints,
    robust_u_interval,
    transition,
    transition_window,
)
from robust_topt.reachability.grid import DiscretizationGrid
from robust_topt.reachability.interval import Interval
from robust_topt.reachability.sets import (
    DEFAULT_TOL,
    DEFAULT_X_MAX,
    ControllableSets,
    compute_controllable_sets,
)

logger = logging.getLogger(__name__)


def segment_time(x0: float, x1: float, delta: float) -> float:
    """Time to cover Δ with constant u between squared velocities x0 and x1."""
    denom = math.sqrt(max(x0, 0.0)) + math.sqrt(max(x1, 0.0))
    if denom == 0.0:
        return math.inf
    return 2.0 * delta / denom


def profile_times(grid: DiscretizationGrid, xs: NDArray[np.float64]) -> NDArray[np.float64]:
    """Cumulative arrival time t_i at every grid point; inf after a stalled segment."""
    xs = np.asarray(xs, dtype=float)
    if xs.size != grid.stages + 1:
        raise ValueError(f"expected {grid.stages + 1} squared velocities, got {xs.size}")
    times = np.zeros_like(xs)
    for i, delta in enumerate(grid.deltas):
        times[i + 1] = times[i] + segment_time(float(xs[i]), float(xs[i + 1]), float(delta))
    return times


@dataclass(frozen=True, eq=False)
class NominalProfile:
    """Squared velocities x_0 … x_N, controls u_0 … u_{N−1} and arrival times.

    ``projected_stages`` lists the stages where no admissible control reached
    K_{i+1} and the step was projected onto it instead.
    """

    grid: DiscretizationGrid
    xs: NDArray[np.float64]
    us: NDArray[np.float64]
    times: NDArray[np.float64]
    sets: ControllableSets
    projected_stages: tuple[int, ...] = ()

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    @property
    def degenerate(self) -> bool:
        """True when some segment has x_i = x_{i+1} = 0, so the path stalls."""
        return not math.isfinite(self.duration)

    @property
    def velocities(self) -> NDArray[np.float64]:
        return np.sqrt(np.maximum(self.xs, 0.0))

    def stage_of_time(self, t: float) -> int:
        """Stage i with t_i <= t < t_{i+1}, clipped to [0, N − 1]."""
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return min(max(i, 0), self.grid.stages - 1)


def greatest_control(
    stage: StageConstraints, x: float, target: Interval, delta: float
) -> float | None:
    """Largest admissible u at ``x`` whose transition lands in ``target``."""
    feasible = robust_u_interval(stage, x).intersect(transition_window(x, target, delta))
    return None if feasible.is_empty else feasible.hi


def solve_nominal_parameterization(
    constraints: Sequence[StageConstraints],
    grid: DiscretizationGrid,
    terminal: Interval,
    x_start: float,
    *,
    sets: ControllableSets | None = None,
    x_max: float = DEFAULT_X_MAX,
    tol: float = DEFAULT_TOL,
) -> NominalProfile:
    """Greedy forward pass: at every stage take the greatest control into K_{i+1}.

    The constraints are normally built with R = 0; any radius is honored, which
    gives the robust profile of the same constraints.

    Args:
        constraints: Stage constraints 0 … N−1
        grid: Discretization matching ``constraints``
        terminal: Terminal set X_f on the squared velocity
        x_start: Initial squared velocity x_0
        sets: Precomputed controllable sets (computed when omitted)
        x_max: Bisection ceiling used when computing the sets
        tol: Bisection tolerance used when computing the sets

    Returns:
        The profile with its arrival times; ``degenerate`` flags a stall

    Raises:
        InfeasibleProblemError: The sets are empty or ``x_start`` is outside K_0
    """
    if sets is None:
        sets = compute_controllable_sets(constraints, grid, terminal, x_max=x_max, tol=tol)
    if not sets.feasible:
        raise InfeasibleProblemError(
            f"controllable sets are empty from stage {sets.first_empty_stage}",
            first_empty_stage=sets.first_empty_stage,
        )
    k0 = sets.stage(0)
    # bisection endpoints are accurate to tol only
    if not k0.contains(x_start, tol=10 * tol):
        raise InfeasibleProblemError(
            f"x_start={x_start:.6g} is outside K_0={k0.as_tuple()}",
            first_empty_stage=None,
            details={"x_start": x_start, "K_0": k0.as_tuple()},
        )

    n_stages = grid.stages
    deltas = grid.deltas
    xs = np.zeros(n_stages + 1)
    us = np.zeros(n_stages)
    projected: list[int] = []
    xs[0] = k0.clamp(x_start)
    for i in range(n_stages):
        target = sets.stage(i + 1)
        delta = float(deltas[i])
        u = greatest_control(constraints[i], float(xs[i]), target, delta)
        if u is None:
            # inner-approximation slack: steer to the nearest point of K_{i+1}
            u = (target.clamp(float(xs[i])) - xs[i]) / (2.0 * delta)
            logger.warning(
                "No admissible greedy control at stage %d; projecting onto K_%d", i, i + 1
            )
            projected.append(i)
        us[i] = u
        xs[i + 1] = target.clamp(transition(float(xs[i]), u, delta))

    times = profile_times(grid, xs)
    profile = NominalProfile(
        grid=grid, xs=xs, us=us, times=times, sets=sets, projected_stages=tuple(projected)
    )
    if profile.degenerate:
        logger.warning("Nominal profile stalls at zero velocity; duration is infinite")
    else:
        logger.info("Nominal profile over %d stages: duration %.4f s", n_stages, profile.duration)
    return profile
