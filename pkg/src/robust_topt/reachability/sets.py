"""Robust one-step sets and the backward recursion of controllable sets."""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from robust_topt.reachability.constraints import (
    StageConstraints,
    robust_u_interval,
    transition_window,
)
from robust_topt.reachability.grid import DiscretizationGrid
from robust_topt.reachability.interval import EMPTY, Interval

logger = logging.getLogger(__name__)

DEFAULT_X_MAX = 100.0
DEFAULT_TOL = 1e-8
SEED_SAMPLES = 1024


def _steerable(stage: StageConstraints, x: float, target: Interval, delta: float) -> bool:
    if x < 0.0:
        return False
    u_set = robust_u_interval(stage, x)
    return not u_set.is_empty and not u_set.intersect(
        transition_window(x, target, delta)
    ).is_empty


def _find_seed(
    stage: StageConstraints,
    target: Interval,
    delta: float,
    x_max: float,
    hint: Interval | None,
) -> float | None:
    candidates: list[float] = []
    for interval in (target, hint):
        if interval is not None and not interval.is_empty:
            candidates.extend([interval.midpoint, interval.lo, interval.hi])
    candidates.append(0.0)
    for x in candidates:
        if 0.0 <= x <= x_max and _steerable(stage, x, target, delta):
            return x
    # dense sweep; misses only sets narrower than the sample spacing
    for x in np.linspace(0.0, x_max, SEED_SAMPLES + 1):
        if _steerable(stage, float(x), target, delta):
            return float(x)
    return None


def _bisect(
    stage: StageConstraints,
    target: Interval,
    delta: float,
    inside: float,
    outside: float,
    tol: float,
) -> float:
    """Boundary between a steerable ``inside`` point and a non-steerable ``outside`` one."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if _steerable(stage, mid, target, delta):
            inside = mid
        else:
            outside = mid
    return inside


def robust_one_step_set(
    stage: StageConstraints,
    target: Interval,
    delta: float,
    *,
    x_max: float = DEFAULT_X_MAX,
    tol: float = DEFAULT_TOL,
    hint: Interval | None = None,
) -> Interval:
    """Q_i(target): states x ∈ [0, x_max] with some robust u landing in ``target``.

    The feasible (x, u) set is convex, so its projection on x is an interval
    whose endpoints are located by bisection to ``tol``. Returned endpoints
    are steerable points (inner approximation).
    """
    if target.is_empty or delta <= 0.0:
        return EMPTY

    seed = _find_seed(stage, target, delta, x_max, hint)
    if seed is None:
        return EMPTY

    lo = 0.0
    if not _steerable(stage, lo, target, delta):
        lo = _bisect(stage, target, delta, seed, 0.0, tol)
    hi = x_max
    if not _steerable(stage, hi, target, delta):
        hi = _bisect(stage, target, delta, seed, x_max, tol)
    return Interval(lo, hi)


@dataclass(frozen=True, eq=False)
class ControllableSets:
    """K_0 … K_N as lower/upper arrays; empty stages hold (inf, −inf)."""

    s_values: NDArray[np.float64]
    lower: NDArray[np.float64]
    upper: NDArray[np.float64]
    terminal: Interval
    radius: float
    first_empty_stage: int | None = None
    recursion_seconds: float = 0.0
    coefficient_seconds: float = 0.0

    @property
    def stages(self) -> int:
        return int(self.lower.size - 1)

    @property
    def feasible(self) -> bool:
        return self.first_empty_stage is None

    def stage(self, i: int) -> Interval:
        lo, hi = float(self.lower[i]), float(self.upper[i])
        return Interval(lo, hi) if lo <= hi else EMPTY

    def __getitem__(self, i: int) -> Interval:
        return self.stage(i)

    def __len__(self) -> int:
        return int(self.lower.size)

    def intervals(self) -> list[Interval]:
        return [self.stage(i) for i in range(len(self))]

    def is_nested_in(self, other: ControllableSets, tol: float = 1e-7) -> bool:
        """True when every K_i here lies inside the matching K_i of ``other``."""
        return all(
            mine.issubset(theirs, tol)
            for mine, theirs in zip(self.intervals(), other.intervals(), strict=True)
        )


def compute_controllable_sets(
    constraints: Sequence[StageConstraints],
    grid: DiscretizationGrid,
    terminal: Interval,
    *,
    x_max: float = DEFAULT_X_MAX,
    tol: float = DEFAULT_TOL,
) -> ControllableSets:
    """K_N = X_f, K_i = Q_i(K_{i+1}) for i = N−1 … 0.

    An empty K_i empties every earlier stage; the result then records the
    first empty stage index instead of raising.
    """
    n_stages = grid.stages
    if len(constraints) != n_stages:
        raise ValueError(f"expected {n_stages} stage constraints, got {len(constraints)}")
    if not terminal.is_empty and terminal.lo < 0.0:
        raise ValueError(f"terminal set must lie in [0, inf), got {terminal.as_tuple()}")

    start = time.perf_counter()
    lower = np.full(n_stages + 1, np.inf)
    upper = np.full(n_stages + 1, -np.inf)
    if not terminal.is_empty:
        lower[n_stages], upper[n_stages] = terminal.lo, terminal.hi

    deltas = grid.deltas
    first_empty: int | None = n_stages if terminal.is_empty else None
    current = terminal
    for i in range(n_stages - 1, -1, -1):
        if first_empty is not None:
            break
        current = robust_one_step_set(
            constraints[i], current, float(deltas[i]), x_max=x_max, tol=tol, hint=current
        )
        if current.is_empty:
            first_empty = i
            logger.warning(
                "Controllable set empty at stage %d (s=%.4f); earlier stages are infeasible",
                i,
                grid.s_values[i],
            )
            break
        lower[i], upper[i] = current.lo, current.hi

    elapsed = time.perf_counter() - start
    radius = constraints[0].radius if constraints else 0.0
    logger.info(
        "Computed %d controllable sets (R=%.3g) in %.1f ms, feasible=%s",
        n_stages + 1,
        radius,
        elapsed * 1e3,
        first_empty is None,
    )
    return ControllableSets(
        s_values=grid.s_values.copy(),
        lower=lower,
        upper=upper,
        terminal=terminal,
        radius=radius,
        first_empty_stage=first_empty,
        recursion_seconds=elapsed,
    )
