"""Online path controllers coupled with computed-torque tracking.

Each controller is sampled by the simulator once per control period and
returns a :class:`ControlCommand` holding the path acceleration u, the joint
torques and telemetry flags. Controller state is owned by one simulation.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from robust_topt.control.gains import TrackingGains
from robust_topt.control.reference import TimedReference, tt_reference
from robust_topt.control.tracking import (
    DesiredState,
    computed_torque_unclamped,
    desired_state,
    tracking_error,
)
from robust_topt.dynamics.coefficients import CoefficientTriple, perturbed_coefficients
from robust_topt.dynamics.models import DynamicsModel, Vector
from robust_topt.geometry.path import PathSpline
from robust_topt.models.scenario import ControlMode
from robust_topt.reachability.constraints import (
    nominal_u_interval,
    transition,
    transition_window,
)
from robust_topt.reachability.grid import DiscretizationGrid
from robust_topt.reachability.interval import Interval
from robust_topt.reachability.profile import NominalProfile
from robust_topt.reachability.sets import ControllableSets

if TYPE_CHECKING:
    from robust_topt.sim.state import CoupledState

logger = logging.getLogger(__name__)

MIN_REMAINING_FRACTION = 1e-6
GRID_SNAP = 1e-12
LANDING_TOL = 1e-9


@dataclass(frozen=True)
class PathDecision:
    """Path acceleration chosen by a path control law plus its flags."""

    u: float
    infeasible: bool = False
    excursion: bool = False
    live: Interval | None = None


@dataclass(frozen=True, eq=False)
class ControlCommand:
    """Zero-order-hold command for one control period.

    Attributes:
        u: Path acceleration s̈
        tau: Clamped joint torques
        desired: Joint targets the torques were computed for
        infeasible: No admissible path acceleration existed this sample
        excursion: The path state left the set steerable into the next stage
        saturated: The torque clamp was active
        resync: (s, ṡ) imposed on the path state (time-indexed tracking)
        finished: The controller has nothing left to track
        hold_until: Path position at which the command must be recomputed,
            even inside the control period
    """

    u: float
    tau: Vector
    desired: DesiredState
    infeasible: bool = False
    excursion: bool = False
    saturated: bool = False
    resync: tuple[float, float] | None = None
    finished: bool = False
    hold_until: float | None = None


@dataclass
class ControllerState:
    """Mutable per-run state of a path controller."""

    mode: ControlMode
    grid: DiscretizationGrid
    gains: TrackingGains
    tau_min: Vector
    tau_max: Vector
    sets: ControllableSets | None = None
    profile: NominalProfile | None = None
    os_gain: float = 1.0
    stage: int = 0
    s: float = 0.0
    infeasible_events: int = 0
    excursions: int = 0
    planned_stage: int = field(default=-1, repr=False)
    _in_excursion: bool = field(default=False, repr=False)
    _in_infeasible: bool = field(default=False, repr=False)

    def __post_init__(self) -> None:
        if self.mode is ControlMode.TOPT:
            if self.sets is None:
                raise ValueError("TOPT mode needs controllable sets")
            if not self.sets.feasible:
                raise ValueError("TOPT mode needs nonempty controllable sets")
            if self.sets.stages != self.grid.stages:
                raise ValueError("controllable sets do not match the grid")
        elif self.profile is None:
            raise ValueError(f"{self.mode.value} mode needs a reference profile")

    def locate(self, s: float) -> int:
        """Move to the stage containing ``s`` and return its index.

        A position within ``GRID_SNAP`` below a grid point belongs to the
        stage starting there.
        """
        self.s = min(max(s, 0.0), 1.0)
        stage = self.grid.stage_index(self.s)
        if stage + 1 < self.grid.stages and self.grid.s_values[stage + 1] - self.s <= GRID_SNAP:
            stage += 1
        self.stage = stage
        return stage

    @property
    def remaining(self) -> float:
        """Distance δ from s to the next grid point, floored at a small fraction of Δ_i."""
        s_next = float(self.grid.s_values[self.stage + 1])
        delta = float(self.grid.deltas[self.stage])
        return max(s_next - self.s, MIN_REMAINING_FRACTION * delta)

    @property
    def next_grid_point(self) -> float | None:
        """Start of the next stage, or None on the last stage."""
        if self.stage + 1 >= self.grid.stages:
            return None
        return float(self.grid.s_values[self.stage + 1])

    def within_stage_hull(self, x: float) -> bool:
        """True when x lies between the bounds of K_i and K_{i+1}."""
        assert self.sets is not None
        here, there = self.sets.stage(self.stage), self.sets.stage(self.stage + 1)
        tol = LANDING_TOL * max(1.0, x)
        return min(here.lo, there.lo) - tol <= x <= max(here.hi, there.hi) + tol

    def reset(self) -> None:
        self.stage = 0
        self.s = 0.0
        self.infeasible_events = 0
        self.excursions = 0
        self.planned_stage = -1
        self._in_excursion = False
        self._in_infeasible = False


def topt_path_control(
    state: ControllerState, x: float, live_coeffs: CoefficientTriple
) -> PathDecision:
    """Greatest live-feasible u whose transition lands in K_{i+1}.

    Once a stage has been entered with a feasible transition, the live
    constraints may drift away from the window before the next grid point;
    the window edge nearest the live interval is then held so that the
    transition still lands in K_{i+1}. Outside the steerable set the most
    negative live control is used when the state is too fast and the most
    positive when too slow. With no live control at all the window control
    nearest zero is held.
    """
    assert state.sets is not None
    target = state.sets.stage(state.stage + 1)
    delta = state.remaining
    live = nominal_u_interval(live_coeffs, x, state.tau_min, state.tau_max)
    window = transition_window(x, target, delta)

    if live.is_empty:
        return PathDecision(u=window.clamp(0.0), infeasible=True, live=live)

    feasible = live.intersect(window)
    if not feasible.is_empty:
        state.planned_stage = state.stage
        return PathDecision(u=feasible.hi, live=live)

    too_fast = window.hi < live.lo
    nearest = live.lo if too_fast else live.hi
    if target.contains(transition(x, nearest, delta), tol=LANDING_TOL * max(1.0, x)):
        state.planned_stage = state.stage
        return PathDecision(u=nearest, live=live)

    if state.planned_stage == state.stage and state.within_stage_hull(x):
        return PathDecision(u=window.hi if too_fast else window.lo, live=live)

    return PathDecision(u=nearest, excursion=True, live=live)


def reference_point(profile: NominalProfile, s: float) -> tuple[float, float]:
    """(x_ref, u_ref) of the nominal profile at path position ``s``."""
    grid = profile.grid
    i = grid.stage_index(s)
    u_ref = float(profile.us[i])
    x_ref = float(profile.xs[i]) + 2.0 * u_ref * (s - float(grid.s_values[i]))
    return max(x_ref, 0.0), u_ref


def os_path_control(
    state: ControllerState,
    x: float,
    live_coeffs: CoefficientTriple,
    reference: NominalProfile,
) -> PathDecision:
    """Track the reference squared velocity, clamped to the live interval.

    The squared-velocity error is corrected over the distance left to the
    next grid point, so unit gain lands on the next profile point. An empty
    live interval applies the nominal reference control unchanged.
    """
    x_ref, u_ref = reference_point(reference, state.s)
    live = nominal_u_interval(live_coeffs, x, state.tau_min, state.tau_max)
    if live.is_empty:
        return PathDecision(u=u_ref, infeasible=True, live=live)
    correction = state.os_gain * (x_ref - x) / (2.0 * state.remaining)
    return PathDecision(u=live.clamp(u_ref + correction), live=live)


class PathController(ABC):
    """Path controller paired with a computed-torque tracking controller."""

    mode: ControlMode

    def __init__(
        self,
        model: DynamicsModel,
        path: PathSpline,
        state: ControllerState,
    ) -> None:
        if model.joint_count != path.joint_count:
            raise ValueError(
                f"model has {model.joint_count} joints, path has {path.joint_count}"
            )
        self.model = model
        self.path = path
        self.state = state

    @property
    def reference_duration(self) -> float | None:
        """Duration of the fixed reference, when the controller follows one."""
        return None

    def reset(self) -> None:
        self.state.reset()

    @abstractmethod
    def command(self, t: float, y: CoupledState) -> ControlCommand:
        """Command for the control period starting at time ``t`` in state ``y``."""

    def _torque(
        self, y: CoupledState, desired: DesiredState, e: Vector, ed: Vector
    ) -> tuple[Vector, bool]:
        raw = computed_torque_unclamped(
            self.model, y.q, y.qd, desired.qdd, e, ed, self.state.gains
        )
        tau = raw.clip(self.model.tau_min, self.model.tau_max)
        return tau, bool((tau != raw).any())


class OnlinePathController(PathController):
    """Path controller that re-decides u from the live constraints every sample.

    The command is held at most until the next grid point, where the
    transition target changes.
    """

    @abstractmethod
    def _decide(self, x: float, live: CoefficientTriple) -> PathDecision:
        """Path acceleration for squared velocity ``x`` under ``live`` coefficients."""

    def command(self, t: float, y: CoupledState) -> ControlCommand:
        st = self.state
        st.locate(y.s)
        x = y.sd * y.sd
        e, ed = tracking_error(self.path, y)
        live = perturbed_coefficients(
            self.model, self.path, st.s, y.sd, e, ed, st.gains.kp, st.gains.kd
        )
        decision = self._decide(x, live)
        self._record(decision, y)
        desired = desired_state(self.path, st.s, y.sd, decision.u)
        tau, saturated = self._torque(y, desired, e, ed)
        logger.debug(
            "%s s=%.5f x=%.5f u=%.5f live=%s", self.mode.value, y.s, x, decision.u, decision.live
        )
        return ControlCommand(
            u=decision.u,
            tau=tau,
            desired=desired,
            infeasible=decision.infeasible,
            excursion=decision.excursion,
            saturated=saturated,
            hold_until=st.next_grid_point,
        )

    def _record(self, decision: PathDecision, y: CoupledState) -> None:
        st = self.state
        if decision.infeasible:
            st.infeasible_events += 1
        if decision.infeasible and not st._in_infeasible:
            logger.warning(
                "%s: no feasible path acceleration at s=%.4f (stage %d)",
                self.mode.value,
                y.s,
                st.stage,
            )
        if decision.excursion and not st._in_excursion:
            st.excursions += 1
            logger.warning(
                "%s: path state left the controllable tube at s=%.4f (stage %d)",
                self.mode.value,
                y.s,
                st.stage,
            )
        st._in_excursion = decision.excursion
        st._in_infeasible = decision.infeasible


class TOPTController(OnlinePathController):
    """Robust time-optimal path tracking: greedy control into the next controllable set."""

    mode = ControlMode.TOPT

    def _decide(self, x: float, live: CoefficientTriple) -> PathDecision:
        return topt_path_control(self.state, x, live)


class OSController(OnlinePathController):
    """Online scaling of the nominal profile."""

    mode = ControlMode.OS

    def _decide(self, x: float, live: CoefficientTriple) -> PathDecision:
        assert self.state.profile is not None
        return os_path_control(self.state, x, live, self.state.profile)


class TTController(PathController):
    """Tracking of the fixed time-indexed nominal trajectory; no online scaling."""

    mode = ControlMode.TT

    def __init__(self, model: DynamicsModel, path: PathSpline, state: ControllerState) -> None:
        super().__init__(model, path, state)
        assert state.profile is not None
        self.reference: TimedReference = tt_reference(state.profile, path)

    @property
    def reference_duration(self) -> float:
        return self.reference.duration

    def command(self, t: float, y: CoupledState) -> ControlCommand:
        sample = self.reference.sample(t)
        self.state.locate(sample.s)
        desired = sample.desired
        e = desired.q - y.q
        ed = desired.qd - y.qd
        tau, saturated = self._torque(y, desired, e, ed)
        return ControlCommand(
            u=sample.u,
            tau=tau,
            desired=desired,
            saturated=saturated,
            resync=(sample.s, sample.sd),
            finished=t >= self.reference.duration,
        )


_CONTROLLERS: dict[ControlMode, type[PathController]] = {
    ControlMode.TOPT: TOPTController,
    ControlMode.OS: OSController,
    ControlMode.TT: TTController,
}


def build_controller(
    mode: ControlMode,
    model: DynamicsModel,
    path: PathSpline,
    grid: DiscretizationGrid,
    gains: TrackingGains,
    *,
    sets: ControllableSets | None = None,
    profile: NominalProfile | None = None,
    os_gain: float = 1.0,
) -> PathController:
    """Construct the controller for ``mode`` around a fresh :class:`ControllerState`."""
    state = ControllerState(
        mode=mode,
        grid=grid,
        gains=gains,
        tau_min=model.tau_min,
        tau_max=model.tau_max,
        sets=sets,
        profile=profile,
        os_gain=os_gain,
    )
    return _CONTROLLERS[mode](model, path, state)
