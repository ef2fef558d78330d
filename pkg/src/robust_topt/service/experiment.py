"""Experiment service orchestrating set computation, simulation and comparison."""

from __future__ import annotations

import csv
import logging
import math
import threading
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from robust_topt.config.settings import ToptSettings, settings_from_conf
from robust_topt.control.gains import TrackingGains
from robust_topt.control.path_controllers import build_controller
from robust_topt.dynamics.models import DynamicsModel, Vector, load_model
from robust_topt.exceptions import ConfigurationError, InfeasibleProblemError
from robust_topt.geometry.path import PathSpline, load_path
from robust_topt.models.scenario import ControlMode, ScenarioConfig, load_scenario
from robust_topt.reachability.constraints import StageConstraints, build_stage_constraints
from robust_topt.reachability.grid import DiscretizationGrid
from robust_topt.reachability.interval import Interval
from robust_topt.reachability.io import SetPlotData, build_plot_data
from robust_topt.reachability.profile import NominalProfile, solve_nominal_parameterization
from robust_topt.reachability.sets import ControllableSets, compute_controllable_sets
from robust_topt.sim.results import SimResult
from robust_topt.sim.simulator import simulate
from robust_topt.sim.state import CoupledState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Controllable sets of one radius with the timing split."""

    radius: float
    grid: DiscretizationGrid
    constraints: list[StageConstraints]
    sets: ControllableSets
    coefficient_seconds: float
    recursion_seconds: float
    profile: NominalProfile | None = None

    @property
    def feasible(self) -> bool:
        return self.sets.feasible

    def summary(self) -> dict[str, Any]:
        k0 = self.sets.stage(0)
        return {
            "radius": self.radius,
            "stages": self.grid.stages,
            "feasible": self.feasible,
            "first_empty_stage": self.sets.first_empty_stage,
            "coefficient_ms": self.coefficient_seconds * 1e3,
            "recursion_ms": self.recursion_seconds * 1e3,
            "K_0": None if k0.is_empty else [k0.lo, k0.hi],
            "profile_duration": None if self.profile is None else self.profile.duration,
        }


@dataclass(frozen=True)
class ComparisonRow:
    mode: str
    status: str
    duration: float
    max_error: float
    infeasible_events: int
    excursions: int


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """One row per controller plus the nominal optimal duration."""

    nominal_duration: float
    initial_error: float
    results: dict[ControlMode, SimResult]

    @property
    def rows(self) -> list[ComparisonRow]:
        return [
            ComparisonRow(
                mode=mode.value,
                status=result.status.value,
                duration=result.duration,
                max_error=result.max_error,
                infeasible_events=result.infeasible_events,
                excursions=result.excursions,
            )
            for mode, result in self.results.items()
        ]

    def to_records(self) -> list[dict[str, Any]]:
        return [
            {**row.__dict__, "nominal_duration": self.nominal_duration} for row in self.rows
        ]


@dataclass(frozen=True)
class FeasibilitySweep:
    """Outcome of many seeded runs at one initial-error norm."""

    mode: str
    error_norm: float
    runs: int
    reached: int
    runs_with_events: int
    total_events: int
    max_error: float
    seeds: list[int] = field(default_factory=list)

    @property
    def robustly_feasible(self) -> bool:
        return self.runs_with_events == 0 and self.reached == self.runs


@dataclass(frozen=True)
class Calibration:
    """Largest initial-error norm with a clean feasibility sweep."""

    error_norm: float
    iterations: int
    sweeps: list[FeasibilitySweep]


class ExperimentService:
    """Service layer for running experiments on one scenario.

    Loads the robot and path a scenario references, computes and caches
    controllable sets per radius and the nominal profile, and runs the
    controllers against the simulated plant.

    Example:
        >>> service = ExperimentService.from_file("config/scenarios/two_link.scenario.yaml")
        >>> report = service.solve()
        >>> print(report.summary()["recursion_ms"])
        >>> comparison = service.compare()
    """

    def __init__(
        self,
        scenario: ScenarioConfig,
        settings: ToptSettings | None = None,
        *,
        model: DynamicsModel | None = None,
        path: PathSpline | None = None,
    ) -> None:
        """Initialize ExperimentService.

        Args:
            scenario: Validated scenario
            settings: Numerical settings (built from the project config if omitted)
            model: Robot model overriding the scenario's robot file
            path: Path overriding the scenario's path file
        """
        self.scenario = scenario
        self.settings = settings or settings_from_conf()
        self.model = model or load_model(scenario.robot)
        self.path = path or load_path(scenario.path)
        if self.model.joint_count != self.path.joint_count:
            raise ConfigurationError(
                f"robot has {self.model.joint_count} joints, path has {self.path.joint_count}",
                details={"robot": str(scenario.robot), "path": str(scenario.path)},
            )
        self.grid = DiscretizationGrid.uniform(scenario.stages)
        self.gains = TrackingGains.from_omega(scenario.omega, self.model.joint_count)
        self._reports: dict[float, SolveReport] = {}
        self._profile: NominalProfile | None = None
        self._lock = threading.Lock()

    @classmethod
    def from_file(
        cls, path: str | Path, settings: ToptSettings | None = None, **overrides: Any
    ) -> ExperimentService:
        """Load a scenario YAML file and apply overrides (``None`` values are ignored)."""
        scenario = load_scenario(path).with_overrides(**overrides)
        return cls(scenario, settings)

    @property
    def terminal(self) -> Interval:
        lo, hi = self.scenario.terminal_squared
        return Interval(lo, hi)

    @property
    def x_start(self) -> float:
        return self.scenario.start_velocity**2

    # Sets and profiles

    def solve(self, radius: float | None = None) -> SolveReport:
        """Controllable sets for ``radius`` (default: the scenario's R); cached.

        An infeasible result is returned flagged, not raised.
        """
        r = self.scenario.radius if radius is None else float(radius)
        with self._lock:
            cached = self._reports.get(r)
        if cached is not None:
            return cached

        build = build_stage_constraints(self.model, self.path, self.grid, r)
        sets = compute_controllable_sets(
            build.stages,
            self.grid,
            self.terminal,
            x_max=self.settings.x_max,
            tol=self.settings.bisection_tol,
        )
        profile = None
        if sets.feasible and sets.stage(0).contains(self.x_start, tol=1e-7):
            profile = solve_nominal_parameterization(
                build.stages, self.grid, self.terminal, self.x_start, sets=sets
            )
        report = SolveReport(
            radius=r,
            grid=self.grid,
            constraints=build.stages,
            sets=sets,
            coefficient_seconds=build.coefficient_seconds,
            recursion_seconds=sets.recursion_seconds,
            profile=profile,
        )
        logger.info(
            "Scenario %s, R=%.3g: coefficients %.1f ms, recursion %.1f ms, feasible=%s",
            self.scenario.name,
            r,
            report.coefficient_seconds * 1e3,
            report.recursion_seconds * 1e3,
            report.feasible,
        )
        with self._lock:
            self._reports[r] = report
        return report

    def nominal_profile(self) -> NominalProfile:
        """Time-optimal profile of the unperturbed (R = 0) problem.

        Raises:
            InfeasibleProblemError: Nominal sets are empty or exclude the start velocity
        """
        if self._profile is None:
            report = self.solve(0.0)
            self._profile = solve_nominal_parameterization(
                report.constraints, self.grid, self.terminal, self.x_start, sets=report.sets
            )
        return self._profile

    def plot_data(self, radii: Sequence[float]) -> SetPlotData:
        """Set bounds for every radius plus the nominal profile when it exists."""
        sets_by_radius = {float(r): self.solve(r).sets for r in radii}
        try:
            profile: NominalProfile | None = self.nominal_profile()
        except InfeasibleProblemError:
            profile = None
        return build_plot_data(sets_by_radius, profile)

    # Simulation

    def initial_error(self, seed: int | None = None, norm: float | None = None) -> Vector:
        """Seeded random direction scaled to the requested norm."""
        size = self.scenario.initial_error if norm is None else norm
        rng = np.random.default_rng(self.scenario.seed if seed is None else seed)
        direction = rng.standard_normal(self.model.joint_count)
        direction /= np.linalg.norm(direction)
        return size * direction

    def initial_state(self, error: Vector) -> CoupledState:
        p0, dp0, _ = self.path.evaluate_all(0.0)
        sd0 = self.scenario.start_velocity
        return CoupledState(q=p0 - error, qd=dp0 * sd0, s=0.0, sd=sd0)

    def plant(self) -> DynamicsModel:
        scale = self.scenario.plant_mass_scale
        return self.model if scale == 1.0 else self.model.scaled(scale)

    def simulate_mode(
        self,
        mode: ControlMode,
        *,
        seed: int | None = None,
        error_norm: float | None = None,
        radius: float | None = None,
    ) -> SimResult:
        """Run one controller from a seeded initial error.

        Returns a result with status ``infeasible`` when the sets or the
        nominal profile the mode needs do not exist.
        """
        n = self.model.joint_count
        sets = None
        profile = None
        try:
            if mode is ControlMode.TOPT:
                report = self.solve(radius)
                if not report.feasible:
                    raise InfeasibleProblemError(
                        f"controllable sets empty from stage {report.sets.first_empty_stage}",
                        first_empty_stage=report.sets.first_empty_stage,
                    )
                if not report.sets.stage(0).contains(self.x_start, tol=1e-7):
                    raise InfeasibleProblemError("start velocity outside K_0")
                sets = report.sets
            else:
                profile = self.nominal_profile()
        except InfeasibleProblemError as e:
            logger.warning("%s run not started: %s", mode.value, e.message)
            return SimResult.not_started(mode.value, n, e.message)

        controller = build_controller(
            mode,
            self.model,
            self.path,
            self.grid,
            self.gains,
            sets=sets,
            profile=profile,
            os_gain=self.settings.os_gain,
        )
        error = self.initial_error(seed, error_norm)
        cfg = self.settings
        result = simulate(
            self.model,
            self.path,
            controller,
            self.initial_state(error),
            dt_control=self.scenario.dt_control or cfg.dt_control,
            rtol=cfg.rtol,
            atol=cfg.atol,
            plant=self.plant(),
            terminal_velocity=self.scenario.terminal,
            terminal_tol=cfg.terminal_tol,
            divergence_threshold=cfg.divergence_threshold,
            max_time=cfg.max_time,
        )
        result.metadata.update(
            {
                "scenario": self.scenario.name,
                "seed": self.scenario.seed if seed is None else seed,
                "error_norm": float(np.linalg.norm(error)),
                "radius": self.scenario.radius if radius is None else radius,
            }
        )
        return result

    def compare(
        self,
        *,
        seed: int | None = None,
        error_norm: float | None = None,
        modes: Sequence[ControlMode] | None = None,
        concurrent: bool = True,
    ) -> ComparisonReport:
        """Run every scenario mode from the same initial error."""
        selected = list(modes or self.scenario.modes)
        try:
            nominal = self.nominal_profile().duration
        except InfeasibleProblemError:
            nominal = math.nan
        # warm the caches before fanning out
        self.solve()

        def run(mode: ControlMode) -> SimResult:
            return self.simulate_mode(mode, seed=seed, error_norm=error_norm)

        if concurrent and len(selected) > 1:
            workers = min(self.settings.max_workers, len(selected))
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(run, selected))
        else:
            outcomes = [run(mode) for mode in selected]

        for result in outcomes:
            result.metadata["nominal_duration"] = nominal
        error = self.scenario.initial_error if error_norm is None else error_norm
        return ComparisonReport(
            nominal_duration=nominal,
            initial_error=error,
            results=dict(zip(selected, outcomes, strict=True)),
        )

    def feasibility_sweep(
        self,
        error_norm: float | None = None,
        runs: int | None = None,
        mode: ControlMode = ControlMode.TOPT,
    ) -> FeasibilitySweep:
        """Run ``runs`` seeds and count runs with empty live feasible sets."""
        count = self.scenario.runs if runs is None else runs
        norm = self.scenario.initial_error if error_norm is None else error_norm
        seeds = [self.scenario.seed + k for k in range(count)]
        reached = with_events = total = 0
        max_error = 0.0
        for seed in seeds:
            result = self.simulate_mode(mode, seed=seed, error_norm=norm)
            reached += int(result.reached)
            events = result.infeasible_events
            with_events += int(events > 0)
            total += events
            max_error = max(max_error, result.max_error)
        sweep = FeasibilitySweep(
            mode=mode.value,
            error_norm=norm,
            runs=count,
            reached=reached,
            runs_with_events=with_events,
            total_events=total,
            max_error=max_error,
            seeds=seeds,
        )
        logger.info(
            "Sweep %s at |e0|=%.4g: %d/%d reached, %d runs with infeasible samples",
            mode.value,
            norm,
            reached,
            count,
            with_events,
        )
        return sweep

    def calibrate_error_radius(
        self,
        *,
        upper: float | None = None,
        runs: int | None = None,
        iterations: int = 8,
    ) -> Calibration:
        """Bisect the initial-error norm for the largest clean TOPT sweep.

        Args:
            upper: Initial upper bracket (default: twice the scenario error norm)
            runs: Seeds per sweep (default: the scenario's run count)
            iterations: Bisection steps
        """
        hi = upper if upper is not None else 2.0 * max(self.scenario.initial_error, 1e-3)
        lo = 0.0
        sweeps: list[FeasibilitySweep] = []
        top = self.feasibility_sweep(hi, runs)
        sweeps.append(top)
        if top.robustly_feasible:
            return Calibration(error_norm=hi, iterations=0, sweeps=sweeps)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            sweep = self.feasibility_sweep(mid, runs)
            sweeps.append(sweep)
            if sweep.robustly_feasible:
                lo = mid
            else:
                hi = mid
        logger.info("Calibrated initial-error norm for %s: %.4g", self.scenario.name, lo)
        return Calibration(error_norm=lo, iterations=iterations, sweeps=sweeps)


COMPARISON_FIELDS = (
    "mode",
    "status",
    "duration",
    "max_error",
    "infeasible_events",
    "excursions",
    "nominal_duration",
)


def write_comparison_csv(report: ComparisonReport, path: str | Path) -> Path:
    """Write one row per controller with the nominal duration repeated."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=COMPARISON_FIELDS)
        writer.writeheader()
        for record in report.to_records():
            writer.writerow(
                {k: repr(v) if isinstance(v, float) else v for k, v in record.items()}
            )
    return out


def read_comparison_csv(path: str | Path) -> list[dict[str, Any]]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    floats = {"duration", "max_error", "nominal_duration"}
    ints = {"infeasible_events", "excursions"}
    return [
        {
            k: float(v) if k in floats else int(v) if k in ints else v
            for k, v in row.items()
        }
        for row in rows
    ]
