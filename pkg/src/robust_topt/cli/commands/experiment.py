"""Experiment commands: solve, simulate, compare, sets-plot-data, calibrate."""

from __future__ import annotations

from pathlib import Path

import typer
from rich.console import Console

from robust_topt.cli.formatters import display_result, format_table
from robust_topt.exceptions import InfeasibleProblemError, ToptError
from robust_topt.models.scenario import ControlMode, record_calibration
from robust_topt.reachability.io import write_plot_data, write_sets_csv
from robust_topt.service.experiment import ExperimentService, write_comparison_csv
from robust_topt.sim.results import (
    SimResult,
    TerminalStatus,
    write_summary_json,
    write_telemetry_csv,
)

console = Console()

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_DIVERGED = 3

DEFAULT_SCENARIO = "config/scenarios/two_link.scenario.yaml"

CONFIG_OPTION = typer.Option(
    None, "--config", "-c", help="Scenario YAML (default: experiment.default_scenario)"
)
RADIUS_OPTION = typer.Option(None, "--radius", help="Perturbation radius R")
STAGES_OPTION = typer.Option(None, "--stages", help="Number of stages N")
SEED_OPTION = typer.Option(None, "--seed", help="Seed of the initial-error direction")
ERROR_OPTION = typer.Option(None, "--error", help="Initial joint position error norm (rad)")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output directory")
FORMAT_OPTION = typer.Option("table", "--format", "-f", help="Output format: table, json, yaml")


def resolve_scenario_path(config: Path | None) -> Path:
    """Explicit path, else the configured default relative to cwd or the project root."""
    if config is not None:
        return config
    from robust_topt.config.project import get_config_base, get_value

    default = Path(get_value("experiment.default_scenario", DEFAULT_SCENARIO))
    if default.is_absolute() or default.exists():
        return default
    return get_config_base().parent / default


def load_service(
    config: Path | None,
    *,
    radius: float | None = None,
    stages: int | None = None,
    seed: int | None = None,
    error: float | None = None,
    out: Path | None = None,
) -> ExperimentService:
    return ExperimentService.from_file(
        resolve_scenario_path(config),
        radius=radius,
        stages=stages,
        seed=seed,
        initial_error=error,
        output_dir=out,
    )


def _fail(e: ToptError) -> typer.Exit:
    if isinstance(e, InfeasibleProblemError):
        console.print(f"[bold red]Infeasible:[/bold red] {e.message}")
        if e.first_empty_stage is not None:
            console.print(f"  first empty stage: {e.first_empty_stage}")
        return typer.Exit(EXIT_INFEASIBLE)
    console.print(f"[bold red]Error:[/bold red] {e.message}")
    return typer.Exit(EXIT_ERROR)


def _exit_code(result: SimResult) -> int:
    if result.status is TerminalStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    if result.status is TerminalStatus.DIVERGED:
        return EXIT_DIVERGED
    return EXIT_OK


def _write_run(result: SimResult, directory: Path) -> tuple[Path, Path]:
    telemetry = write_telemetry_csv(result, directory / "telemetry.csv")
    summary = write_summary_json(result.summary(), directory / "summary.json")
    return telemetry, summary


def solve_command(
    config: Path | None = CONFIG_OPTION,
    radius: float | None = RADIUS_OPTION,
    stages: int | None = STAGES_OPTION,
    out: Path | None = OUT_OPTION,
    format: str = FORMAT_OPTION,
) -> None:
    """
    Compute robust controllable sets and write sets.csv.

    Examples:
        robust-topt solve
        robust-topt solve --radius 0 --stages 200 --out runs/nominal
    """
    try:
        service = load_service(config, radius=radius, stages=stages, out=out)
        report = service.solve()
    except ToptError as e:
        raise _fail(e)

    out_dir = service.scenario.output_dir
    sets_path = write_sets_csv(report.sets, out_dir / "sets.csv")
    summary = report.summary()
    write_summary_json(summary, out_dir / "solve.json")

    display_result(summary, format, title=f"Controllable sets: {service.scenario.name}")
    console.print(
        f"coefficients {report.coefficient_seconds * 1e3:.1f} ms, "
        f"recursion {report.recursion_seconds * 1e3:.1f} ms"
    )
    console.print(f"[green]✓[/green] wrote {sets_path}")

    if not report.feasible:
        console.print(
            f"[bold red]Infeasible:[/bold red] first empty stage {report.sets.first_empty_stage}"
        )
        raise typer.Exit(EXIT_INFEASIBLE)


def simulate_command(
    mode: ControlMode = typer.Option(ControlMode.TOPT, "--mode", "-m", help="topt, os or tt"),
    config: Path | None = CONFIG_OPTION,
    radius: float | None = RADIUS_OPTION,
    stages: int | None = STAGES_OPTION,
    seed: int | None = SEED_OPTION,
    error: float | None = ERROR_OPTION,
    out: Path | None = OUT_OPTION,
    format: str = FORMAT_OPTION,
) -> None:
    """
    Simulate one controller and write telemetry.csv and summary.json.

    Examples:
        robust-topt simulate --mode topt
        robust-topt simulate --mode tt --seed 3 --error 0.1
    """
    try:
        service = load_service(
            config, radius=radius, stages=stages, seed=seed, error=error, out=out
        )
        result = service.simulate_mode(mode)
    except ToptError as e:
        raise _fail(e)

    telemetry, _ = _write_run(result, service.scenario.output_dir / mode.value)
    display_result(result.summary(), format, title=f"Run: {mode.value}")
    console.print(f"[green]✓[/green] wrote {telemetry}")
    raise typer.Exit(_exit_code(result))


def compare_command(
    config: Path | None = CONFIG_OPTION,
    radius: float | None = RADIUS_OPTION,
    stages: int | None = STAGES_OPTION,
    seed: int | None = SEED_OPTION,
    error: float | None = ERROR_OPTION,
    out: Path | None = OUT_OPTION,
    sequential: bool = typer.Option(False, "--sequential", help="Run modes one after another"),
    format: str = FORMAT_OPTION,
) -> None:
    """
    Run every scenario controller from the same initial error and tabulate them.

    Examples:
        robust-topt compare
        robust-topt compare --error 0 --radius 0
    """
    try:
        service = load_service(
            config, radius=radius, stages=stages, seed=seed, error=error, out=out
        )
        report = service.compare(concurrent=not sequential)
    except ToptError as e:
        raise _fail(e)

    out_dir = service.scenario.output_dir
    for mode, result in report.results.items():
        _write_run(result, out_dir / mode.value)
    table_path = write_comparison_csv(report, out_dir / "comparison.csv")

    records = report.to_records()
    if format == "table":
        format_table(records, title=f"Controller comparison (|e0| = {report.initial_error:g} rad)")
    else:
        display_result(records, format)
    console.print(f"[green]✓[/green] wrote {table_path}")

    topt = report.results.get(ControlMode.TOPT)
    if topt is not None and topt.status is TerminalStatus.INFEASIBLE:
        raise typer.Exit(EXIT_INFEASIBLE)


def sets_plot_data_command(
    config: Path | None = CONFIG_OPTION,
    radii: list[float] | None = typer.Option(
        None, "--radius", help="Radius to include (repeatable; default 0, 0.25 and the scenario R)"
    ),
    stages: int | None = STAGES_OPTION,
    out: Path | None = OUT_OPTION,
) -> None:
    """
    Write tidy CSV of set bounds per radius and the nominal profile.

    Examples:
        robust-topt sets-plot-data --radius 0 --radius 0.5
    """
    try:
        service = load_service(config, stages=stages, out=out)
        selected = radii or sorted({0.0, 0.25, service.scenario.radius})
        data = service.plot_data(selected)
    except ToptError as e:
        raise _fail(e)

    sets_path, profile_path = write_plot_data(data, service.scenario.output_dir)
    console.print(f"[green]✓[/green] wrote {sets_path}")
    console.print(f"[green]✓[/green] wrote {profile_path}")


def calibrate_command(
    config: Path | None = CONFIG_OPTION,
    radius: float | None = RADIUS_OPTION,
    stages: int | None = STAGES_OPTION,
    runs: int | None = typer.Option(None, "--runs", help="Seeds per sweep"),
    iterations: int = typer.Option(8, "--iterations", help="Bisection steps"),
    upper: float | None = typer.Option(None, "--upper", help="Initial upper error bracket"),
    record: bool = typer.Option(
        True, "--record/--no-record", help="Write the result into the scenario file"
    ),
    format: str = FORMAT_OPTION,
) -> None:
    """
    Find the largest initial-error norm for which TOPT stays feasible on every seed.

    Examples:
        robust-topt calibrate --runs 20 --iterations 6
        robust-topt calibrate --stages 200 --no-record
    """
    scenario_path = resolve_scenario_path(config)
    try:
        service = load_service(scenario_path, radius=radius, stages=stages)
        calibration = service.calibrate_error_radius(
            upper=upper, runs=runs, iterations=iterations
        )
    except ToptError as e:
        raise _fail(e)

    rows = [
        {
            "error_norm": sweep.error_norm,
            "runs": sweep.runs,
            "reached": sweep.reached,
            "runs_with_events": sweep.runs_with_events,
            "max_error": sweep.max_error,
        }
        for sweep in calibration.sweeps
    ]
    display_result(rows, format, title="Feasibility sweeps")
    console.print(f"calibrated initial-error norm: [bold]{calibration.error_norm:.4g}[/bold] rad")

    if not record:
        return
    if radius is not None or stages is not None:
        console.print("[yellow]Not recorded:[/yellow] --radius/--stages differ from the scenario")
        return
    try:
        record_calibration(scenario_path, calibration.error_norm)
    except ToptError as e:
        raise _fail(e)
    console.print(f"recorded as error_radius_calibrated in {scenario_path}")


def register(app: typer.Typer) -> None:
    """Attach the experiment commands to ``app``."""
    app.command(name="solve")(solve_command)
    app.command(name="simulate")(simulate_command)
    app.command(name="compare")(compare_command)
    app.command(name="sets-plot-data")(sets_plot_data_command)
    app.command(name="calibrate")(calibrate_command)
