"""CSV writers and readers for controllable sets and set plot data."""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from robust_topt.reachability.interval import Interval
from robust_topt.reachability.profile import NominalProfile
from robust_topt.reachability.sets import ControllableSets

SETS_FIELDS = ("stage", "s", "K_lo", "K_hi")
PLOT_SET_FIELDS = ("stage", "s", "radius", "K_lo", "K_hi")
PLOT_PROFILE_FIELDS = ("stage", "s", "x_nominal")


def _fmt(value: float) -> str:
    return repr(float(value))


def write_sets_csv(sets: ControllableSets, path: str | Path) -> Path:
    """Write ``stage, s, K_lo, K_hi``; empty stages are written as ``inf, -inf``."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=SETS_FIELDS)
        writer.writeheader()
        for i, s in enumerate(sets.s_values):
            writer.writerow(
                {
                    "stage": i,
                    "s": _fmt(s),
                    "K_lo": _fmt(sets.lower[i]),
                    "K_hi": _fmt(sets.upper[i]),
                }
            )
    return out


def read_sets_csv(path: str | Path, terminal: Interval | None = None) -> ControllableSets:
    """Read a file written by :func:`write_sets_csv`.

    The terminal set defaults to the last row; the first empty stage is
    recovered from the highest empty row.
    """
    with Path(path).open(newline="", encoding="utf-8") as f:
        rows = sorted(csv.DictReader(f), key=lambda r: int(r["stage"]))
    if not rows:
        raise ValueError(f"{path} holds no set rows")
    s_values = np.array([float(r["s"]) for r in rows])
    lower = np.array([float(r["K_lo"]) for r in rows])
    upper = np.array([float(r["K_hi"]) for r in rows])
    empty = [i for i in range(len(rows)) if lower[i] > upper[i]]
    last = Interval(float(lower[-1]), float(upper[-1]))
    return ControllableSets(
        s_values=s_values,
        lower=lower,
        upper=upper,
        terminal=terminal if terminal is not None else last,
        radius=float("nan"),
        first_empty_stage=max(empty) if empty else None,
    )


@dataclass(frozen=True)
class SetPlotData:
    """Tidy tables of set bounds per radius and of the nominal profile."""

    set_rows: list[dict[str, float]]
    profile_rows: list[dict[str, float]]


def build_plot_data(
    sets_by_radius: Mapping[float, ControllableSets], profile: NominalProfile | None
) -> SetPlotData:
    set_rows = [
        {
            "stage": i,
            "s": float(s),
            "radius": float(radius),
            "K_lo": float(sets.lower[i]),
            "K_hi": float(sets.upper[i]),
        }
        for radius, sets in sorted(sets_by_radius.items())
        for i, s in enumerate(sets.s_values)
    ]
    profile_rows = []
    if profile is not None:
        profile_rows = [
            {"stage": i, "s": float(s), "x_nominal": float(x)}
            for i, (s, x) in enumerate(zip(profile.grid.s_values, profile.xs, strict=True))
        ]
    return SetPlotData(set_rows=set_rows, profile_rows=profile_rows)


def _write_rows(path: Path, fields: tuple[str, ...], rows: Iterable[Mapping[str, float]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {k: (int(row[k]) if k == "stage" else _fmt(row[k])) for k in fields}
            )


def write_plot_data(data: SetPlotData, directory: str | Path) -> tuple[Path, Path]:
    """Write ``sets_by_radius.csv`` and ``nominal_profile.csv`` into ``directory``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    sets_path = out / "sets_by_radius.csv"
    profile_path = out / "nominal_profile.csv"
    _write_rows(sets_path, PLOT_SET_FIELDS, data.set_rows)
    _write_rows(profile_path, PLOT_PROFILE_FIELDS, data.profile_rows)
    return sets_path, profile_path


def read_plot_data(directory: str | Path) -> SetPlotData:
    """Read the two files written by :func:`write_plot_data`."""
    base = Path(directory)

    def load(name: str) -> list[dict[str, float]]:
        with (base / name).open(newline="", encoding="utf-8") as f:
            return [
                {k: (int(v) if k == "stage" else float(v)) for k, v in row.items()}
                for row in csv.DictReader(f)
            ]

    return SetPlotData(
        set_rows=load("sets_by_radius.csv"), profile_rows=load("nominal_profile.csv")
    )
