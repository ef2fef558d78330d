"""Simulation results and their CSV / JSON serialization."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import orjson
from numpy.typing import NDArray


class TerminalStatus(str, Enum):
    """How a simulated run ended."""

    REACHED = "reached"
    INFEASIBLE = "infeasible"
    DIVERGED = "diverged"
    TIMEOUT = "timeout"
    TERMINAL_MISS = "terminal_miss"


@dataclass(frozen=True, eq=False)
class SimResult:
    """Per-sample telemetry of one run and how it ended.

    Rows are recorded at every control sample plus one final row at the end
    state; ``tau`` has shape (samples, n).
    """

    mode: str
    status: TerminalStatus
    t: NDArray[np.float64]
    s: NDArray[np.float64]
    sd: NDArray[np.float64]
    u: NDArray[np.float64]
    tau: NDArray[np.float64]
    err_norm: NDArray[np.float64]
    infeasible: NDArray[np.bool_]
    q: NDArray[np.float64] | None = None
    qd: NDArray[np.float64] | None = None
    excursions: int = 0
    saturated_samples: int = 0
    message: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def not_started(cls, mode: str, joint_count: int, message: str) -> SimResult:
        """Result of a run refused before the first sample (empty controllable sets)."""
        empty = np.zeros(0)
        return cls(
            mode=mode,
            status=TerminalStatus.INFEASIBLE,
            t=empty,
            s=empty,
            sd=empty,
            u=empty,
            tau=np.zeros((0, joint_count)),
            err_norm=empty,
            infeasible=np.zeros(0, dtype=bool),
            message=message,
        )

    @property
    def duration(self) -> float:
        return float(self.t[-1]) if self.t.size else 0.0

    @property
    def x(self) -> NDArray[np.float64]:
        return self.sd * self.sd

    @property
    def samples(self) -> int:
        return int(self.t.size)

    @property
    def joint_count(self) -> int:
        return int(self.tau.shape[1]) if self.tau.ndim == 2 else 0

    @property
    def max_error(self) -> float:
        return float(np.max(self.err_norm)) if self.err_norm.size else 0.0

    @property
    def infeasible_events(self) -> int:
        return int(np.count_nonzero(self.infeasible))

    @property
    def reached(self) -> bool:
        return self.status is TerminalStatus.REACHED

    def summary(self) -> dict[str, Any]:
        """JSON-ready run summary."""
        return {
            "mode": self.mode,
            "status": self.status.value,
            "duration": self.duration,
            "max_error": self.max_error,
            "initial_error": float(self.err_norm[0]) if self.err_norm.size else 0.0,
            "infeasible_events": self.infeasible_events,
            "excursions": self.excursions,
            "saturated_samples": self.saturated_samples,
            "samples": self.samples,
            "final_s": float(self.s[-1]) if self.s.size else 0.0,
            "final_sd": float(self.sd[-1]) if self.sd.size else 0.0,
            "message": self.message,
            **self.metadata,
        }


def telemetry_fields(joint_count: int) -> list[str]:
    return [
        "t",
        "s",
        "x",
        "u",
        *(f"tau_{j + 1}" for j in range(joint_count)),
        "err_norm",
        "infeasible_flag",
    ]


def write_telemetry_csv(result: SimResult, path: str | Path) -> Path:
    """Write ``t, s, x, u, tau_1..n, err_norm, infeasible_flag`` rows."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    n = result.joint_count
    x = result.x
    with out.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(telemetry_fields(n))
        for k in range(result.samples):
            writer.writerow(
                [
                    repr(float(result.t[k])),
                    repr(float(result.s[k])),
                    repr(float(x[k])),
                    repr(float(result.u[k])),
                    *(repr(float(v)) for v in result.tau[k]),
                    repr(float(result.err_norm[k])),
                    int(bool(result.infeasible[k])),
                ]
            )
    return out


@dataclass(frozen=True, eq=False)
class Telemetry:
    """Columns read back from a telemetry CSV."""

    t: NDArray[np.float64]
    s: NDArray[np.float64]
    x: NDArray[np.float64]
    u: NDArray[np.float64]
    tau: NDArray[np.float64]
    err_norm: NDArray[np.float64]
    infeasible: NDArray[np.bool_]


def read_telemetry_csv(path: str | Path) -> Telemetry:
    with Path(path).open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = list(reader)
    tau_cols = [i for i, name in enumerate(header) if name.startswith("tau_")]
    col = {name: i for i, name in enumerate(header)}
    data = np.array([[float(v) for v in row] for row in rows], dtype=float).reshape(
        len(rows), len(header)
    )
    return Telemetry(
        t=data[:, col["t"]],
        s=data[:, col["s"]],
        x=data[:, col["x"]],
        u=data[:, col["u"]],
        tau=data[:, tau_cols],
        err_norm=data[:, col["err_norm"]],
        infeasible=data[:, col["infeasible_flag"]].astype(bool),
    )


def _dumps(payload: Any) -> bytes:
    return orjson.dumps(
        payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
    )


def write_summary_json(summary: dict[str, Any], path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(_dumps(summary))
    return out


def read_summary_json(path: str | Path) -> dict[str, Any]:
    data: dict[str, Any] = orjson.loads(Path(path).read_bytes())
    return data
