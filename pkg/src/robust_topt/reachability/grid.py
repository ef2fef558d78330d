"""Discretization of the path coordinate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True, eq=False)
class DiscretizationGrid:
    """Stages 0 = s_0 < s_1 < … < s_N = 1 with spacings Δ_i = s_{i+1} − s_i."""

    s_values: NDArray[np.float64]

    def __post_init__(self) -> None:
        s = np.asarray(self.s_values, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("grid needs at least two points")
        if s[0] != 0.0 or s[-1] != 1.0:
            raise ValueError(f"grid must span [0, 1], got [{s[0]}, {s[-1]}]")
        if np.any(np.diff(s) <= 0.0):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "s_values", s)

    @classmethod
    def uniform(cls, stages: int) -> DiscretizationGrid:
        """Uniform spacing Δ_i = 1/N."""
        if stages < 2:
            raise ValueError(f"need at least 2 stages, got {stages}")
        s = np.linspace(0.0, 1.0, stages + 1)
        s[0], s[-1] = 0.0, 1.0
        return cls(s)

    @property
    def stages(self) -> int:
        """N, the number of stage intervals."""
        return int(self.s_values.size - 1)

    @property
    def deltas(self) -> NDArray[np.float64]:
        return np.diff(self.s_values)

    def stage_index(self, s: float) -> int:
        """Stage i with s_i <= s < s_{i+1}, clipped to [0, N − 1]."""
        i = int(np.searchsorted(self.s_values, s, side="right")) - 1
        return min(max(i, 0), self.stages - 1)
