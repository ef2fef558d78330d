"""State of the coupled robot and path-parameterization system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from robust_topt.dynamics.models import Vector


@dataclass(frozen=True, eq=False)
class CoupledState:
    """y = (q, q̇, s, ṡ) with s ∈ [0, 1] and ṡ ≥ 0."""

    q: Vector
    qd: Vector
    s: float = 0.0
    sd: float = 0.0

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=float).reshape(-1)
        qd = np.asarray(self.qd, dtype=float).reshape(-1)
        if q.shape != qd.shape:
            raise ValueError(f"q and qd lengths differ: {q.size} vs {qd.size}")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s must lie in [0, 1], got {self.s}")
        if self.sd < 0.0:
            raise ValueError(f"sd must be >= 0, got {self.sd}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qd", qd)

    @property
    def joint_count(self) -> int:
        return int(self.q.size)

    @property
    def x(self) -> float:
        """Squared path velocity ṡ²."""
        return self.sd * self.sd

    def to_vector(self) -> NDArray[np.float64]:
        return np.concatenate([self.q, self.qd, [self.s, self.sd]])

    @classmethod
    def from_vector(cls, y: ArrayLike, joint_count: int) -> CoupledState:
        """Inverse of :meth:`to_vector`; s is clipped to [0, 1] and ṡ to [0, ∞)."""
        v = np.asarray(y, dtype=float)
        n = joint_count
        return cls(
            q=v[:n].copy(),
            qd=v[n : 2 * n].copy(),
            s=float(min(max(v[2 * n], 0.0), 1.0)),
            sd=float(max(v[2 * n + 1], 0.0)),
        )

    @classmethod
    def at_rest(
        cls, path_start: ArrayLike, error: ArrayLike | None = None, sd: float = 0.0
    ) -> CoupledState:
        """Start of the path displaced by a position error e = q_d − q."""
        p0 = np.asarray(path_start, dtype=float).reshape(-1)
        e = np.zeros_like(p0) if error is None else np.asarray(error, dtype=float).reshape(-1)
        return cls(q=p0 - e, qd=np.zeros_like(p0), s=0.0, sd=sd)
