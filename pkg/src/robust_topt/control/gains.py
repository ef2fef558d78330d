"""PD gains of the computed-torque tracking controller."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from robust_topt.dynamics.models import Matrix


@dataclass(frozen=True, eq=False)
class TrackingGains:
    """Diagonal gain matrices Kp (1/s²) and Kd (1/s)."""

    kp: Matrix
    kd: Matrix

    def __post_init__(self) -> None:
        kp = np.atleast_2d(np.asarray(self.kp, dtype=float))
        kd = np.atleast_2d(np.asarray(self.kd, dtype=float))
        if kp.shape != kd.shape or kp.shape[0] != kp.shape[1]:
            raise ValueError(f"Kp and Kd must be square and equal-sized, got {kp.shape}, {kd.shape}")
        for name, gain in (("Kp", kp), ("Kd", kd)):
            if np.any(gain != np.diag(np.diag(gain))):
                raise ValueError(f"{name} must be diagonal")
            if np.any(np.diag(gain) <= 0.0):
                raise ValueError(f"{name} diagonal entries must be positive")
        object.__setattr__(self, "kp", kp)
        object.__setattr__(self, "kd", kd)

    @classmethod
    def from_omega(cls, omega: float, joint_count: int) -> TrackingGains:
        """Critically damped gains Kp = ω²I, Kd = 2ωI."""
        if omega <= 0.0:
            raise ValueError(f"omega must be positive, got {omega}")
        eye = np.eye(joint_count)
        return cls(kp=omega**2 * eye, kd=2.0 * omega * eye)

    @property
    def joint_count(self) -> int:
        return int(self.kp.shape[0])
