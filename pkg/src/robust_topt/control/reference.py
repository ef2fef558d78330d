"""Fixed time-indexed reference built from a nominal profile."""

from __future__ import annotations

import math
from dataclasses import dataclass

from robust_topt.control.tracking import DesiredState, desired_state
from robust_topt.exceptions import DegenerateProfileError
from robust_topt.geometry.path import PathSpline
from robust_topt.reachability.profile import NominalProfile


@dataclass(frozen=True)
class ReferenceSample:
    """Path state of the reference at one instant together with the joint targets."""

    t: float
    s: float
    sd: float
    u: float
    desired: DesiredState


@dataclass(frozen=True, eq=False)
class TimedReference:
    """(q_d, q̇_d, q̈_d)(t): the nominal profile replayed against the clock.

    Within stage i the control u_i is constant, so s(t) is quadratic in
    t − t_i. After the final time the reference rests at s = 1.
    """

    profile: NominalProfile
    path: PathSpline

    @property
    def duration(self) -> float:
        return self.profile.duration

    def path_state(self, t: float) -> tuple[float, float, float]:
        """(s, ṡ, u) of the reference at time ``t``."""
        profile = self.profile
        if t >= self.duration:
            return 1.0, float(math.sqrt(max(profile.xs[-1], 0.0))), 0.0
        t = max(t, 0.0)
        i = profile.stage_of_time(t)
        tau = t - float(profile.times[i])
        sd_i = math.sqrt(max(float(profile.xs[i]), 0.0))
        u = float(profile.us[i])
        s = float(profile.grid.s_values[i]) + sd_i * tau + 0.5 * u * tau * tau
        sd = max(sd_i + u * tau, 0.0)
        return min(s, 1.0), sd, u

    def sample(self, t: float) -> ReferenceSample:
        s, sd, u = self.path_state(t)
        return ReferenceSample(t=t, s=s, sd=sd, u=u, desired=desired_state(self.path, s, sd, u))

    def __call__(self, t: float) -> DesiredState:
        return self.sample(t).desired


def tt_reference(profile: NominalProfile, path: PathSpline) -> TimedReference:
    """Time-parameterized reference of the nominal optimal parameterization.

    Raises:
        DegenerateProfileError: The profile stalls at zero velocity somewhere
    """
    if profile.degenerate:
        raise DegenerateProfileError(
            "profile has a zero-velocity segment and no finite duration",
            details={"stages": profile.grid.stages},
        )
    return TimedReference(profile=profile, path=path)
