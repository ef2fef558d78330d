"""Post-processing of simulated runs."""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from robust_topt.sim.results import SimResult

MIN_FIT_SAMPLES = 10
# errors below this fraction of the peak are integrator noise
CONVERGENCE_FLOOR = 1e-9


@dataclass(frozen=True)
class DecayFit:
    """Envelope ‖e(t)‖ ≈ K·exp(−λt)."""

    k: float
    rate: float
    k_envelope: float
    samples: int

    def __iter__(self) -> Iterator[float]:
        return iter((self.k, self.rate))


def fit_decay(t: ArrayLike, errors: ArrayLike) -> DecayFit:
    """Least-squares fit of log error norm against time.

    The window runs from the first sample to the first one that falls below
    ``CONVERGENCE_FLOOR`` times the peak. An all-zero series gives
    ``rate = inf``.

    Raises:
        ValueError: Fewer than ``MIN_FIT_SAMPLES`` positive errors in the window
    """
    tv = np.asarray(t, dtype=float).reshape(-1)
    ev = np.asarray(errors, dtype=float).reshape(-1)
    if tv.shape != ev.shape:
        raise ValueError("time and error series differ in length")
    peak = float(np.max(ev)) if ev.size else 0.0
    if peak <= 0.0:
        return DecayFit(k=0.0, rate=math.inf, k_envelope=0.0, samples=0)

    below = np.flatnonzero(ev <= CONVERGENCE_FLOOR * peak)
    end = int(below[0]) if below.size else ev.size
    tw, ew = tv[:end], ev[:end]
    if tw.size < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} positive error samples, got {tw.size}")

    slope, intercept = np.polyfit(tw, np.log(ew), 1)
    rate = float(-slope)
    k = float(math.exp(intercept))
    k_envelope = float(np.max(ew * np.exp(rate * tw)))
    return DecayFit(k=k, rate=rate, k_envelope=k_envelope, samples=int(tw.size))


def exponential_decay_fit(result: SimResult) -> DecayFit:
    """Fit the tracking-error envelope of a run; ``iter`` yields (K, λ)."""
    return fit_decay(result.t, result.err_norm)
