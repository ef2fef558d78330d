"""Closed real intervals, possibly empty."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lo, hi]; empty when lo > hi."""

    lo: float
    hi: float

    @classmethod
    def empty(cls) -> Interval:
        return EMPTY

    @classmethod
    def point(cls, value: float) -> Interval:
        return cls(value, value)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi or math.isnan(self.lo) or math.isnan(self.hi)

    @property
    def width(self) -> float:
        return 0.0 if self.is_empty else self.hi - self.lo

    @property
    def midpoint(self) -> float:
        if self.is_empty:
            raise ValueError("empty interval has no midpoint")
        if math.isinf(self.lo) or math.isinf(self.hi):
            if math.isinf(self.lo) and math.isinf(self.hi):
                return 0.0
            return self.hi if math.isinf(self.lo) else self.lo
        return 0.5 * (self.lo + self.hi)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return not self.is_empty and self.lo - tol <= value <= self.hi + tol

    def intersect(self, other: Interval) -> Interval:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else EMPTY

    def issubset(self, other: Interval, tol: float = 0.0) -> bool:
        if self.is_empty:
            return True
        return not other.is_empty and other.lo - tol <= self.lo and self.hi <= other.hi + tol

    def clamp(self, value: float) -> float:
        if self.is_empty:
            raise ValueError("cannot clamp into an empty interval")
        return min(max(value, self.lo), self.hi)

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)


EMPTY = Interval(math.inf, -math.inf)
REAL_LINE = Interval(-math.inf, math.inf)
