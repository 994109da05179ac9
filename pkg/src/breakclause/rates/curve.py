"""Discount curve with log-linear interpolation on discount factors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..numerics import Bracket, find_root


@dataclass(frozen=True)
class YieldCurve:
    """Pillars (t_i, P(0, t_i)) with t_i > 0; P(0, 0) = 1 is implicit.

    Beyond the last pillar the last segment's forward rate is extended.
    """

    times: tuple[float, ...]
    discounts: tuple[float, ...]

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        d = np.asarray(self.discounts, dtype=float)
        if t.ndim != 1 or t.size == 0 or t.size != d.size:
            raise ValueError("curve needs matching, nonempty pillar times and discounts")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(d))):
            raise ValueError("curve pillars must be finite")
        if t[0] <= 0 or np.any(np.diff(t) <= 0):
            raise ValueError("pillar times must be positive and strictly increasing")
        if np.any(d <= 0):
            raise ValueError("discount factors must be positive")

    @classmethod
    def from_zero_rates(cls, times: Sequence[float], zeros: Sequence[float]) -> "YieldCurve":
        """Continuously compounded zero rates."""
        return cls(
            tuple(float(t) for t in times),
            tuple(math.exp(-z * t) for t, z in zip(times, zeros)),
        )

    @classmethod
    def flat(cls, zero_rate: float, horizon: float = 50.0) -> "YieldCurve":
        return cls.from_zero_rates([horizon], [zero_rate])

    @classmethod
    def flat_par(cls, par_rate: float, tenor: float, frequency: int = 2) -> "YieldCurve":
        """Flat zero curve whose ``tenor`` par swap rate equals ``par_rate``."""
        return cls.flat(0.0).anchored_to_par(tenor, par_rate, frequency)

    def zero_rate(self, t: float) -> float:
        if t <= 0:
            return -math.log(self.discount(1e-8)) / 1e-8
        return -math.log(self.discount(t)) / t

    def discount(self, t: float) -> float:
        if t < 0:
            raise ValueError("negative time")
        if t == 0:
            return 1.0
        ts = (0.0,) + self.times
        logs = (0.0,) + tuple(math.log(d) for d in self.discounts)
        if t >= ts[-1]:
            i = len(ts) - 2
        else:
            i = int(np.searchsorted(ts, t, side="right")) - 1
        w = (t - ts[i]) / (ts[i + 1] - ts[i])
        return math.exp(logs[i] + w * (logs[i + 1] - logs[i]))

    def forward_rate(self, t1: float, t2: float) -> float:
        return math.log(self.discount(t1) / self.discount(t2)) / (t2 - t1)

    def annuity(self, start: float, end: float, frequency: int = 2) -> float:
        dates = payment_schedule(start, end, frequency)
        prev = start
        total = 0.0
        for d in dates:
            total += (d - prev) * self.discount(d)
            prev = d
        return total

    def par_rate(self, end: float, frequency: int = 2, start: float = 0.0) -> float:
        """Single-curve swap rate for the period [start, end]."""
        return (self.discount(start) - self.discount(end)) / self.annuity(start, end, frequency)

    def shifted(self, dz: float) -> "YieldCurve":
        """Parallel shift of all continuously compounded zero rates."""
        return YieldCurve(self.times, tuple(d * math.exp(-dz * t) for t, d in zip(self.times, self.discounts)))

    def anchored_to_par(self, tenor: float, par_rate: float, frequency: int = 2) -> "YieldCurve":
        """Parallel-shifted copy whose ``tenor`` par rate equals ``par_rate``."""

        def gap(dz: float) -> float:
            return self.shifted(dz).par_rate(tenor, frequency) - par_rate

        dz = find_root(gap, Bracket.around(gap, -0.5, 0.5), tol=1e-15)
        return self.shifted(dz)


def payment_schedule(start: float, end: float, frequency: int) -> list[float]:
    """Regular dates stepping back from ``end``; a short first period absorbs the rest."""
    if end <= start:
        raise ValueError("schedule end must follow start")
    step = 1.0 / frequency
    n = max(1, int(math.ceil((end - start) / step - 1e-9)))
    dates = [round(end - k * step, 12) for k in range(n - 1, -1, -1)]
    return [d for d in dates if d > start + 1e-12] or [end]
