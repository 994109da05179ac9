"""One-factor Hull-White trinomial lattice on an arbitrary time grid.

The state x = r - alpha(t) follows dx = -a x dt + sigma(t) dW. Slice i+1 has
node spacing sqrt(3 V_i) where V_i is the conditional variance over step i;
each node branches to the nearest node of its conditional mean and that
node's two neighbours, which keeps all three probabilities strictly positive
without a separate truncation rule. alpha is fitted by forward induction so
that Arrow-Debreu prices reprice the input curve on every slice.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curve import YieldCurve


@dataclass(frozen=True)
class HWParams:
    """Mean reversion and piecewise-constant short-rate volatility.

    ``sigmas[i]`` applies from ``sigma_times[i-1]`` (or 0) to ``sigma_times[i]``.
    """

    mean_reversion: float
    sigmas: tuple[float, ...]
    sigma_times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.mean_reversion <= 0:
            raise ValueError("mean reversion must be positive")
        if not self.sigmas or any(s <= 0 for s in self.sigmas):
            raise ValueError("volatilities must be positive")
        if len(self.sigma_times) != len(self.sigmas) - 1:
            raise ValueError("need one breakpoint fewer than volatility segments")
        if any(b <= a for a, b in zip(self.sigma_times, self.sigma_times[1:])):
            raise ValueError("volatility breakpoints must increase")

    @classmethod
    def constant(cls, mean_reversion: float, sigma: float) -> "HWParams":
        return cls(mean_reversion, (sigma,))

    def sigma_at(self, t: float) -> float:
        return self.sigmas[bisect.bisect_right(self.sigma_times, t)]


@dataclass
class HWTree:
    times: np.ndarray
    # per slice: state offsets x_j, node index offsets j, Arrow-Debreu prices
    x: list[np.ndarray]
    j: list[np.ndarray]
    arrow_debreu: list[np.ndarray]
    # per step i (slice i -> i+1)
    alpha: np.ndarray
    child: list[np.ndarray]
    probs: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    step_discount: list[np.ndarray] = field(repr=False)

    @property
    def n_slices(self) -> int:
        return len(self.times)

    def slice_index(self, t: float, tol: float = 1e-9) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > tol:
            raise ValueError(f"time {t} is not a slice of the tree")
        return i

    def short_rate(self, i: int) -> np.ndarray:
        if i >= len(self.alpha):
            raise IndexError("the last slice has no short rate")
        return self.alpha[i] + self.x[i]

    def step_back(self, values: np.ndarray, i: int) -> np.ndarray:
        """Discounted expectation at slice i of node values given at slice i+1."""
        pd, pm, pu = self.probs[i]
        c = self.child[i]
        return self.step_discount[i] * (pd * values[c - 1] + pm * values[c] + pu * values[c + 1])

    def rollback(self, values: np.ndarray, i_from: int, i_to: int) -> np.ndarray:
        if i_to > i_from:
            raise ValueError("rollback goes backwards in time")
        v = np.asarray(values, dtype=float)
        if v.shape != self.x[i_from].shape:
            raise ValueError("values do not match the slice's node count")
        for i in range(i_from - 1, i_to - 1, -1):
            v = self.step_back(v, i)
        return v

    def zcb(self, i_from: int, i_to: int) -> np.ndarray:
        """Node prices at slice ``i_from`` of the bond maturing at slice ``i_to``."""
        return self.rollback(np.ones_like(self.x[i_to]), i_to, i_from)


def build_tree(curve: YieldCurve, params: HWParams, slice_times: Sequence[float]) -> HWTree:
    times = np.asarray(slice_times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] != 0.0:
        raise ValueError("slice times must start at t0 = 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("slice times must be strictly increasing")
    a = params.mean_reversion

    xs = [np.zeros(1)]
    js = [np.zeros(1, dtype=int)]
    qs = [np.ones(1)]
    alphas, children, probs, discs = [], [], [], []
    for i, dt in enumerate(np.diff(times)):
        sig = params.sigma_at(times[i])
        var = sig * sig * -math.expm1(-2.0 * a * dt) / (2.0 * a)
        dx = math.sqrt(3.0 * var)
        mean = xs[i] * math.exp(-a * dt)
        k = np.rint(mean / dx).astype(int)
        eta = (mean - k * dx) / dx
        base = var / (2.0 * dx * dx) + 0.5 * eta * eta
        pu = base + 0.5 * eta
        pd = base - 0.5 * eta
        pm = 1.0 - pu - pd

        q = qs[i]
        alpha = math.log(float(np.dot(q, np.exp(-xs[i] * dt))) / curve.discount(times[i + 1])) / dt
        disc = np.exp(-(alpha + xs[i]) * dt)

        j_next = np.arange(k.min() - 1, k.max() + 2)
        c = k - j_next[0]
        q_next = np.zeros(j_next.size)
        weighted = q * disc
        np.add.at(q_next, c - 1, weighted * pd)
        np.add.at(q_next, c, weighted * pm)
        np.add.at(q_next, c + 1, weighted * pu)

        alphas.append(alpha)
        children.append(c)
        probs.append((pd, pm, pu))
        discs.append(disc)
        js.append(j_next)
        xs.append(j_next * dx)
        qs.append(q_next)

    return HWTree(times, xs, js, qs, np.array(alphas), children, probs, discs)


def make_slices(required: Sequence[float], max_step: float) -> list[float]:
    """Grid from 0 through every required time, no step longer than ``max_step``."""
    if max_step <= 0:
        raise ValueError("max_step must be positive")
    knots = sorted({0.0, *(round(float(t), 12) for t in required)})
    if knots[0] < 0:
        raise ValueError("negative slice time")
    out = [0.0]
    for lo, hi in zip(knots, knots[1:]):
        n = max(1, int(math.ceil((hi - lo) / max_step - 1e-9)))
        out.extend(lo + (hi - lo) * m / n for m in range(1, n + 1))
        out[-1] = hi
    return out
