"""Interest-rate swap valuation on the Hull-White lattice with break clauses.

Single-curve setting: the floating leg resets on the tree's own bond prices,
so its value on a reset date telescopes to N (1 - P(t, T_N)). Exposures are
measured on the period-start dates T_{k-1} just after the flows settling
there, and a default in (T_{k-1}, T_k) settles against that exposure. Break
dates must be payment dates (or t0), where the node value is Markov.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Literal, Sequence

import numpy as np

from ..credit import DefaultModel, Party, first_to_default_prob, survival_to
from ..numerics import Bracket, RootFindingError, find_root, norm_cdf
from ..report import ValuationReport
from .curve import YieldCurve, payment_schedule
from .tree import HWParams, HWTree, build_tree, make_slices

Side = Literal["payer", "receiver"]
DEFAULT_MAX_STEP = 1.0 / 12.0


class Holder(enum.Enum):
    B_ONLY = "B_only"
    A_ONLY = "A_only"
    MUTUAL = "mutual"


@dataclass(frozen=True)
class SwapSpec:
    """Fixed-for-floating swap; ``side`` refers to the fixed leg as seen by B."""

    notional: float = 1.0
    fixed_rate: float = 0.0
    maturity: float = 4.0
    frequency: int = 2
    side: Side = "payer"
    start: float = 0.0

    def __post_init__(self):
        if self.side not in ("payer", "receiver"):
            raise ValueError(f"side must be payer or receiver, got {self.side!r}")
        if self.maturity <= self.start or self.frequency <= 0:
            raise ValueError("swap needs maturity after start and a positive frequency")

    @property
    def sign(self) -> float:
        return 1.0 if self.side == "payer" else -1.0

    @property
    def dates(self) -> tuple[float, ...]:
        """Start date followed by the payment dates T_1..T_N."""
        return (self.start, *payment_schedule(self.start, self.maturity, self.frequency))

    @property
    def year_fractions(self) -> np.ndarray:
        return np.diff(self.dates)

    def with_rate(self, rate: float) -> "SwapSpec":
        return replace(self, fixed_rate=rate)

    def with_side(self, side: Side) -> "SwapSpec":
        return replace(self, side=side)


@dataclass(frozen=True)
class BreakSchedule:
    dates: tuple[float, ...]
    holder: Holder = Holder.B_ONLY

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("break dates must be strictly increasing")
        if any(d < 0 for d in self.dates):
            raise ValueError("break dates must be nonnegative")


class SwapLattice:
    """Rate-independent swap legs per node on payment-date slices.

    ``value_nodes(j, rate)`` is linear in the fixed rate, so par-rate
    solving only re-runs the credit rollbacks.
    """

    def __init__(self, tree: HWTree, swap: SwapSpec):
        self.tree = tree
        self.swap = swap
        self.dates = swap.dates
        try:
            self.slices = [tree.slice_index(t) for t in self.dates]
        except ValueError as exc:
            raise ValueError(f"swap dates must lie on tree slices: {exc}") from None
        n = len(self.dates) - 1
        delta = swap.year_fractions
        last = tree.x[self.slices[n]]
        annuity = [np.zeros_like(last)]
        to_maturity = [np.ones_like(last)]
        for j in range(n - 1, -1, -1):
            annuity.append(tree.rollback(annuity[-1] + delta[j], self.slices[j + 1], self.slices[j]))
            to_maturity.append(tree.rollback(to_maturity[-1], self.slices[j + 1], self.slices[j]))
        self.annuity = annuity[::-1]
        self.floating = [1.0 - p for p in to_maturity[::-1]]

    @property
    def n_periods(self) -> int:
        return len(self.dates) - 1

    def date_index(self, t: float, tol: float = 1e-9) -> int:
        for j, d in enumerate(self.dates):
            if abs(d - t) <= tol:
                return j
        raise ValueError(f"time {t} is not the swap start or a payment date {self.dates}")

    def value_nodes(self, j: int, rate: float | None = None) -> np.ndarray:
        c = self.swap.fixed_rate if rate is None else rate
        return self.swap.sign * self.swap.notional * (self.floating[j] - c * self.annuity[j])

    def risk_free_par_rate(self) -> float:
        return float(self.floating[0][0] / self.annuity[0][0])

    def roll(self, values: np.ndarray, j_from: int, j_to: int) -> np.ndarray:
        return self.tree.rollback(values, self.slices[j_from], self.slices[j_to])

    def discounted_sum(
        self, terms: Callable[[int], np.ndarray | None], j_from: int, j_to: int
    ) -> np.ndarray:
        """Per-node value at payment slice j_from of sum_{k=j_from}^{j_to-1} terms(k)."""
        acc = np.zeros_like(self.tree.x[self.slices[j_to]])
        for k in range(j_to - 1, j_from - 1, -1):
            acc = self.roll(acc, k + 1, k)
            term = terms(k)
            if term is not None:
                acc = acc + term
        return acc

    def credit_leg(
        self, rate: float | None, model: DefaultModel, party: Party, j_from: int, j_to: int
    ) -> np.ndarray:
        """Conditional BCVA (party A) or BDVA (party B) over exposure dates [j_from, j_to).

        Weights are first-to-default probabilities divided by the survival
        probability to T_{j_from}.
        """
        lgd = model.lgd(party)
        sign = 1.0 if party is Party.A else -1.0
        d = self.dates

        def term(k: int):
            w = lgd * first_to_default_prob(model, party, d[k], d[k + 1])
            if w == 0.0:
                return None
            return w * np.maximum(sign * self.value_nodes(k, rate), 0.0)

        leg = self.discounted_sum(term, j_from, j_to)
        return leg / survival_to(model, d[j_from])

    def continuation_gain(
        self, rate: float | None, model: DefaultModel, j_from: int, j_to: int
    ) -> np.ndarray:
        return self.credit_leg(rate, model, Party.B, j_from, j_to) - self.credit_leg(
            rate, model, Party.A, j_from, j_to
        )

    def continuation_gains(
        self, rate: float | None, model: DefaultModel, break_idx: Sequence[int], holder: Holder
    ) -> list[np.ndarray]:
        """Per-node gain from continuing at each break, given optimal later decisions.

        Conditional on survival to the break. B continues where the gain is
        positive; A (as holder) breaks where it is nonnegative.
        """
        clip = _clipper(holder)
        gains = [self.continuation_gain(rate, model, break_idx[-1], self.n_periods)]
        for here, nxt in zip(reversed(break_idx[:-1]), reversed(break_idx[1:])):
            survive = survival_to(model, self.dates[nxt]) / survival_to(model, self.dates[here])
            gains.append(
                self.continuation_gain(rate, model, here, nxt)
                + survive * self.roll(clip(gains[-1]), nxt, here)
            )
        return gains[::-1]

    def break_indices(self, breaks: BreakSchedule) -> list[int]:
        idx = [self.date_index(t) for t in breaks.dates]
        if idx and idx[-1] >= self.n_periods:
            raise ValueError("break dates must precede maturity")
        return idx

    def value(
        self, model: DefaultModel, breaks: BreakSchedule | None = None, rate: float | None = None
    ) -> ValuationReport:
        n = self.n_periods
        v0 = float(self.value_nodes(0, rate)[0])
        idx = self.break_indices(breaks) if breaks is not None and breaks.dates else []
        horizon = idx[0] if idx else n
        bcva = float(self.credit_leg(rate, model, Party.A, 0, horizon)[0])
        bdva = float(self.credit_leg(rate, model, Party.B, 0, horizon)[0])
        diagnostics = {"slices": self.tree.n_slices}
        option = 0.0
        if idx and breaks.holder is not Holder.MUTUAL:
            y = self.continuation_gains(rate, model, idx, breaks.holder)[0]
            clipped = _clipper(breaks.holder)(y)
            first = idx[0]
            option = survival_to(model, self.dates[first]) * float(self.roll(clipped, first, 0)[0])
            exercised = ~continues(y, breaks.holder)
            q = self.tree.arrow_debreu[self.slices[first]]
            diagnostics["exercise_probability"] = float(np.dot(q, exercised) / q.sum())
        elif idx:
            diagnostics["exercise_probability"] = 1.0
        return ValuationReport.assemble(v0, bcva, bdva, option, **diagnostics)


def _clipper(holder: Holder) -> Callable[[np.ndarray], np.ndarray]:
    if holder is Holder.B_ONLY:
        return lambda y: np.maximum(y, 0.0)
    if holder is Holder.A_ONLY:
        return lambda y: np.minimum(y, 0.0)
    return np.zeros_like


def continues(gain: np.ndarray, holder: Holder) -> np.ndarray:
    """Nodes where the contract survives the break date (exercise rule of the holder)."""
    if holder is Holder.B_ONLY:
        return gain > 0.0
    if holder is Holder.A_ONLY:
        return gain < 0.0
    return np.zeros(gain.shape, dtype=bool)


def swap_value_nodes(tree: HWTree, swap: SwapSpec, t: float) -> np.ndarray:
    """Default-free value per node at ``t`` (t0 or a payment date) of flows after ``t``."""
    lattice = SwapLattice(tree, swap)
    return lattice.value_nodes(lattice.date_index(t))


def exposure_leg(
    tree: HWTree,
    swap: SwapSpec,
    t1: float,
    credit: DefaultModel,
    party: Party,
    horizon: float | None = None,
) -> np.ndarray:
    """Conditional BCVA_B (``party`` A) or BDVA_B (``party`` B) per node at ``t1``."""
    lattice = SwapLattice(tree, swap)
    j_to = lattice.n_periods if horizon is None else lattice.date_index(horizon)
    return lattice.credit_leg(None, credit, party, lattice.date_index(t1), j_to)


def ubc_value(tree: HWTree, swap: SwapSpec, credit: DefaultModel, breaks: BreakSchedule) -> float:
    """Break-option term: survival-weighted, discounted positive continuation gain."""
    if breaks.holder is Holder.A_ONLY:
        # A's option seen from A's side
        mirrored = DefaultModel(credit.lambda_B, credit.lambda_A, credit.theta, credit.lgd_B, credit.lgd_A)
        other = "receiver" if swap.side == "payer" else "payer"
        return ubc_value(tree, swap.with_side(other), mirrored, BreakSchedule(breaks.dates))
    if breaks.holder is Holder.MUTUAL:
        return 0.0
    return SwapLattice(tree, swap).value(credit, breaks).bc_option


def mutual_bc_value(tree: HWTree, swap: SwapSpec, credit: DefaultModel, t_hat: float) -> float:
    lattice = SwapLattice(tree, swap)
    if abs(t_hat - lattice.dates[-1]) <= 1e-9:
        return lattice.value(credit).adjusted_value
    return lattice.value(credit, BreakSchedule((t_hat,), Holder.MUTUAL)).adjusted_value


def par_rate(
    pricer: Callable[[float], float], guess: float = 0.0, width: float = 0.02, tol: float = 1e-7
) -> float:
    """Fixed rate zeroing ``pricer``; the bracket widens from guess +- width."""
    lo, hi = guess - width, guess + width
    f_lo, f_hi = pricer(lo), pricer(hi)
    for _ in range(8):
        if f_lo * f_hi <= 0.0:
            break
        lo, hi = guess - 2 * (guess - lo), guess + 2 * (hi - guess)
        f_lo, f_hi = pricer(lo), pricer(hi)
    else:
        raise RootFindingError(f"no par-rate bracket around {guess}")
    return find_root(pricer, Bracket(lo, hi, f_lo, f_hi), tol=min(tol, 1e-12))


def lattice_par_rate(lattice: SwapLattice, model: DefaultModel, breaks: BreakSchedule | None = None):
    return par_rate(
        lambda c: lattice.value(model, breaks, rate=c).adjusted_value,
        guess=lattice.risk_free_par_rate(),
    )


@dataclass(frozen=True)
class SwaptionQuote:
    """Lognormal ATM volatility of a payer swaption, expiry x tenor in years."""

    expiry: float = 2.0
    tenor: float = 2.0
    vol: float = 0.376
    frequency: int = 2

    def underlying(self) -> SwapSpec:
        return SwapSpec(1.0, 0.0, self.expiry + self.tenor, self.frequency, "payer", self.expiry)


def black_swaption_price(curve: YieldCurve, quote: SwaptionQuote) -> float:
    end = quote.expiry + quote.tenor
    annuity = curve.annuity(quote.expiry, end, quote.frequency)
    fwd = curve.par_rate(end, quote.frequency, start=quote.expiry)
    half = 0.5 * quote.vol * math.sqrt(quote.expiry)
    return annuity * fwd * (norm_cdf(half) - norm_cdf(-half))


def tree_swaption_price(tree: HWTree, curve: YieldCurve, quote: SwaptionQuote) -> float:
    under = quote.underlying()
    fwd = curve.par_rate(under.maturity, quote.frequency, start=quote.expiry)
    lattice = SwapLattice(tree, under.with_rate(fwd))
    payoff = np.maximum(lattice.value_nodes(0), 0.0)
    return float(np.dot(tree.arrow_debreu[lattice.slices[0]], payoff))


def calibrate_sigma(
    curve: YieldCurve,
    mean_reversion: float,
    quote: SwaptionQuote,
    slice_times: Sequence[float] | None = None,
    max_step: float = DEFAULT_MAX_STEP,
) -> HWParams:
    """Single-segment sigma matching the Black price of the ATM payer swaption."""
    if slice_times is None:
        slice_times = make_slices(quote.underlying().dates, max_step)
    target = black_swaption_price(curve, quote)

    def gap(sigma: float) -> float:
        tree = build_tree(curve, HWParams.constant(mean_reversion, sigma), slice_times)
        return tree_swaption_price(tree, curve, quote) - target

    try:
        bracket = Bracket.around(gap, 1e-4, 0.2)
    except RootFindingError as exc:
        raise RootFindingError(f"no sigma in [1e-4, 0.2] matches the swaption quote: {exc}") from None
    sigma = find_root(gap, bracket, tol=1e-12)
    return HWParams.constant(mean_reversion, sigma)
