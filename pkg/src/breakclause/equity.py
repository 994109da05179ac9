"""Equity forward between two defaultable parties, with an optional break clause.

Defaults are lumped onto the grid of valuation dates: a default in
(t_{i-1}, t_i) settles at t_i^- against the default-free value at t_i. With
one break date t_hat held by B, the grid is {t_hat, T}; the break option is
priced Geske-Johnson style by solving for the spot level at t_hat that
separates continuation from exercise and then integrating the terminal
payoffs against a bivariate normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Literal

from .credit import DefaultModel, Party, first_to_default_prob
from .numerics import INF, Bracket, binorm_cdf, find_root, norm_cdf
from .report import ValuationReport

Side = Literal["payer", "receiver"]


@dataclass(frozen=True)
class EquityForwardSpec:
    """Forward on a non-dividend stock; the payer receives S_T - K at T."""

    s0: float
    strike: float
    maturity: float
    sigma: float
    rate: float = 0.0
    side: Side = "payer"

    def __post_init__(self):
        if self.s0 <= 0 or self.sigma <= 0 or self.maturity <= 0:
            raise ValueError("s0, sigma and maturity must be positive")
        if self.side not in ("payer", "receiver"):
            raise ValueError(f"side must be payer or receiver, got {self.side!r}")

    @property
    def sign(self) -> float:
        return 1.0 if self.side == "payer" else -1.0

    def discount(self, t1: float, t2: float) -> float:
        return math.exp(-self.rate * (t2 - t1))

    def with_strike(self, strike: float) -> "EquityForwardSpec":
        return replace(self, strike=strike)


@dataclass(frozen=True)
class SingleBreak:
    t_hat: float


def forward_value(spec: EquityForwardSpec, t: float, s_t: float) -> float:
    if t >= spec.maturity:
        raise ValueError("valuation time must precede maturity")
    return spec.sign * (s_t - spec.strike * spec.discount(t, spec.maturity))


def bs_option_on_forward(
    spec: EquityForwardSpec,
    t: float,
    expiry: float,
    strike_eff: float,
    kind: Literal["call", "put"],
    spot: float | None = None,
) -> float:
    """Black-Scholes value at ``t`` of [+-(S_expiry - strike_eff)]^+ paid at ``expiry``.

    With ``strike_eff = K P(expiry, T)`` this is the option on the forward's
    default-free value at ``expiry``.
    """
    if not t <= expiry <= spec.maturity:
        raise ValueError("need t <= expiry <= maturity")
    s = spec.s0 if spot is None else spot
    tau = expiry - t
    df = spec.discount(t, expiry)
    if strike_eff <= 0.0:
        # option is always exercised
        return s - strike_eff * df if kind == "call" else 0.0
    if s <= 0.0:
        return 0.0 if kind == "call" else strike_eff * df
    if tau == 0.0:
        return max(s - strike_eff, 0.0) if kind == "call" else max(strike_eff - s, 0.0)
    vol = spec.sigma * math.sqrt(tau)
    d1 = (math.log(s / (strike_eff * df)) + 0.5 * vol * vol) / vol
    d2 = d1 - vol
    if kind == "call":
        return s * norm_cdf(d1) - strike_eff * df * norm_cdf(d2)
    if kind == "put":
        return strike_eff * df * norm_cdf(-d2) - s * norm_cdf(-d1)
    raise ValueError(f"unknown option kind {kind!r}")


def _exposure_option(
    spec: EquityForwardSpec, t: float, at: float, positive: bool, spot: float | None = None
) -> float:
    """Value at ``t`` of [V0(at)]^+ (positive) or [-V0(at)]^+ from B's side."""
    strike_eff = spec.strike * spec.discount(at, spec.maturity)
    is_call = (spec.side == "payer") == positive
    return bs_option_on_forward(spec, t, at, strike_eff, "call" if is_call else "put", spot)


def _weights(model: DefaultModel, t1: float, t2: float) -> tuple[float, float]:
    """(L_A P_A(t1,t2), L_B P_B(t1,t2))."""
    return (
        model.lgd_A * first_to_default_prob(model, Party.A, t1, t2),
        model.lgd_B * first_to_default_prob(model, Party.B, t1, t2),
    )


def value_no_bc(
    spec: EquityForwardSpec, model: DefaultModel, t_hat: float | None = None
) -> ValuationReport:
    """Bilateral value with defaults lumped on {t_hat, T}, or on {T} alone."""
    T = spec.maturity
    if t_hat is not None and not 0.0 < t_hat < T:
        raise ValueError("lumping date must lie strictly inside (0, T)")
    dates = [T] if t_hat is None else [t_hat, T]
    bcva = bdva = 0.0
    prev = 0.0
    for d in dates:
        wa, wb = _weights(model, prev, d)
        if wa:
            bcva += wa * _exposure_option(spec, 0.0, d, positive=True)
        if wb:
            bdva += wb * _exposure_option(spec, 0.0, d, positive=False)
        prev = d
    return ValuationReport.assemble(
        forward_value(spec, 0.0, spec.s0), bcva, bdva, lumping_dates=len(dates)
    )


def continuation_gain(spec: EquityForwardSpec, model: DefaultModel, t_hat: float, s_hat: float):
    """BDVA - BCVA over (t_hat, T) at spot ``s_hat``, unconditional weights.

    Positive means B prefers to keep the contract alive at ``t_hat``.
    """
    wa, wb = _weights(model, t_hat, spec.maturity)
    gain = 0.0
    if wb:
        gain += wb * _exposure_option(spec, t_hat, spec.maturity, positive=False, spot=s_hat)
    if wa:
        gain -= wa * _exposure_option(spec, t_hat, spec.maturity, positive=True, spot=s_hat)
    return gain


def _boundary(spec: EquityForwardSpec, model: DefaultModel, t_hat: float) -> tuple[float, bool]:
    """Return (U, continue_below): B continues at t_hat iff S < U (or S > U)."""
    wa, wb = _weights(model, t_hat, spec.maturity)
    payer = spec.side == "payer"
    if wa == 0.0 and wb == 0.0:
        # gain identically zero: the continuation condition (>= 0) always holds
        return (INF, True) if payer else (0.0, False)
    if wb == 0.0:
        # gain < 0 for every spot: always exercise
        return (0.0, True) if payer else (INF, False)
    if wa == 0.0:
        return (INF, True) if payer else (0.0, False)

    def g(s: float) -> float:
        return continuation_gain(spec, model, t_hat, s)

    centre = spec.strike * spec.discount(t_hat, spec.maturity)
    lo, hi = centre, centre
    for _ in range(200):
        lo *= 0.5
        hi *= 2.0
        g_lo, g_hi = g(lo), g(hi)
        # compare signs, not the product, which underflows for tiny intensities
        if (g_lo > 0.0 and g_hi < 0.0) or (g_lo < 0.0 and g_hi > 0.0):
            break
    else:
        raise ValueError("could not bracket the exercise boundary")
    root = find_root(g, Bracket(lo, hi, g_lo, g_hi), tol=1e-14 * centre)
    continue_below = g_lo > 0.0
    # orientation check: payer gains from continuing at low spots, receiver at high
    if continue_below != payer:
        raise ArithmeticError("exercise region orientation does not match the contract side")
    return root, continue_below


def exercise_boundary(spec: EquityForwardSpec, model: DefaultModel, t_hat: float) -> float:
    """Spot level U at t_hat where continuing and breaking have equal value.

    Degenerate credit returns the 0 or +inf sentinel that makes the
    continuation region (S < U for a payer, S > U for a receiver) empty or
    total as appropriate.
    """
    return _boundary(spec, model, t_hat)[0]


def _z(spec: EquityForwardSpec, level: float, t: float) -> float:
    """Standardised Gaussian threshold for S_t < level under the pricing measure."""
    if level <= 0.0:
        return -INF
    if math.isinf(level):
        return INF
    vol = spec.sigma * math.sqrt(t)
    return (math.log(level / spec.s0) - (spec.rate - 0.5 * spec.sigma ** 2) * t) / vol


def barrier_expectation(
    spec: EquityForwardSpec,
    t_hat: float,
    level: float,
    kind: Literal["call", "put"],
    below: bool,
) -> float:
    """E{D(0,T) [+-(S_T - K)]^+ 1{S_t_hat < level}} (or ``> level`` when ``below`` is False)."""
    T, K = spec.maturity, spec.strike
    rho = math.sqrt(t_hat / T)
    vh, vT = spec.sigma * math.sqrt(t_hat), spec.sigma * math.sqrt(T)
    a = _z(spec, level, t_hat)
    a_s = a - vh
    # S_T > K  <=>  -Z_T < b
    b = -_z(spec, K, T)
    b_s = b + vT
    dfK = K * spec.discount(0.0, T)
    s0 = spec.s0
    sa = 1.0 if below else -1.0
    sb = 1.0 if kind == "call" else -1.0
    r = -sa * sb * rho
    stock = binorm_cdf(sa * a_s, sb * b_s, r)
    cash = binorm_cdf(sa * a, sb * b, r)
    return sb * (s0 * stock - dfK * cash)


def value_with_bc(spec: EquityForwardSpec, model: DefaultModel, bc: SingleBreak) -> ValuationReport:
    """Bilateral value when B may break at ``bc.t_hat`` at the default-free value.

    ``bc_option`` is the discounted positive part of B's continuation gain at
    t_hat; ``diagnostics['break_value']`` is the increment over
    :func:`value_no_bc` on the same lumping grid.
    """
    t_hat, T = bc.t_hat, spec.maturity
    if not 0.0 < t_hat < T:
        raise ValueError("break date must lie strictly inside (0, T)")
    wa0, wb0 = _weights(model, 0.0, t_hat)
    bcva = wa0 * _exposure_option(spec, 0.0, t_hat, positive=True) if wa0 else 0.0
    bdva = wb0 * _exposure_option(spec, 0.0, t_hat, positive=False) if wb0 else 0.0

    U, below = _boundary(spec, model, t_hat)
    wa, wb = _weights(model, t_hat, T)
    pos_kind, neg_kind = ("call", "put") if spec.side == "payer" else ("put", "call")
    option = 0.0
    if wb:
        option += wb * barrier_expectation(spec, t_hat, U, neg_kind, below)
    if wa:
        option -= wa * barrier_expectation(spec, t_hat, U, pos_kind, below)

    a = _z(spec, U, t_hat)
    p_continue = norm_cdf(a) if below else 1.0 - norm_cdf(a)
    v0 = forward_value(spec, 0.0, spec.s0)
    base = value_no_bc(spec, model, t_hat).adjusted_value
    adjusted = v0 - bcva + bdva + option
    return ValuationReport.assemble(
        v0, bcva, bdva, option,
        boundary=U,
        exercise_probability=1.0 - p_continue,
        break_value=adjusted - base,
    )


def par_strike(pricer: Callable[[float], float], s0: float = 1.0, tol: float = 1e-10) -> float:
    """Strike zeroing ``pricer(K)``; bracket [1e-6 s0, 10 s0]."""
    lo, hi = 1e-6 * s0, 10.0 * s0
    f_lo, f_hi = pricer(lo), pricer(hi)
    k = find_root(pricer, Bracket(lo, hi, f_lo, f_hi), tol=1e-14 * s0)
    if abs(pricer(k)) > tol * s0:
        raise ArithmeticError(f"par strike residual {pricer(k)!r} above tolerance")
    return k


def par_strike_no_bc(spec: EquityForwardSpec, model: DefaultModel, t_hat: float | None = None):
    return par_strike(
        lambda k: value_no_bc(spec.with_strike(k), model, t_hat).adjusted_value, spec.s0
    )


def par_strike_with_bc(spec: EquityForwardSpec, model: DefaultModel, bc: SingleBreak):
    return par_strike(
        lambda k: value_with_bc(spec.with_strike(k), model, bc).adjusted_value, spec.s0
    )
