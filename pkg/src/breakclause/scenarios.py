"""Turn a ScenarioConfig into result tables.

Each report walks a list of independent points (grid value x series x side),
evaluates them on a thread pool and writes rows back in input order.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Sequence

import numpy as np

from .config import ForwardConfig, MarketConfig, ScenarioConfig, SwapConfig
from .credit import DefaultModel
from .equity import (
    EquityForwardSpec,
    SingleBreak,
    par_strike_no_bc,
    par_strike_with_bc,
    value_no_bc,
    value_with_bc,
)
from .montecarlo import simulate_forward_with_bc
from .numerics import NumericalError
from .rates import (
    BreakSchedule,
    HWParams,
    Holder,
    SwapLattice,
    SwapSpec,
    SwaptionQuote,
    YieldCurve,
    build_tree,
    calibrate_sigma,
    lattice_par_rate,
    make_slices,
)
from .report import Table, ValuationReport, table_from_records
from .risk import swap_ucva_fn, ucva_sensitivity

BP = 1e4


class RunError(RuntimeError):
    """A numerical failure, tagged with the operation and its inputs."""

    def __init__(self, operation: str, params: dict, cause: BaseException):
        shown = ", ".join(f"{k}={v}" for k, v in params.items())
        super().__init__(f"{operation} failed ({shown}): {cause}")
        self.operation = operation
        self.params = params


def _guarded(operation: str, params: dict, fn: Callable[[], Any]) -> Any:
    try:
        return fn()
    except (NumericalError, ArithmeticError) as exc:
        raise RunError(operation, params, exc) from exc


def pmap(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Order-preserving map, concurrent when ``threads > 1``."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def credit_model(cfg: ScenarioConfig) -> DefaultModel:
    c = cfg.credit
    return DefaultModel(c.lambda_A, c.lambda_B, c.theta, c.lgd_A, c.lgd_B)


# ------------------------------------------------------------------ market


def build_curve(market: MarketConfig) -> YieldCurve:
    c = market.curve
    if c.flat_par_rate is not None:
        return YieldCurve.flat_par(c.flat_par_rate, c.tenor, c.frequency)
    if c.flat_zero_rate is not None:
        curve = YieldCurve.flat(c.flat_zero_rate)
    else:
        curve = YieldCurve.from_zero_rates([t for t, _ in c.zero_rates], [z for _, z in c.zero_rates])
    if c.anchor_tenor is not None:
        curve = curve.anchored_to_par(c.anchor_tenor, c.anchor_rate, c.frequency)
    return curve


@dataclass(frozen=True)
class SwapMarket:
    curve: YieldCurve
    params: HWParams
    slice_times: tuple[float, ...]
    tree: Any

    def lattice(self, swap: SwapConfig, side: str | None = None) -> SwapLattice:
        spec = SwapSpec(swap.notional, 0.0, swap.maturity, swap.frequency, side or swap.side)
        lattice = SwapLattice(self.tree, spec)
        rate = swap.fixed_rate if swap.fixed_rate is not None else lattice.risk_free_par_rate()
        return SwapLattice(self.tree, spec.with_rate(rate))


@functools.lru_cache(maxsize=16)
def swap_market(market: MarketConfig, maturity: float, frequency: int) -> SwapMarket:
    curve = build_curve(market)
    required = set(SwapSpec(maturity=maturity, frequency=frequency).dates)
    if market.sigma is not None:
        params = HWParams.constant(market.mean_reversion, market.sigma)
    else:
        q = market.swaption
        quote = SwaptionQuote(q.expiry, q.tenor, q.vol, frequency)
        params = _guarded(
            "sigma calibration", {"expiry": q.expiry, "tenor": q.tenor, "vol": q.vol},
            lambda: calibrate_sigma(curve, market.mean_reversion, quote, max_step=market.max_step),
        )
    slices = tuple(make_slices(sorted(required), market.max_step))
    return SwapMarket(curve, params, slices, build_tree(curve, params, slices))


# ---------------------------------------------------------------- forwards


def forward_spec(inst: ForwardConfig, side: str | None = None, strike: float | None = None):
    if strike is None:
        strike = inst.strike if inst.strike is not None else inst.spot * math.exp(inst.rate * inst.maturity)
    return EquityForwardSpec(inst.spot, strike, inst.maturity, inst.volatility, inst.rate, side or inst.side)


def _lumping(cfg: ScenarioConfig) -> float | None:
    if cfg.instrument.lumping_date is not None:
        return cfg.instrument.lumping_date
    return cfg.breaks.dates[0] if cfg.breaks.dates else None


def _forward_par(cfg: ScenarioConfig, side: str) -> dict:
    inst, model = cfg.instrument, credit_model(cfg)
    spec = forward_spec(inst, side)
    params = {"side": side, "T": inst.maturity, "lambda_A": model.lambda_A,
              "lambda_B": model.lambda_B, "theta": model.theta}
    lump = _lumping(cfg)
    no_bc = _guarded("par strike without break", params, lambda: par_strike_no_bc(spec, model, lump))
    row = {"par_no_bc": no_bc, "par_with_bc": None, "effect": None}
    if cfg.breaks.dates:
        bc = SingleBreak(cfg.breaks.dates[0])
        with_bc = _guarded("par strike with break", {**params, "t_hat": bc.t_hat},
                           lambda: par_strike_with_bc(spec, model, bc))
        row.update(par_with_bc=with_bc, effect=100.0 * (with_bc - no_bc) / inst.spot)
    return row


def _forward_reports(cfg: ScenarioConfig, side: str) -> list[tuple[str, ValuationReport]]:
    spec, model = forward_spec(cfg.instrument, side), credit_model(cfg)
    out = [("no_bc", value_no_bc(spec, model, _lumping(cfg)))]
    if cfg.breaks.dates:
        bc = SingleBreak(cfg.breaks.dates[0])
        out.append(("with_bc", _guarded("forward valuation", {"side": side, "t_hat": bc.t_hat},
                                        lambda: value_with_bc(spec, model, bc))))
    return out


# ------------------------------------------------------------------- swaps


def _schedule(cfg: ScenarioConfig, dates=None) -> BreakSchedule | None:
    dates = cfg.breaks.dates if dates is None else dates
    return BreakSchedule(tuple(dates), Holder(cfg.breaks.holder)) if dates else None


def _market_for(cfg: ScenarioConfig) -> SwapMarket:
    return swap_market(cfg.market, cfg.instrument.maturity, cfg.instrument.frequency)


def _swap_par(cfg: ScenarioConfig, side: str) -> dict:
    lattice = _market_for(cfg).lattice(cfg.instrument, side)
    model = credit_model(cfg)
    params = {"side": side, "lambda_A": model.lambda_A, "lambda_B": model.lambda_B, "theta": model.theta}
    no_bc = _guarded("par rate without break", params, lambda: lattice_par_rate(lattice, model))
    row = {"par_no_bc": no_bc, "par_with_bc": None, "effect": None}
    schedule = _schedule(cfg)
    if schedule is not None:
        with_bc = _guarded("par rate with breaks", {**params, "breaks": list(schedule.dates)},
                           lambda: lattice_par_rate(lattice, model, schedule))
        row.update(par_with_bc=with_bc, effect=BP * (with_bc - no_bc))
    return row


def _swap_reports(cfg: ScenarioConfig, side: str) -> list[tuple[str, ValuationReport]]:
    lattice = _market_for(cfg).lattice(cfg.instrument, side)
    model = credit_model(cfg)
    out = [("no_bc", lattice.value(model))]
    schedule = _schedule(cfg)
    if schedule is not None:
        out.append(("with_bc", _guarded("swap valuation", {"side": side, "breaks": list(schedule.dates)},
                                        lambda: lattice.value(model, schedule))))
    return out


def _par_point(cfg: ScenarioConfig, side: str) -> dict:
    return _swap_par(cfg, side) if cfg.is_swap else _forward_par(cfg, side)


def _level_units(cfg: ScenarioConfig) -> dict:
    if cfg.is_swap:
        return {"par_no_bc": "rate", "par_with_bc": "rate", "effect": "bp"}
    return {"par_no_bc": "price", "par_with_bc": "price", "effect": "% of spot"}


# ----------------------------------------------------------------- reports


def price_table(cfg: ScenarioConfig, seed: int | None = None) -> Table:
    records = []
    for side in cfg.run.sides:
        reports = _swap_reports(cfg, side) if cfg.is_swap else _forward_reports(cfg, side)
        for label, rep in reports:
            records.append({"side": side, "case": label, **rep.as_row()})
        if not cfg.is_swap and cfg.run.mc_paths and cfg.breaks.dates:
            rng = np.random.default_rng(seed)
            est = simulate_forward_with_bc(forward_spec(cfg.instrument, side), credit_model(cfg),
                                           SingleBreak(cfg.breaks.dates[0]), cfg.run.mc_paths, rng)
            records.append({"side": side, "case": "monte_carlo", "adjusted_value": est.mean,
                             "stderr": est.stderr, "paths": est.paths})
    return table_from_records(f"{cfg.output_name}_price", records)


def par_table(cfg: ScenarioConfig) -> Table:
    records = [{"side": side, **_par_point(cfg, side)} for side in cfg.run.sides]
    return table_from_records(f"{cfg.output_name}_par", records, _level_units(cfg))


def sweep_table(cfg: ScenarioConfig, threads: int = 1) -> Table:
    run = cfg.run
    series = run.series or ((),)
    var = run.sweep.variable
    points = [(s, x, side) for s in series for x in run.sweep.grid for side in run.sides]

    def work(point):
        s, x, side = point
        return _par_point(cfg.with_overrides(**dict(s), **{var: x}), side)

    results = pmap(work, points, threads)
    keys = list(dict.fromkeys(k for s in series for k, _ in s))
    records = []
    for (s, x, side), res in zip(points, results):
        d = dict(s)
        records.append({**{k: d.get(k) for k in keys}, var: x, "side": side, **res})
    return table_from_records(cfg.output_name, records, _level_units(cfg))


TABLE1_CASES = (("T{T}_that{t}", True), ("T{T}", False))


def table1(cfg: ScenarioConfig, threads: int = 1) -> Table:
    """Par-strike shift vs the short no-break forward, per theta and side."""
    inst, run = cfg.instrument, cfg.run
    t_hat = cfg.breaks.dates[0]
    base_cfg = replace(cfg, instrument=replace(inst, maturity=run.baseline_maturity, lumping_date=None),
                       breaks=replace(cfg.breaks, dates=()))
    columns = []
    for T in run.maturities:
        columns += [(f"T{T:g}_that{t_hat:g}", T, True), (f"T{T:g}", T, False)]
    points = [(theta, side, col) for theta in run.thetas for side in run.sides for col in [None, *columns]]

    def work(point):
        theta, side, col = point
        c = base_cfg.with_overrides(theta=theta)
        if col is not None:
            _, T, with_bc = col
            c = replace(c, instrument=replace(c.instrument, maturity=T, lumping_date=t_hat))
            if with_bc:
                c = replace(c, breaks=replace(c.breaks, dates=(t_hat,)))
                return _forward_par(c, side)["par_with_bc"]
        return _forward_par(c, side)["par_no_bc"]

    values = iter(pmap(work, points, threads))
    rows = []
    for theta in run.thetas:
        for side in run.sides:
            base = next(values)
            row = [theta, side, base]
            row += [100.0 * (next(values) - base) / inst.spot for _ in columns]
            rows.append(row)
    names = [c[0] for c in columns]
    units = {"baseline_par": "price", **{n: "% of spot" for n in names}}
    return Table(cfg.output_name, ["theta", "side", "baseline_par", *names], rows, units)


def table2(cfg: ScenarioConfig, threads: int = 1) -> Table:
    """Par-rate change from break schedules, one line per row definition."""
    rows_cfg = cfg.run.rows
    points = [(r, side) for r in rows_cfg for side in cfg.run.sides]

    def work(point):
        r, side = point
        c = cfg.with_overrides(lambda_A=r.lambda_A, lambda_B=r.lambda_B, theta=r.theta)
        return _swap_par(replace(c, breaks=replace(c.breaks, dates=r.breaks)), side)["effect"]

    values = iter(pmap(work, points, threads))
    rows = []
    for r in rows_cfg:
        rows.append([" ".join(f"{t:g}" for t in r.breaks), r.lambda_A, r.lambda_B, r.theta,
                     *[next(values) for _ in cfg.run.sides]])
    sides = [f"{s}_effect" for s in cfg.run.sides]
    return Table(cfg.output_name, ["breaks", "lambda_A", "lambda_B", "theta", *sides], rows,
                 {s: "bp" for s in sides})


def table3(cfg: ScenarioConfig, threads: int = 1) -> Table:
    """UCVA sensitivity to lambda_A with and without breaks, at the risk-free par rate."""
    market = _market_for(cfg)
    bump = cfg.run.bump
    points = [(r, side, with_bc) for r in cfg.run.rows for side in cfg.run.sides for with_bc in (True, False)]

    def work(point):
        r, side, with_bc = point
        lattice = market.lattice(replace(cfg.instrument, fixed_rate=None), side)
        model = DefaultModel(r.lambda_A, r.lambda_B, r.theta, cfg.credit.lgd_A, cfg.credit.lgd_B)
        schedule = _schedule(cfg, r.breaks) if with_bc else None
        params = {"side": side, "lambda_A": r.lambda_A, "lambda_B": r.lambda_B, "theta": r.theta,
                  "breaks": list(r.breaks) if with_bc else []}
        return _guarded("UCVA sensitivity", params,
                        lambda: ucva_sensitivity(swap_ucva_fn(lattice, schedule), model, bump)).sensitivity

    values = iter(pmap(work, points, threads))
    columns, units = ["breaks", "lambda_A", "lambda_B", "theta"], {}
    for side in cfg.run.sides:
        for case in ("with_bc", "no_bc"):
            columns += [f"{side}_{case}", f"{side}_{case}_bp_per_pct"]
            units[f"{side}_{case}"] = "value per unit intensity"
            units[f"{side}_{case}_bp_per_pct"] = "bp per 1% intensity"
    rows = []
    for r in cfg.run.rows:
        row = [" ".join(f"{t:g}" for t in r.breaks), r.lambda_A, r.lambda_B, r.theta]
        for _ in cfg.run.sides:
            for _ in range(2):
                s = next(values)
                row += [s, s * BP / 100.0]
        rows.append(row)
    return Table(cfg.output_name, columns, rows, units)


def run_report(cfg: ScenarioConfig, threads: int = 1, seed: int | None = None) -> Table:
    report = cfg.run.report
    if report == "single":
        return price_table(cfg, seed)
    if report == "sweep":
        return sweep_table(cfg, threads)
    if report == "table1":
        return table1(cfg, threads)
    if report == "table2":
        return table2(cfg, threads)
    return table3(cfg, threads)
