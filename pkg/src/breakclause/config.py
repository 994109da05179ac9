"""Scenario configuration: YAML in, frozen dataclasses out, canonical YAML back.

Every schema violation is reported against the line of the offending key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, is_dataclass, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

REPORTS = ("single", "sweep", "table1", "table2", "table3")
SWEEP_VARIABLES = ("t_hat", "lambda_A", "lambda_B", "theta", "maturity")
OVERRIDE_KEYS = ("lambda_A", "lambda_B", "theta", "lgd_A", "lgd_B")
HOLDERS = ("B_only", "A_only", "mutual")
SIDES = ("payer", "receiver")
# admissible (lo, hi) per overridable or sweepable quantity
BOUNDS = {"lambda_A": (0.0, None), "lambda_B": (0.0, None), "theta": (1.0, None),
          "lgd_A": (0.0, 1.0), "lgd_B": (0.0, 1.0)}


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
        self.line = line


@dataclass(frozen=True)
class ForwardConfig:
    spot: float = 1.0
    strike: float | None = None
    maturity: float = 4.0
    volatility: float = 0.3
    rate: float = 0.0
    side: str = "payer"
    lumping_date: float | None = None
    type: str = "forward"


@dataclass(frozen=True)
class SwapConfig:
    notional: float = 1.0
    fixed_rate: float | None = None
    maturity: float = 4.0
    frequency: int = 2
    side: str = "payer"
    type: str = "swap"


@dataclass(frozen=True)
class CurveConfig:
    """Exactly one of flat_par_rate, flat_zero_rate, zero_rates."""

    flat_par_rate: float | None = None
    flat_zero_rate: float | None = None
    zero_rates: tuple[tuple[float, float], ...] | None = None
    anchor_tenor: float | None = None
    anchor_rate: float | None = None
    tenor: float = 4.0
    frequency: int = 2


@dataclass(frozen=True)
class SwaptionConfig:
    expiry: float = 2.0
    tenor: float = 2.0
    vol: float = 0.376


@dataclass(frozen=True)
class MarketConfig:
    curve: CurveConfig = field(default_factory=lambda: CurveConfig(flat_par_rate=0.01677))
    mean_reversion: float = 0.03
    sigma: float | None = None
    swaption: SwaptionConfig | None = field(default_factory=SwaptionConfig)
    max_step: float = 1.0 / 12.0


@dataclass(frozen=True)
class CreditConfig:
    lambda_A: float = 0.1
    lambda_B: float = 0.05
    theta: float = 1.0
    lgd_A: float = 1.0
    lgd_B: float = 1.0


@dataclass(frozen=True)
class BreaksConfig:
    dates: tuple[float, ...] = ()
    holder: str = "B_only"


@dataclass(frozen=True)
class SweepConfig:
    variable: str
    grid: tuple[float, ...]


@dataclass(frozen=True)
class RowConfig:
    breaks: tuple[float, ...]
    lambda_A: float
    lambda_B: float
    theta: float


@dataclass(frozen=True)
class RunConfig:
    report: str = "single"
    sweep: SweepConfig | None = None
    series: tuple[tuple[tuple[str, float], ...], ...] = ()
    sides: tuple[str, ...] = SIDES
    output: str | None = None
    plot: bool = True
    thetas: tuple[float, ...] = ()
    maturities: tuple[float, ...] = ()
    baseline_maturity: float = 1.0
    rows: tuple[RowConfig, ...] = ()
    bump: float = 1e-4
    mc_paths: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    instrument: ForwardConfig | SwapConfig
    credit: CreditConfig = field(default_factory=CreditConfig)
    market: MarketConfig | None = None
    breaks: BreaksConfig = field(default_factory=BreaksConfig)
    run: RunConfig = field(default_factory=RunConfig)
    name: str = "scenario"

    @property
    def is_swap(self) -> bool:
        return isinstance(self.instrument, SwapConfig)

    @property
    def output_name(self) -> str:
        return self.run.output or self.name

    def with_overrides(self, **overrides: float) -> "ScenarioConfig":
        """Apply credit-level overrides (and t_hat / maturity for sweeps)."""
        cfg = self
        credit = {k: v for k, v in overrides.items() if k in OVERRIDE_KEYS}
        if credit:
            cfg = replace(cfg, credit=replace(cfg.credit, **credit))
        if "t_hat" in overrides:
            cfg = replace(cfg, breaks=replace(cfg.breaks, dates=(overrides["t_hat"],)))
        if "maturity" in overrides:
            cfg = replace(cfg, instrument=replace(cfg.instrument, maturity=overrides["maturity"]))
        return cfg


# ---------------------------------------------------------------- parsing


def _line_map(node: yaml.Node, path: tuple = (), out: dict | None = None) -> dict:
    out = {} if out is None else out
    out.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = path + (k.value,)
            out[key] = k.start_mark.line + 1
            _line_map(v, key, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_map(v, path + (i,), out)
    return out


class _Reader:
    def __init__(self, lines: dict, source: str):
        self.lines = lines
        self.source = source

    def fail(self, path: tuple, message: str):
        line = None
        p = path
        while p not in self.lines and p:
            p = p[:-1]
        line = self.lines.get(p)
        dotted = ".".join(str(x) for x in path) or "<root>"
        raise ConfigError(f"{dotted}: {message}", self.source, line)

    def mapping(self, data: Any, path: tuple, allowed: tuple[str, ...]) -> Mapping:
        if data is None:
            data = {}
        if not isinstance(data, Mapping):
            self.fail(path, "expected a mapping")
        for k in data:
            if k not in allowed:
                self.fail(path + (k,), f"unknown key (allowed: {', '.join(allowed)})")
        return data

    def number(self, data: Mapping, path: tuple, key: str, default=None, *, lo=None, hi=None,
               lo_open=False, optional=False, integer=False):
        if key not in data or data[key] is None:
            if default is None and not optional:
                self.fail(path + (key,), "required")
            return default
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(path + (key,), f"expected a number, got {v!r}")
        if integer and int(v) != v:
            self.fail(path + (key,), "expected an integer")
        v = int(v) if integer else float(v)
        if not math.isfinite(v):
            self.fail(path + (key,), "must be finite")
        if lo is not None and (v <= lo if lo_open else v < lo):
            self.fail(path + (key,), f"must be {'>' if lo_open else '>='} {lo}")
        if hi is not None and v > hi:
            self.fail(path + (key,), f"must be <= {hi}")
        return v

    def choice(self, data: Mapping, path: tuple, key: str, options, default):
        v = data.get(key, default)
        if v not in options:
            self.fail(path + (key,), f"must be one of {', '.join(options)}")
        return v

    def numbers(self, data: Mapping, path: tuple, key: str, *, sorted_=True, nonempty=False):
        v = data.get(key, [])
        if v is None:
            v = []
        if not isinstance(v, list):
            self.fail(path + (key,), "expected a list of numbers")
        out = []
        for i, x in enumerate(v):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                self.fail(path + (key, i), f"expected a finite number, got {x!r}")
            out.append(float(x))
        if nonempty and not out:
            self.fail(path + (key,), "must not be empty")
        if sorted_ and any(b <= a for a, b in zip(out, out[1:])):
            self.fail(path + (key,), "must be strictly increasing")
        return tuple(out)


def _read_instrument(r: _Reader, data, path):
    if not isinstance(data, Mapping) or "type" not in data:
        r.fail(path, "instrument block needs a type (forward or swap)")
    kind = r.choice(data, path, "type", ("forward", "swap"), None)
    if kind == "forward":
        d = r.mapping(data, path, tuple(f.name for f in fields(ForwardConfig)))
        return ForwardConfig(
            spot=r.number(d, path, "spot", 1.0, lo=0, lo_open=True),
            strike=r.number(d, path, "strike", optional=True, lo=0, lo_open=True),
            maturity=r.number(d, path, "maturity", 4.0, lo=0, lo_open=True),
            volatility=r.number(d, path, "volatility", 0.3, lo=0, lo_open=True),
            rate=r.number(d, path, "rate", 0.0),
            side=r.choice(d, path, "side", SIDES, "payer"),
            lumping_date=r.number(d, path, "lumping_date", optional=True, lo=0, lo_open=True),
        )
    d = r.mapping(data, path, tuple(f.name for f in fields(SwapConfig)))
    return SwapConfig(
        notional=r.number(d, path, "notional", 1.0, lo=0, lo_open=True),
        fixed_rate=r.number(d, path, "fixed_rate", optional=True),
        maturity=r.number(d, path, "maturity", 4.0, lo=0, lo_open=True),
        frequency=r.number(d, path, "frequency", 2, lo=1, integer=True),
        side=r.choice(d, path, "side", SIDES, "payer"),
    )


def _read_market(r: _Reader, data, path) -> MarketConfig:
    d = r.mapping(data, path, ("curve", "mean_reversion", "sigma", "swaption", "max_step"))
    cpath = path + ("curve",)
    c = r.mapping(d.get("curve"), cpath, (
        "flat_par_rate", "flat_zero_rate", "zero_rates", "par_anchor", "tenor", "frequency"))
    zero_rates = None
    if c.get("zero_rates") is not None:
        zr = c["zero_rates"]
        if not isinstance(zr, list) or not zr:
            r.fail(cpath + ("zero_rates",), "expected a nonempty list of [time, zero_rate] pairs")
        pairs = []
        for i, p in enumerate(zr):
            if (not isinstance(p, list) or len(p) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in p)):
                r.fail(cpath + ("zero_rates", i), "expected [time, zero_rate]")
            pairs.append((float(p[0]), float(p[1])))
        times = [p[0] for p in pairs]
        if times[0] <= 0 or any(b <= a for a, b in zip(times, times[1:])):
            r.fail(cpath + ("zero_rates",), "pillar times must be positive and strictly increasing")
        zero_rates = tuple(pairs)
    given = [k for k in ("flat_par_rate", "flat_zero_rate") if c.get(k) is not None]
    if zero_rates is not None:
        given.append("zero_rates")
    if len(given) != 1:
        r.fail(cpath, "give exactly one of flat_par_rate, flat_zero_rate, zero_rates")
    anchor_tenor = anchor_rate = None
    if c.get("par_anchor") is not None:
        a = r.mapping(c["par_anchor"], cpath + ("par_anchor",), ("tenor", "rate"))
        anchor_tenor = r.number(a, cpath + ("par_anchor",), "tenor", lo=0, lo_open=True)
        anchor_rate = r.number(a, cpath + ("par_anchor",), "rate")
    curve = CurveConfig(
        flat_par_rate=r.number(c, cpath, "flat_par_rate", optional=True),
        flat_zero_rate=r.number(c, cpath, "flat_zero_rate", optional=True),
        zero_rates=zero_rates,
        anchor_tenor=anchor_tenor,
        anchor_rate=anchor_rate,
        tenor=r.number(c, cpath, "tenor", 4.0, lo=0, lo_open=True),
        frequency=r.number(c, cpath, "frequency", 2, lo=1, integer=True),
    )
    swaption = None
    if d.get("swaption") is not None:
        spath = path + ("swaption",)
        s = r.mapping(d["swaption"], spath, ("expiry", "tenor", "vol"))
        swaption = SwaptionConfig(
            expiry=r.number(s, spath, "expiry", 2.0, lo=0, lo_open=True),
            tenor=r.number(s, spath, "tenor", 2.0, lo=0, lo_open=True),
            vol=r.number(s, spath, "vol", lo=0, lo_open=True),
        )
    sigma = r.number(d, path, "sigma", optional=True, lo=0, lo_open=True)
    if sigma is None and swaption is None:
        r.fail(path, "give either sigma or a swaption quote to calibrate it")
    return MarketConfig(
        curve=curve,
        mean_reversion=r.number(d, path, "mean_reversion", 0.03, lo=0, lo_open=True),
        sigma=sigma,
        swaption=swaption,
        max_step=r.number(d, path, "max_step", 1.0 / 12.0, lo=0, lo_open=True),
    )


def _read_run(r: _Reader, data, path) -> RunConfig:
    d = r.mapping(data, path, tuple(f.name for f in fields(RunConfig)))
    sweep = None
    if d.get("sweep") is not None:
        spath = path + ("sweep",)
        s = r.mapping(d["sweep"], spath, ("variable", "grid"))
        sweep = SweepConfig(
            r.choice(s, spath, "variable", SWEEP_VARIABLES, None),
            r.numbers(s, spath, "grid", nonempty=True),
        )
    series = []
    raw_series = d.get("series") or []
    if not isinstance(raw_series, list):
        r.fail(path + ("series",), "expected a list of override mappings")
    for i, item in enumerate(raw_series):
        ipath = path + ("series", i)
        m = r.mapping(item, ipath, OVERRIDE_KEYS)
        series.append(tuple((k, r.number(m, ipath, k, lo=BOUNDS[k][0], hi=BOUNDS[k][1]))
                            for k in OVERRIDE_KEYS if k in m))
    rows = []
    raw_rows = d.get("rows") or []
    if not isinstance(raw_rows, list):
        r.fail(path + ("rows",), "expected a list of rows")
    for i, item in enumerate(raw_rows):
        ipath = path + ("rows", i)
        m = r.mapping(item, ipath, ("breaks", "lambda_A", "lambda_B", "theta"))
        rows.append(RowConfig(
            r.numbers(m, ipath, "breaks"),
            r.number(m, ipath, "lambda_A", lo=0),
            r.number(m, ipath, "lambda_B", lo=0),
            r.number(m, ipath, "theta", lo=1),
        ))
    sides = d.get("sides", list(SIDES))
    if not isinstance(sides, list) or not sides or any(s not in SIDES for s in sides):
        r.fail(path + ("sides",), "expected a nonempty list drawn from payer, receiver")
    plot = d.get("plot", True)
    if not isinstance(plot, bool):
        r.fail(path + ("plot",), "expected true or false")
    output = d.get("output")
    if output is not None and (not isinstance(output, str) or "/" in output):
        r.fail(path + ("output",), "expected a bare file stem")
    report = r.choice(d, path, "report", REPORTS, "single")
    run = RunConfig(
        report=report,
        sweep=sweep,
        series=tuple(series),
        sides=tuple(sides),
        output=output,
        plot=plot,
        thetas=r.numbers(d, path, "thetas"),
        maturities=r.numbers(d, path, "maturities", sorted_=False),
        baseline_maturity=r.number(d, path, "baseline_maturity", 1.0, lo=0, lo_open=True),
        rows=tuple(rows),
        bump=r.number(d, path, "bump", 1e-4, lo=0, lo_open=True),
        mc_paths=r.number(d, path, "mc_paths", 0, lo=0, integer=True),
    )
    if report == "sweep" and sweep is None:
        r.fail(path + ("report",), "a sweep report needs a sweep block")
    if report == "table1" and not (run.thetas and run.maturities):
        r.fail(path + ("report",), "table1 needs thetas and maturities")
    if report in ("table2", "table3") and not rows:
        r.fail(path + ("report",), f"{report} needs rows")
    return run


def parse_config(text: str, source: str = "<config>") -> ScenarioConfig:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"YAML syntax error: {exc}", source,
                          mark.line + 1 if mark is not None else None) from None
    lines = _line_map(node) if node is not None else {}
    r = _Reader(lines, source)
    d = r.mapping(data, (), ("name", "instrument", "credit", "market", "breaks", "run"))
    if "instrument" not in d:
        r.fail(("instrument",), "required")
    instrument = _read_instrument(r, d["instrument"], ("instrument",))

    cpath = ("credit",)
    if "credit" not in d:
        r.fail(cpath, "required")
    c = r.mapping(d["credit"], cpath, tuple(f.name for f in fields(CreditConfig)))
    credit = CreditConfig(
        lambda_A=r.number(c, cpath, "lambda_A", lo=0),
        lambda_B=r.number(c, cpath, "lambda_B", lo=0),
        theta=r.number(c, cpath, "theta", 1.0, lo=1),
        lgd_A=r.number(c, cpath, "lgd_A", 1.0, lo=0, hi=1),
        lgd_B=r.number(c, cpath, "lgd_B", 1.0, lo=0, hi=1),
    )

    market = None
    if isinstance(instrument, SwapConfig):
        if d.get("market") is None:
            r.fail(("market",), "swap scenarios need a market block")
        market = _read_market(r, d["market"], ("market",))
    elif d.get("market") is not None:
        r.fail(("market",), "market block only applies to swaps")

    bpath = ("breaks",)
    b = r.mapping(d.get("breaks"), bpath, ("dates", "holder"))
    breaks = BreaksConfig(r.numbers(b, bpath, "dates"), r.choice(b, bpath, "holder", HOLDERS, "B_only"))
    for i, t in enumerate(breaks.dates):
        if not 0 <= t < instrument.maturity:
            r.fail(bpath + ("dates", i), "break dates must lie in [0, maturity)")
        if isinstance(instrument, SwapConfig):
            k = t * instrument.frequency
            if abs(k - round(k)) > 1e-9:
                r.fail(bpath + ("dates", i), "swap break dates must fall on payment dates")
    if isinstance(instrument, ForwardConfig):
        if len(breaks.dates) > 1:
            r.fail(bpath + ("dates",), "forwards support a single break date")
        if breaks.dates and breaks.holder != "B_only":
            r.fail(bpath + ("holder",), "forwards support only a break held by B")
        if breaks.dates and not breaks.dates[0] > 0:
            r.fail(bpath + ("dates", 0), "forward break date must be positive")

    run = _read_run(r, d.get("run"), ("run",))
    if run.report == "table1" and (isinstance(instrument, SwapConfig) or not breaks.dates):
        r.fail(("run", "report"), "table1 needs a forward instrument with one break date")
    if run.report in ("table2", "table3") and isinstance(instrument, ForwardConfig):
        r.fail(("run", "report"), f"{run.report} needs a swap instrument")
    if run.report == "sweep":
        var, grid = run.sweep.variable, run.sweep.grid
        gpath = ("run", "sweep", "grid")
        if var == "maturity" and isinstance(instrument, SwapConfig):
            r.fail(("run", "sweep", "variable"), "maturity sweeps apply to forwards only")
        if var in BOUNDS:
            lo, hi = BOUNDS[var]
            if grid[0] < lo or (hi is not None and grid[-1] > hi):
                r.fail(gpath, f"{var} values must lie in [{lo}, {hi if hi is not None else 'inf'})")
        if var == "t_hat":
            if grid[0] <= 0 or grid[-1] >= instrument.maturity:
                r.fail(gpath, "break dates must lie strictly inside (0, maturity)")
            if isinstance(instrument, SwapConfig) and any(
                    abs(t * instrument.frequency - round(t * instrument.frequency)) > 1e-9 for t in grid):
                r.fail(gpath, "swap break dates must fall on payment dates")
        if var == "maturity":
            if grid[0] <= 0 or (breaks.dates and grid[0] <= breaks.dates[-1]):
                r.fail(gpath, "maturities must be positive and follow the break dates")
    name = d.get("name", "scenario")
    if not isinstance(name, str) or not name or "/" in name:
        r.fail(("name",), "expected a bare name")
    return ScenarioConfig(instrument, credit, market, breaks, run, name)


def load_config(path: str | Path) -> ScenarioConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(p)) from None
    return parse_config(text, str(p))


# ------------------------------------------------------------- serialising


def _plain(obj: Any) -> Any:
    if is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, tuple):
        return [_plain(x) for x in obj]
    return obj


def to_dict(cfg: ScenarioConfig) -> dict:
    """Canonical mapping: defaults written out, empty optional fields dropped."""
    inst = _plain(cfg.instrument)
    inst = {"type": inst.pop("type"), **{k: v for k, v in inst.items() if v is not None}}
    out: dict[str, Any] = {"name": cfg.name, "instrument": inst, "credit": _plain(cfg.credit)}
    if cfg.market is not None:
        m = _plain(cfg.market)
        curve = {k: v for k, v in m["curve"].items() if v is not None and not k.startswith("anchor_")}
        if cfg.market.curve.anchor_tenor is not None:
            curve["par_anchor"] = {"tenor": cfg.market.curve.anchor_tenor,
                                   "rate": cfg.market.curve.anchor_rate}
        m["curve"] = curve
        out["market"] = {k: v for k, v in m.items() if v is not None}
    out["breaks"] = _plain(cfg.breaks)
    run = _plain(cfg.run)
    run["series"] = [dict(s) for s in cfg.run.series]
    out["run"] = {k: v for k, v in run.items() if v not in (None, [], ())}
    return out


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False, default_flow_style=None, width=100)
