"""Named scenarios behind the reference tables and figures."""

from __future__ import annotations

import numpy as np

from .config import (
    BreaksConfig,
    CreditConfig,
    CurveConfig,
    ForwardConfig,
    MarketConfig,
    RowConfig,
    RunConfig,
    ScenarioConfig,
    SwapConfig,
    SwaptionConfig,
    SweepConfig,
)

PAR_4Y = 0.01677
SWAPTION_2Y2Y = SwaptionConfig(expiry=2.0, tenor=2.0, vol=0.376)

FLAT_MARKET = MarketConfig(
    curve=CurveConfig(flat_par_rate=PAR_4Y, tenor=4.0, frequency=2),
    mean_reversion=0.03,
    swaption=SWAPTION_2Y2Y,
)

# Upward-sloping zero curve pinned to the same 4y par rate. On a flat curve
# every forward-starting period is at par, which makes payer and receiver
# exposure profiles coincide; the slope restores the asymmetry.
SLOPED_MARKET = MarketConfig(
    curve=CurveConfig(
        zero_rates=((0.5, 0.0110), (1.0, 0.0120), (2.0, 0.0135), (3.0, 0.0153), (4.0, 0.0170), (5.0, 0.0188)),
        anchor_tenor=4.0,
        anchor_rate=PAR_4Y,
    ),
    mean_reversion=0.03,
    swaption=SWAPTION_2Y2Y,
)

RISKY_A = {"lambda_A": 0.1, "lambda_B": 0.05}
RISKY_B = {"lambda_A": 0.05, "lambda_B": 0.1}


def _grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.round(np.linspace(lo, hi, n), 12))


def _forward(maturity: float = 4.0) -> ForwardConfig:
    return ForwardConfig(spot=1.0, maturity=maturity, volatility=0.3, rate=0.0)


def _swap() -> SwapConfig:
    return SwapConfig(notional=1.0, maturity=4.0, frequency=2)


def table1() -> ScenarioConfig:
    return ScenarioConfig(
        name="table1",
        instrument=_forward(),
        credit=CreditConfig(**RISKY_A),
        breaks=BreaksConfig(dates=(1.0,)),
        run=RunConfig(report="table1", thetas=(1.0, 2.0, 3.0, 4.0, 5.0), maturities=(4.0, 2.0),
                      baseline_maturity=1.0, plot=False),
    )


def table2() -> ScenarioConfig:
    schedules = ((1.0, 2.0, 3.0), (1.0, 2.0), (1.0,), (2.0, 3.0), (2.0,), (3.0,))
    rows = tuple(
        RowConfig(s, pair["lambda_A"], pair["lambda_B"], theta)
        for pair in (RISKY_A, RISKY_B)
        for theta in (4.0, 1.0)
        for s in schedules
    )
    return ScenarioConfig(
        name="table2",
        instrument=_swap(),
        credit=CreditConfig(**RISKY_A),
        market=FLAT_MARKET,
        run=RunConfig(report="table2", rows=rows, plot=False),
    )


def table3() -> ScenarioConfig:
    rows = tuple(
        RowConfig((2.0,), la, lb, theta)
        for la, lb in ((0.05, 0.1), (0.1, 0.05), (0.1, 0.1))
        for theta in (4.0, 1.0)
    )
    return ScenarioConfig(
        name="table3",
        instrument=_swap(),
        credit=CreditConfig(**RISKY_A),
        market=SLOPED_MARKET,
        run=RunConfig(report="table3", rows=rows, bump=1e-4, plot=False),
    )


def fig1() -> ScenarioConfig:
    T = 4.0
    return ScenarioConfig(
        name="fig1",
        instrument=_forward(T),
        credit=CreditConfig(**RISKY_A),
        breaks=BreaksConfig(dates=(1.0,)),
        run=RunConfig(
            report="sweep",
            sweep=SweepConfig("t_hat", _grid(1.0 / 365.0, T - 1.0 / 365.0, 16)),
            series=((("theta", 4.0),), (("theta", 1.0),)),
        ),
    )


def fig_lambda() -> ScenarioConfig:
    return ScenarioConfig(
        name="fig-lambda",
        instrument=_forward(),
        credit=CreditConfig(lambda_A=0.1, lambda_B=0.05),
        breaks=BreaksConfig(dates=(2.0,)),
        run=RunConfig(
            report="sweep",
            sweep=SweepConfig("lambda_B", _grid(0.02, 0.3, 15)),
            series=((("theta", 1.0),), (("theta", 2.0),), (("theta", 4.0),)),
        ),
    )


def fig_swap_that() -> ScenarioConfig:
    series = tuple(
        (("lambda_A", pair["lambda_A"]), ("lambda_B", pair["lambda_B"]), ("theta", theta))
        for pair in (RISKY_A, RISKY_B)
        for theta in (4.0, 1.0)
    )
    return ScenarioConfig(
        name="fig-swap-that",
        instrument=_swap(),
        credit=CreditConfig(**RISKY_A),
        market=FLAT_MARKET,
        breaks=BreaksConfig(dates=(1.0,)),
        run=RunConfig(report="sweep", sweep=SweepConfig("t_hat", _grid(0.5, 3.5, 7)), series=series),
    )


def fig_swap_lambda() -> ScenarioConfig:
    return ScenarioConfig(
        name="fig-swap-lambda",
        instrument=_swap(),
        credit=CreditConfig(lambda_A=0.1, lambda_B=0.05),
        market=FLAT_MARKET,
        breaks=BreaksConfig(dates=(2.0,)),
        run=RunConfig(
            report="sweep",
            sweep=SweepConfig("lambda_B", _grid(0.02, 0.3, 15)),
            series=((("theta", 4.0),), (("theta", 2.0),), (("theta", 1.0),)),
        ),
    )


PRESETS = {
    "table1": table1,
    "table2": table2,
    "table3": table3,
    "fig1": fig1,
    "fig-lambda": fig_lambda,
    "fig-swap-that": fig_swap_that,
    "fig-swap-lambda": fig_swap_lambda,
}


class UnknownPreset(KeyError):
    def __str__(self) -> str:
        return self.args[0]


def presets() -> list[str]:
    return list(PRESETS)


def get_preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise UnknownPreset(f"unknown preset {name!r}; valid names: {', '.join(PRESETS)}") from None
