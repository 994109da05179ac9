"""Bilateral counterparty-risk valuation of derivatives with break clauses."""

from .config import ConfigError, ScenarioConfig, dump_config, load_config, parse_config
from .credit import DefaultModel, Party, first_to_default_prob, kendall_tau, survival_joint
from .equity import (
    EquityForwardSpec,
    SingleBreak,
    exercise_boundary,
    par_strike_no_bc,
    par_strike_with_bc,
    value_no_bc,
    value_with_bc,
)
from .numerics import NumericalError, QuadratureError, RootFindingError, binorm_cdf, find_root, quad2d
from .report import Table, ValuationReport
from .risk import SensitivityReport, ucva, ucva_sensitivity

__all__ = [
    "ConfigError", "DefaultModel", "EquityForwardSpec", "NumericalError", "Party",
    "QuadratureError", "RootFindingError", "ScenarioConfig", "SensitivityReport", "SingleBreak",
    "Table", "ValuationReport", "binorm_cdf", "dump_config", "exercise_boundary", "find_root",
    "first_to_default_prob", "kendall_tau", "load_config", "par_strike_no_bc", "par_strike_with_bc",
    "parse_config", "quad2d", "survival_joint", "ucva", "ucva_sensitivity", "value_no_bc",
    "value_with_bc",
]
