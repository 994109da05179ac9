"""Hull-White lattice pricing of interest-rate swaps with break clauses."""

from .curve import YieldCurve, payment_schedule
from .swap import (
    BreakSchedule,
    Holder,
    SwapLattice,
    SwapSpec,
    SwaptionQuote,
    black_swaption_price,
    calibrate_sigma,
    exposure_leg,
    lattice_par_rate,
    mutual_bc_value,
    par_rate,
    swap_value_nodes,
    tree_swaption_price,
    ubc_value,
)
from .tree import HWParams, HWTree, build_tree, make_slices

__all__ = [
    "BreakSchedule", "HWParams", "HWTree", "Holder", "SwapLattice", "SwapSpec",
    "SwaptionQuote", "YieldCurve", "black_swaption_price", "build_tree", "calibrate_sigma",
    "exposure_leg", "lattice_par_rate", "make_slices", "mutual_bc_value", "par_rate",
    "payment_schedule", "swap_value_nodes", "tree_swaption_price", "ubc_value",
]
