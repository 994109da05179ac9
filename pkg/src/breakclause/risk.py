"""Unilateral CVA and its sensitivity to the counterparty's default intensity.

The unilateral measure ignores B's own default: exposures are weighted with
A's marginal default probabilities only. A break clause truncates the
exposure profile on the nodes where the holder breaks; that decision keeps
following the bilateral exercise rule, so the joint credit model enters
only through it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .credit import DefaultModel, Party, marginal_default_prob
from .rates.swap import BreakSchedule, Holder, SwapLattice, continues

DEFAULT_BUMP = 1e-4


@dataclass(frozen=True)
class SensitivityReport:
    base_ucva: float
    ucva_up: float
    ucva_down: float
    sensitivity: float  # dUCVA / dlambda_A
    bump: float

    @property
    def per_bp(self) -> float:
        """Change in UCVA for a one-basis-point move in lambda_A."""
        return self.sensitivity * 1e-4


def _unilateral_leg(lattice: SwapLattice, rate, model: DefaultModel, j_from: int, j_to: int):
    d = lattice.dates

    def term(k: int):
        w = model.lgd_A * marginal_default_prob(model, Party.A, d[k], d[k + 1])
        return w * np.maximum(lattice.value_nodes(k, rate), 0.0) if w else None

    return lattice.discounted_sum(term, j_from, j_to)


def ucva(
    lattice: SwapLattice,
    model: DefaultModel,
    breaks: BreakSchedule | None = None,
    rate: float | None = None,
) -> float:
    """Expected discounted loss from A's default, unconditional on B's survival."""
    n = lattice.n_periods
    if breaks is None or not breaks.dates:
        return float(_unilateral_leg(lattice, rate, model, 0, n)[0])
    idx = lattice.break_indices(breaks)
    if breaks.holder is Holder.MUTUAL:
        gains = [np.zeros_like(lattice.tree.x[lattice.slices[j]]) for j in idx]
    else:
        gains = lattice.continuation_gains(rate, model, idx, breaks.holder)
    bounds = list(idx[1:]) + [n]
    tail = None
    for j, j_next, gain in reversed(list(zip(idx, bounds, gains))):
        leg = _unilateral_leg(lattice, rate, model, j, j_next)
        if tail is not None:
            leg = leg + lattice.roll(tail, j_next, j)
        tail = np.where(continues(gain, breaks.holder), leg, 0.0)
    head = _unilateral_leg(lattice, rate, model, 0, idx[0])
    return float(head[0] + lattice.roll(tail, idx[0], 0)[0])


def ucva_sensitivity(
    ucva_fn: Callable[[DefaultModel], float], model: DefaultModel, bump: float = DEFAULT_BUMP
) -> SensitivityReport:
    """Central difference of ``ucva_fn`` in lambda_A, everything else fixed.

    ``ucva_fn`` must re-derive any exercise decisions from the model it is
    given, so the bumped runs see bumped exercise boundaries.
    """
    if bump <= 0:
        raise ValueError("bump must be positive")
    if model.lambda_A - bump < 0:
        raise ValueError("bump would make lambda_A negative")
    up = ucva_fn(replace(model, lambda_A=model.lambda_A + bump))
    down = ucva_fn(replace(model, lambda_A=model.lambda_A - bump))
    return SensitivityReport(ucva_fn(model), up, down, (up - down) / (2.0 * bump), bump)


def swap_ucva_fn(
    lattice: SwapLattice, breaks: BreakSchedule | None = None, rate: float | None = None
) -> Callable[[DefaultModel], float]:
    return lambda model: ucva(lattice, model, breaks, rate)
