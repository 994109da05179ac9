import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breakclause.config import SwapConfig
from breakclause.credit import DefaultModel, Party
from breakclause.rates import BreakSchedule, Holder
from breakclause.risk import swap_ucva_fn, ucva, ucva_sensitivity

SIDES = ("payer", "receiver")


@pytest.fixture(scope="module")
def lattices(sloped_market):
    return {s: sloped_market.lattice(SwapConfig(), s) for s in SIDES}


def exposures(lat):
    """E[D(0,T_k) V(T_k)^+] from Arrow-Debreu prices."""
    return np.array([
        float(np.dot(lat.tree.arrow_debreu[lat.slices[k]], np.maximum(lat.value_nodes(k), 0.0)))
        for k in range(lat.n_periods)
    ])


@pytest.mark.parametrize("side", SIDES)
def test_ucva_equals_bcva_with_riskless_b(lattices, side):
    lat = lattices[side]
    m = DefaultModel(0.08, 0.2, 3.0, lgd_A=0.6)
    riskless_b = DefaultModel(0.08, 0.0, 3.0, lgd_A=0.6)
    assert ucva(lat, m) == pytest.approx(lat.value(riskless_b).bcva, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 0.4), st.floats(1.0, 8.0), st.sampled_from(SIDES))
def test_no_break_ucva_ignores_b(lattices, lb, theta, side):
    lat = lattices[side]
    base = ucva(lat, DefaultModel(0.1, 0.05, 4.0))
    assert ucva(lat, DefaultModel(0.1, lb, theta)) == base


@pytest.mark.parametrize("side", SIDES)
def test_no_break_sensitivity_against_analytic_derivative(lattices, side):
    lat = lattices[side]
    la = 0.07
    e = exposures(lat)
    t = np.array(lat.dates)
    dm = t[1:] * np.exp(-la * t[1:]) - t[:-1] * np.exp(-la * t[:-1])
    analytic = float(np.dot(dm, e))
    rep = ucva_sensitivity(swap_ucva_fn(lat), DefaultModel(la, 0.05, 2.0))
    assert rep.sensitivity == pytest.approx(analytic, rel=1e-7)
    assert rep.per_bp == pytest.approx(rep.sensitivity * 1e-4)


@pytest.mark.parametrize("side", SIDES)
def test_break_truncates_exposure(lattices, side):
    lat = lattices[side]
    m = DefaultModel(0.1, 0.05, 4.0)
    full = ucva(lat, m)
    with_bc = ucva(lat, m, BreakSchedule((2.0,)))
    head = ucva(lat, m, BreakSchedule((2.0,), Holder.MUTUAL))
    assert head <= with_bc <= full


def test_mutual_break_keeps_only_exposure_before_it(lattices):
    lat = lattices["payer"]
    m = DefaultModel(0.1, 0.05, 4.0)
    e = exposures(lat)
    t = np.array(lat.dates)
    marg = np.exp(-0.1 * t[:-1]) - np.exp(-0.1 * t[1:])
    assert ucva(lat, m, BreakSchedule((2.0,), Holder.MUTUAL)) == pytest.approx(
        float(np.dot(marg[:4], e[:4])), abs=1e-15)


def test_riskless_a_has_no_ucva(lattices):
    assert ucva(lattices["payer"], DefaultModel(0.0, 0.1)) == 0.0


@pytest.mark.parametrize("breaks", [None, (2.0,)])
def test_central_difference_is_second_order(lattices, breaks):
    lat = lattices["payer"]
    schedule = BreakSchedule(breaks) if breaks else None
    fn = swap_ucva_fn(lat, schedule)
    m = DefaultModel(0.1, 0.05, 4.0)
    s = [ucva_sensitivity(fn, m, h).sensitivity for h in (1e-3, 5e-4, 2.5e-4)]
    d1, d2 = s[0] - s[1], s[1] - s[2]
    # O(h^2) error: successive differences shrink by about 4
    assert abs(d1) < 1e-6 and d2 != 0.0
    assert 3.5 < d1 / d2 < 4.5


def test_sensitivity_bump_validation(lattices):
    fn = swap_ucva_fn(lattices["payer"])
    with pytest.raises(ValueError):
        ucva_sensitivity(fn, DefaultModel(0.1, 0.05), bump=0.0)
    with pytest.raises(ValueError):
        ucva_sensitivity(fn, DefaultModel(1e-5, 0.05), bump=1e-4)
