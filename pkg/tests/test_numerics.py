import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breakclause.numerics import (
    INF,
    Bracket,
    Correlation,
    QuadratureError,
    RootFindingError,
    binorm_cdf,
    find_root,
    norm_cdf,
    quad2d,
)

finite = st.floats(-6.0, 6.0)
rhos = st.floats(-0.999, 0.999)


def bvn_oracle(x, y, rho):
    """P(X<=x, Y<=y) = int_{-inf}^x phi(s) Phi((y - rho s)/sqrt(1-rho^2)) ds at 30 digits."""
    mpmath.mp.dps = 30
    x, y, rho = mpmath.mpf(x), mpmath.mpf(y), mpmath.mpf(rho)
    c = mpmath.sqrt(1 - rho ** 2)

    def f(s):
        return mpmath.npdf(s) * mpmath.ncdf((y - rho * s) / c)

    pts = [-mpmath.inf]
    if rho != 0 and y / rho < x:
        pts.append(y / rho)
    pts.append(x)
    return float(mpmath.quad(f, pts))


@pytest.mark.parametrize("x", [-3.0, -0.7, 0.0, 0.4, 2.5])
@pytest.mark.parametrize("y", [-2.0, 0.3, 1.9])
@pytest.mark.parametrize("rho", [-0.95, -0.5, 0.0, 0.3, 0.8, 0.99])
def test_binorm_matches_high_precision_quadrature(x, y, rho):
    assert binorm_cdf(x, y, rho) == pytest.approx(bvn_oracle(x, y, rho), abs=1e-14)


def test_binorm_degenerate_and_infinite_arguments():
    assert binorm_cdf(0.3, -0.2, 1.0) == norm_cdf(-0.2)
    assert binorm_cdf(0.3, 0.5, -1.0) == pytest.approx(norm_cdf(0.3) - norm_cdf(-0.5), abs=1e-15)
    assert binorm_cdf(-0.3, -0.5, -1.0) == 0.0
    assert binorm_cdf(INF, 0.7, 0.4) == norm_cdf(0.7)
    assert binorm_cdf(-0.2, INF, Correlation(0.4)) == norm_cdf(-0.2)
    assert binorm_cdf(-INF, 0.7, 0.4) == 0.0
    assert binorm_cdf(0.1, 0.2, 0.0) == pytest.approx(norm_cdf(0.1) * norm_cdf(0.2), abs=1e-16)
    with pytest.raises(ValueError):
        binorm_cdf(0.0, 0.0, 1.2)


@settings(max_examples=200, deadline=None)
@given(finite, finite, rhos)
def test_binorm_symmetry_and_frechet_bounds(x, y, rho):
    p = binorm_cdf(x, y, rho)
    assert p == pytest.approx(binorm_cdf(y, x, rho), abs=1e-15)
    lo = max(0.0, norm_cdf(x) + norm_cdf(y) - 1.0)
    hi = min(norm_cdf(x), norm_cdf(y))
    assert lo - 1e-15 <= p <= hi + 1e-15


@settings(max_examples=200, deadline=None)
@given(finite, finite, rhos)
def test_binorm_reflection_identity(x, y, rho):
    # P(X<=x, Y<=y) + P(X<=x, Y>y) = Phi(x), with P(X<=x, -Y<-y) using -rho
    assert binorm_cdf(x, y, rho) + binorm_cdf(x, -y, -rho) == pytest.approx(norm_cdf(x), abs=2e-15)


@settings(max_examples=100, deadline=None)
@given(finite, st.floats(-6.0, 5.9), rhos)
def test_binorm_monotone_in_second_argument(x, y, rho):
    assert binorm_cdf(x, y + 0.1, rho) >= binorm_cdf(x, y, rho) - 1e-16


def test_norm_cdf_tails():
    assert norm_cdf(-40.0) == pytest.approx(math.erfc(40 / math.sqrt(2)) / 2, rel=1e-14)
    assert norm_cdf(0.0) == 0.5


def test_find_root_recovers_known_root():
    f = lambda x: x ** 3 - 2.0
    assert find_root(f, Bracket.around(f, 0.0, 3.0)) == pytest.approx(2 ** (1 / 3), abs=1e-12)


def test_bracket_accepts_reversed_endpoints():
    f = lambda x: x - 0.25
    b = Bracket.around(f, 1.0, 0.0)
    assert b.lo < b.hi
    assert find_root(f, b) == pytest.approx(0.25, abs=1e-14)


def test_bracket_without_sign_change_is_rejected():
    with pytest.raises(RootFindingError, match="no sign change"):
        Bracket.around(lambda x: x * x + 1.0, -1.0, 1.0)


def test_find_root_reports_best_iterate_when_out_of_iterations():
    f = lambda x: math.tan(x) - x / 3.0
    with pytest.raises(RootFindingError) as err:
        find_root(f, Bracket.around(f, -0.5, 1.0), tol=1e-15, maxiter=2)
    assert err.value.best is not None


def test_quad2d_rectangle_and_triangle():
    assert quad2d(lambda x, y: x * y, (0.0, 1.0), (0.0, 1.0)) == pytest.approx(0.25, abs=1e-12)
    # area of the triangle 0 < y < x < 1
    assert quad2d(lambda x, y: 1.0, (0.0, 1.0), (0.0, lambda x: x)) == pytest.approx(0.5, abs=1e-12)


def test_quad2d_infinite_limits():
    val = quad2d(lambda x, y: math.exp(-x - 2 * y), (0.0, INF), (0.0, INF))
    assert val == pytest.approx(0.5, abs=1e-10)


def test_quad2d_raises_on_divergent_integrand():
    with pytest.raises(QuadratureError):
        quad2d(lambda x, y: 1.0 / (x * y), (0.0, 1.0), (0.0, 1.0), tol=1e-12)
