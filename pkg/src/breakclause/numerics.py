"""Shared numerical kernel: normal CDFs, bracketing root finder, 2D quadrature."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate, optimize

INF = math.inf
TWO_PI = 2.0 * math.pi

# 20-point Gauss-Legendre rule on [-1, 1]; plenty for double precision in the
# Drezner-Wesolowsky / Genz integrands below.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


class NumericalError(RuntimeError):
    """Base class for numerical failures (maps to CLI exit code 3)."""


class RootFindingError(NumericalError):
    def __init__(self, message: str, best: float | None = None):
        super().__init__(message)
        self.best = best


class QuadratureError(NumericalError):
    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (partial estimate {estimate!r}, error {error!r})")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class Correlation:
    rho: float

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"correlation {self.rho} outside [-1, 1]")


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if np.sign(self.f_lo) == np.sign(self.f_hi) and self.f_lo != 0.0:
            raise RootFindingError(
                f"no sign change on [{self.lo}, {self.hi}]: f={self.f_lo!r}, {self.f_hi!r}"
            )

    @classmethod
    def around(cls, f: Callable[[float], float], a: float, b: float) -> "Bracket":
        """Evaluate ``f`` at both ends, accepting the endpoints in either order."""
        lo, hi = (a, b) if a < b else (b, a)
        return cls(lo, hi, f(lo), f(hi))


def norm_cdf(x: float) -> float:
    """Standard normal CDF; saturates to 0/1 and accepts +-inf."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(TWO_PI)


def _bvn_upper(h: float, k: float, r: float) -> float:
    """P(X > h, Y > k) for standard normals with correlation r, |r| < 1.

    Genz's rearrangement of the Drezner-Wesolowsky integrals, evaluated with
    a fixed Gauss-Legendre rule.
    """
    hk = h * k
    if abs(r) < 0.925:
        hs = 0.5 * (h * h + k * k)
        asr = math.asin(r)
        sn = np.sin(0.5 * asr * (1.0 + _GL_X))
        total = float(np.dot(_GL_W, np.exp((sn * hk - hs) / (1.0 - sn * sn))))
        return total * asr / (4.0 * math.pi) + norm_cdf(-h) * norm_cdf(-k)

    if r < 0.0:
        k = -k
        hk = -hk
    bvn = 0.0
    if abs(r) < 1.0:
        a2 = (1.0 - r) * (1.0 + r)
        a = math.sqrt(a2)
        bs = (h - k) ** 2
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 16.0
        bvn = a * math.exp(-0.5 * (bs / a2 + hk)) * (
            1.0 - c * (bs - a2) * (1.0 - d * bs / 5.0) / 3.0 + c * d * a2 * a2 / 5.0
        )
        if hk > -160.0:
            b = math.sqrt(bs)
            bvn -= (
                math.exp(-0.5 * hk)
                * math.sqrt(TWO_PI)
                * norm_cdf(-b / a)
                * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0)
            )
        a *= 0.5
        xs = (a * (1.0 + _GL_X)) ** 2
        rs = np.sqrt(1.0 - xs)
        terms = np.exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs - np.exp(
            -0.5 * (bs / xs + hk)
        ) * (1.0 + c * xs * (1.0 + d * xs))
        bvn += a * float(np.dot(_GL_W, terms))
        bvn = -bvn / TWO_PI
    if r > 0.0:
        return bvn + norm_cdf(-max(h, k))
    # k was negated above
    return -bvn + max(0.0, norm_cdf(-h) - norm_cdf(-k))


def binorm_cdf(x: float, y: float, corr: Union[Correlation, float]) -> float:
    """P(X <= x, Y <= y) for a standard bivariate normal.

    ``x`` and ``y`` may be +-inf. ``corr`` of exactly +-1 uses the degenerate
    univariate formula.
    """
    rho = corr.rho if isinstance(corr, Correlation) else float(corr)
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation {rho} outside [-1, 1]")
    if x == -INF or y == -INF:
        return 0.0
    if x == INF:
        return norm_cdf(y)
    if y == INF:
        return norm_cdf(x)
    if rho == 1.0:
        return norm_cdf(min(x, y))
    if rho == -1.0:
        return max(0.0, norm_cdf(x) - norm_cdf(-y))
    p = _bvn_upper(-x, -y, rho)
    return min(max(p, 0.0), 1.0)


def find_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol: float = 1e-12,
    maxiter: int = 200,
) -> float:
    """Brent's method on a sign-changing bracket."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if bracket.f_lo == 0.0:
        return bracket.lo
    if bracket.f_hi == 0.0:
        return bracket.hi
    root, res = optimize.brentq(
        f, bracket.lo, bracket.hi, xtol=tol, rtol=4 * np.finfo(float).eps,
        maxiter=maxiter, full_output=True, disp=False,
    )
    if not res.converged:
        raise RootFindingError(
            f"root finder hit {maxiter} iterations ({res.flag})", best=root
        )
    return root


Bound = Union[float, Callable[[float], float]]


def quad2d(
    f: Callable[[float, float], float],
    x_range: tuple[float, float],
    y_range: tuple[Bound, Bound],
    tol: float = 1e-10,
) -> float:
    """Adaptive iterated integral of ``f(x, y)`` over x in x_range, y in y_range.

    Limits may be infinite; the y limits may depend on x. Raises
    :class:`QuadratureError` if the adaptive scheme reports non-convergence or
    an error estimate above ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    y_lo, y_hi = y_range
    inner_err = [0.0]

    def inner(x: float) -> float:
        lo = y_lo(x) if callable(y_lo) else y_lo
        hi = y_hi(x) if callable(y_hi) else y_hi
        val, err = integrate.quad(
            lambda y: f(x, y), lo, hi, epsabs=0.1 * tol, epsrel=1e-12, limit=200
        )
        inner_err[0] = max(inner_err[0], err)
        return val

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                inner, x_range[0], x_range[1], epsabs=0.5 * tol, epsrel=1e-12, limit=200
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quad2d did not converge: {exc}", math.nan, math.inf)
    span = x_range[1] - x_range[0]
    total_err = err + (inner_err[0] * span if math.isfinite(span) else inner_err[0])
    if total_err > tol:
        raise QuadratureError("quad2d error estimate above tolerance", val, total_err)
    return val
