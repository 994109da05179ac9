"""Monte-Carlo cross-checks for the analytic and lattice routes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from scipy.special import ndtr

from .credit import DefaultModel, Party, first_to_default_prob
from .equity import EquityForwardSpec, SingleBreak
from .rates.tree import HWTree


def sample_default_times(model: DefaultModel, n: int, rng: np.random.Generator):
    """Draw (tau_A, tau_B) from the Gumbel bivariate exponential law.

    Marshall-Olkin frailty: V positive stable with Laplace transform
    exp(-s^(1/theta)) (Kanter's representation), X_i = (E_i / V)^(1/theta)
    has joint survival exp(-(x^theta + y^theta)^(1/theta)).
    """
    theta = model.theta
    e = rng.standard_exponential((2, n))
    if theta == 1.0:
        x = e
    else:
        alpha = 1.0 / theta
        u = rng.uniform(0.0, math.pi, n)
        w = rng.standard_exponential(n)
        v = (
            np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)
            * (np.sin((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
        )
        x = (e / v) ** alpha
    with np.errstate(divide="ignore"):
        tau_a = np.where(model.lambda_A > 0, x[0] / model.lambda_A, np.inf)
        tau_b = np.where(model.lambda_B > 0, x[1] / model.lambda_B, np.inf)
    return tau_a, tau_b


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    paths: int

    def within(self, value: float, n_se: float = 3.0) -> bool:
        return abs(value - self.mean) <= n_se * self.stderr


def simulate_forward_with_bc(
    spec: EquityForwardSpec,
    model: DefaultModel,
    bc: SingleBreak,
    paths: int,
    rng: np.random.Generator,
) -> MCEstimate:
    """Lumped-default simulation of the forward with B's break at t_hat.

    Defaults before t_hat settle at t_hat against V0(t_hat); defaults in
    (t_hat, T) settle at T. Survivors at t_hat break iff B's continuation
    gain (BDVA - BCVA over the remaining life) is not positive.
    """
    t_hat, T = bc.t_hat, spec.maturity
    sig, r = spec.sigma, spec.rate
    z = rng.standard_normal((2, paths))
    s_hat = spec.s0 * np.exp((r - 0.5 * sig ** 2) * t_hat + sig * math.sqrt(t_hat) * z[0])
    s_T = s_hat * np.exp((r - 0.5 * sig ** 2) * (T - t_hat) + sig * math.sqrt(T - t_hat) * z[1])
    tau_a, tau_b = sample_default_times(model, paths, rng)
    first = np.minimum(tau_a, tau_b)
    a_first = tau_a < tau_b

    v_hat = spec.sign * (s_hat - spec.strike * spec.discount(t_hat, T))
    v_T = spec.sign * (s_T - spec.strike)

    def settle(v, defaulted, by_a):
        loss = np.where(by_a, -model.lgd_A * np.maximum(v, 0.0), model.lgd_B * np.maximum(-v, 0.0))
        return v + np.where(defaulted, loss, 0.0)

    # B's gain from continuing, on each path's spot at t_hat
    wa = model.lgd_A * first_to_default_prob(model, Party.A, t_hat, T)
    wb = model.lgd_B * first_to_default_prob(model, Party.B, t_hat, T)
    call, put = _bs_call_put(s_hat, spec.strike * spec.discount(t_hat, T), sig * math.sqrt(T - t_hat))
    pos, neg = (call, put) if spec.side == "payer" else (put, call)
    gain = wb * neg - wa * pos

    early = first < t_hat
    at_hat = settle(v_hat, early, a_first) * spec.discount(0.0, t_hat)
    late = settle(v_T, first < T, a_first) * spec.discount(0.0, T)
    payoff = np.where(early | (gain <= 0.0), at_hat, late)
    return MCEstimate(float(payoff.mean()), float(payoff.std(ddof=1) / math.sqrt(paths)), paths)


def _bs_call_put(spot: np.ndarray, strike_pv: float, vol: float):
    """Vectorised Black-Scholes call and put with discounted strike ``strike_pv``."""
    d1 = (np.log(spot / strike_pv) + 0.5 * vol * vol) / vol
    d2 = d1 - vol
    call = spot * ndtr(d1) - strike_pv * ndtr(d2)
    return call, call - spot + strike_pv


def simulate_tree_paths(tree: HWTree, paths: int, rng: np.random.Generator):
    """Sample node indices and pathwise discount factors D(0, t_i) on the lattice.

    Returns ``(nodes, discount)`` with shapes (slices, paths).
    """
    n = tree.n_slices
    nodes = np.zeros((n, paths), dtype=int)
    disc = np.ones((n, paths))
    for i in range(n - 1):
        pd, pm, pu = tree.probs[i]
        cur = nodes[i]
        u = rng.random(paths)
        move = np.where(u < pd[cur], -1, np.where(u < pd[cur] + pm[cur], 0, 1))
        nodes[i + 1] = tree.child[i][cur] + move
        disc[i + 1] = disc[i] * tree.step_discount[i][cur]
    return nodes, disc
