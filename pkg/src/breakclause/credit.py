"""Joint default times: exponential marginals glued by a Gumbel copula.

Survival law ``P(tau_A > s, tau_B > t) = exp(-[(lA s)^theta + (lB t)^theta]^(1/theta))``.
Simultaneous defaults have zero probability, so the two first-to-default
probabilities partition the joint-survival decrement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Party(enum.Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Party":
        return Party.B if self is Party.A else Party.A


@dataclass(frozen=True)
class DefaultModel:
    lambda_A: float
    lambda_B: float
    theta: float = 1.0
    lgd_A: float = 1.0
    lgd_B: float = 1.0

    def __post_init__(self):
        if self.lambda_A < 0 or self.lambda_B < 0:
            raise ValueError("default intensities must be nonnegative")
        if not self.theta >= 1.0:
            raise ValueError(f"Gumbel parameter theta must be >= 1, got {self.theta}")
        for name in ("lgd_A", "lgd_B"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    def intensity(self, party: Party) -> float:
        return self.lambda_A if party is Party.A else self.lambda_B

    def lgd(self, party: Party) -> float:
        return self.lgd_A if party is Party.A else self.lgd_B

    @property
    def first_default_intensity(self) -> float:
        """Intensity of min(tau_A, tau_B): (lA^theta + lB^theta)^(1/theta)."""
        return _lp_norm(self.lambda_A, self.lambda_B, self.theta)

    def first_share(self, party: Party) -> float:
        """Probability that ``party`` is the first to default (time independent)."""
        lam = self.first_default_intensity
        if lam == 0.0:
            return 0.0
        return (self.intensity(party) / lam) ** self.theta


def _lp_norm(a: float, b: float, p: float) -> float:
    if a == 0.0 or b == 0.0:
        return max(a, b)
    if math.isinf(p):
        return max(a, b)
    # scale to avoid overflow for large theta
    m = max(a, b)
    return m * ((a / m) ** p + (b / m) ** p) ** (1.0 / p)


def kendall_tau(theta: float) -> float:
    if not theta >= 1.0:
        raise ValueError("theta must be >= 1")
    return 1.0 - 1.0 / theta


def survival_joint(model: DefaultModel, t_A: float, t_B: float) -> float:
    if t_A < 0 or t_B < 0:
        raise ValueError("times must be nonnegative")
    return math.exp(-_lp_norm(model.lambda_A * t_A, model.lambda_B * t_B, model.theta))


def survival_to(model: DefaultModel, t: float) -> float:
    """P(min(tau_A, tau_B) > t)."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    return math.exp(-model.first_default_intensity * t)


def joint_density(model: DefaultModel, t_A: float, t_B: float) -> float:
    """Density of (tau_A, tau_B) off the diagonal."""
    if t_A <= 0 or t_B <= 0:
        raise ValueError("density defined for positive times only")
    th = model.theta
    la, lb = model.lambda_A, model.lambda_B
    if th == 1.0:
        return la * lb * math.exp(-la * t_A - lb * t_B)
    if t_A == t_B:
        raise ValueError("diagonal singular mass excluded")
    u, v = la * t_A, lb * t_B
    if u == 0.0 or v == 0.0:
        return 0.0
    s = u ** th + v ** th
    w = s ** (1.0 / th)
    return math.exp(-w) * la * lb * (u * v) ** (th - 1.0) * s ** (1.0 / th - 2.0) * (w + th - 1.0)


def first_to_default_prob(model: DefaultModel, party: Party, t1: float, t2: float) -> float:
    """P(t1 < tau_X < min(tau_Y, t2)) for X = ``party``."""
    if t1 < 0 or t1 > t2:
        raise ValueError(f"need 0 <= t1 <= t2, got t1={t1}, t2={t2}")
    lam = model.first_default_intensity
    # exp(-a) - exp(-b) = exp(-a) * (1 - exp(a - b)), kept in expm1 form for small gaps
    decrement = -math.exp(-lam * t1) * math.expm1(-lam * (t2 - t1))
    return model.first_share(party) * decrement


def conditional_first_to_default_prob(
    model: DefaultModel, party: Party, t1: float, t2: float, given: float
) -> float:
    """First-to-default probability in (t1, t2) conditional on no default by ``given``."""
    return first_to_default_prob(model, party, t1, t2) / survival_to(model, given)


def marginal_default_prob(model: DefaultModel, party: Party, t1: float, t2: float) -> float:
    """P(t1 < tau_X <= t2) from the marginal law alone (own default ignored)."""
    if t1 < 0 or t1 > t2:
        raise ValueError(f"need 0 <= t1 <= t2, got t1={t1}, t2={t2}")
    lam = model.intensity(party)
    return -math.exp(-lam * t1) * math.expm1(-lam * (t2 - t1))
