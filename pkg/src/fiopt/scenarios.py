"""Rate and credit market scenarios, short-rate simulation and model move statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.stats import norm

from .instruments import price_bullet, stress_loss
from .sleeve import Sleeve

BUSINESS_DAYS = 260
Q95 = norm.ppf(0.975)
Q99 = norm.ppf(0.995)


@dataclass(frozen=True)
class CurveTwist:
    """Steepening/flattening bump, linear in maturity.

    The bump moves from ``short_bump`` at ``T = 0`` to ``long_bump`` at
    ``T = 2 * pivot`` and stays flat beyond; with ``long_bump = -short_bump``
    the curve rotates about ``pivot``.
    """

    short_bump: float
    long_bump: float
    pivot: float = 5.0

    def __call__(self, T: float) -> float:
        w = min(max(T / (2.0 * self.pivot), 0.0), 1.0)
        return (1.0 - w) * self.short_bump + w * self.long_bump


@dataclass(frozen=True)
class ScenarioSpec:
    label: str
    rate_bump: Union[float, CurveTwist] = 0.0
    spread_multiplier: float = 1.0
    stress: bool = False
    loss_floor: float = 0.0

    def __post_init__(self):
        if self.spread_multiplier <= 0:
            raise ValueError("spread_multiplier must be positive")
        if self.loss_floor < 0:
            raise ValueError("loss_floor must be nonnegative")

    def bump_at(self, T: float) -> float:
        if isinstance(self.rate_bump, CurveTwist):
            return self.rate_bump(T)
        return float(self.rate_bump)


RATES_UP_2 = ScenarioSpec("rates+2%", rate_bump=0.02)
SPREADS_X2 = ScenarioSpec("CSx2", spread_multiplier=2.0)
CREDIT_STRESS = ScenarioSpec("CSL", stress=True)


@dataclass(frozen=True)
class RateModelParams:
    sigma_y: float = 0.009
    kappa: float = 0.0
    sigma_hat: float = 0.40

    def __post_init__(self):
        if self.sigma_y < 0 or self.kappa < 0 or self.sigma_hat < 0:
            raise ValueError("model parameters must be nonnegative")


def sleeve_stress_loss(sleeve: Sleeve) -> float:
    """Credit stress loss with stress yield = riskfree + z*; zero when z* is unset."""
    if sleeve.stress_spread <= 0:
        return 0.0
    y_star = sleeve.riskfree + sleeve.stress_spread
    return stress_loss(sleeve.maturity, sleeve.yield_, sleeve.frequency, y_star)


def apply_scenario(sleeve: Sleeve, spec: ScenarioSpec) -> float:
    """Return of ``sleeve`` (fraction of its value) under scenario ``spec``.

    Fixed-rate sleeves take the rate bump at their maturity; floaters ignore
    rate moves. Spreads scale by ``spread_multiplier``. Stress scenarios return
    minus the credit stress loss.
    """
    if spec.stress:
        return -sleeve_stress_loss(sleeve)
    T, c, m, y = sleeve.maturity, sleeve.coupon, sleeve.frequency, sleeve.yield_
    bump = 0.0 if sleeve.floating else spec.bump_at(T)
    dy = bump + sleeve.spread * (spec.spread_multiplier - 1.0)
    if dy == 0.0:
        return 0.0
    return price_bullet(T, c, m, y + dy) / price_bullet(T, c, m, y) - 1.0


def scenario_matrix(sleeves, specs) -> np.ndarray:
    """Returns ``dX[i, j]`` of sleeve ``j`` in scenario ``i``."""
    return np.array([[apply_scenario(s, sc) for s in sleeves] for sc in specs], dtype=float)


def simulate_short_rate(
    params: RateModelParams,
    theta: Optional[Callable[[float], float]] = None,
    horizon: float = 1.0,
    steps: int = BUSINESS_DAYS,
    n_paths: int = 1,
    seed: int = 0,
    r0: float = 0.0,
) -> np.ndarray:
    """Euler paths of ``dr = (theta(t) - kappa r) dt + sigma_y dW``.

    Returns an array of shape ``(n_paths, steps + 1)`` starting at ``r0``.
    """
    if steps < 1 or n_paths < 1:
        raise ValueError("steps and n_paths must be >= 1")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    dt = horizon / steps
    rng = np.random.default_rng(seed)
    paths = np.empty((n_paths, steps + 1))
    paths[:, 0] = r0
    sd = params.sigma_y * math.sqrt(dt)
    r = paths[:, 0].copy()
    for k in range(steps):
        drift = (0.0 if theta is None else theta(k * dt)) - params.kappa * r
        r = r + drift * dt + sd * rng.standard_normal(n_paths)
        paths[:, k + 1] = r
    return paths


@dataclass(frozen=True)
class MoveStats:
    """One model row of a move-statistics table."""

    mean_abs: float
    second: float
    fourth: float
    band95: tuple
    band99: tuple


def _horizon_sigma(vol, horizon_days, business_days_per_year):
    return vol * math.sqrt(horizon_days / business_days_per_year)


def table_stats_normal(sigma_y: float, horizon_days: int = 10, business_days_per_year: int = BUSINESS_DAYS) -> MoveStats:
    """Moments and quantile bands of Normal yield moves, in percentage points."""
    s = 100.0 * _horizon_sigma(sigma_y, horizon_days, business_days_per_year)
    return MoveStats(
        mean_abs=s * math.sqrt(2.0 / math.pi),
        second=s * s,
        fourth=3.0 * s**4,
        band95=(-Q95 * s, Q95 * s),
        band99=(-Q99 * s, Q99 * s),
    )


def lognormal_moments(s: float) -> tuple[float, float, float]:
    """Exact E|X|, E[X^2], E[X^4] for ``X = exp(s Z) - 1``."""
    mean_abs = math.exp(0.5 * s * s) * (2.0 * norm.cdf(s) - 1.0)
    # E[(e^{sZ} - 1)^k] by binomial expansion, E[e^{j s Z}] = e^{j^2 s^2 / 2}
    def raw(k):
        return sum(math.comb(k, j) * (-1) ** (k - j) * math.exp(0.5 * (j * s) ** 2) for j in range(k + 1))

    return mean_abs, raw(2), raw(4)


def table_stats_lognormal(
    sigma_hat: float,
    horizon_days: int = 10,
    business_days_per_year: int = BUSINESS_DAYS,
    n_mc: int = 0,
    seed: int = 0,
) -> MoveStats:
    """Statistics of relative spread moves ``exp(s Z) - 1`` (zero log-drift).

    Bands are closed form. Moments are exact unless ``n_mc > 0``, in which case
    they are Monte Carlo estimates from ``n_mc`` seeded draws.
    """
    s = _horizon_sigma(sigma_hat, horizon_days, business_days_per_year)
    if n_mc > 0:
        x = np.expm1(s * np.random.default_rng(seed).standard_normal(n_mc))
        mean_abs, second, fourth = float(np.mean(np.abs(x))), float(np.mean(x**2)), float(np.mean(x**4))
    else:
        mean_abs, second, fourth = lognormal_moments(s)
    return MoveStats(
        mean_abs=mean_abs,
        second=second,
        fourth=fourth,
        band95=(math.expm1(-Q95 * s), math.expm1(Q95 * s)),
        band99=(math.expm1(-Q99 * s), math.expm1(Q99 * s)),
    )
