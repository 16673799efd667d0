"""Portfolio risk measures and their weighted-maximum combination.

Measures, all as fractions of NAV:

* ``ir``    loss from a +2% riskfree rate move (floaters are immune)
* ``csx2``  loss from all credit spreads doubling
* ``csl``   credit stress loss with yields moved to riskfree + z*
* ``stdev`` one-horizon standard deviation from duration-based factor variances
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenarios import CREDIT_STRESS, RATES_UP_2, SPREADS_X2, apply_scenario, sleeve_stress_loss
from .sleeve import Sleeve

MEASURES = ("ir", "csx2", "csl", "stdev")
_SCENARIO_FOR = {"ir": RATES_UP_2, "csx2": SPREADS_X2}


@dataclass(frozen=True)
class RiskConfig:
    sigma_y: float = 0.009
    sigma_c: float = 0.35
    rho: float = 0.8
    horizon: float = 1.0
    alphas: tuple = (1.0, 1.0, 1.0, 2.0)

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.sigma_y <= 0 or self.sigma_c <= 0 or self.horizon <= 0:
            raise ValueError("volatilities and horizon must be positive")
        if len(self.alphas) != 4:
            raise ValueError("need one weight per measure")
        if any(a is not None and a <= 0 for a in self.alphas):
            raise ValueError("measure weights must be positive (None drops a measure)")

    def weight(self, measure: str):
        return self.alphas[MEASURES.index(measure)]

    def without(self, measure: str) -> "RiskConfig":
        """Copy with ``measure`` removed from the combination."""
        a = list(self.alphas)
        a[MEASURES.index(measure)] = None
        return RiskConfig(self.sigma_y, self.sigma_c, self.rho, self.horizon, tuple(a))


def loss_vector(sleeves, measure: str) -> np.ndarray:
    """Per-unit-weight loss of each sleeve under a scenario measure."""
    if measure == "csl":
        return np.array([sleeve_stress_loss(s) for s in sleeves])
    try:
        spec = _SCENARIO_FOR[measure]
    except KeyError:
        raise ValueError(f"unknown scenario measure {measure!r}") from None
    return -np.array([apply_scenario(s, spec) for s in sleeves])


def scenario_measure(u, sleeves, measure: str) -> float:
    """Signed portfolio loss under ``ir``, ``csx2`` or ``csl``; linear in ``u``."""
    return float(np.dot(np.asarray(u, dtype=float), loss_vector(sleeves, measure)))


class StdevModel:
    """Portfolio standard deviation from rate and correlated credit factors.

    ``var = h * (sy^2 (u.Dir)^2 + sc^2 rho (u.w)^2 + sc^2 (1-rho) sum (u_j w_j)^2)``
    with ``w_j = D_cr_j * s_j``.
    """

    def __init__(self, sleeves, cfg: RiskConfig = RiskConfig()):
        self.d_ir = np.array([s.d_ir for s in sleeves], dtype=float)
        self.w = np.array([s.d_cr * s.spread for s in sleeves], dtype=float)
        self.cfg = cfg

    def variance(self, u) -> float:
        u = np.asarray(u, dtype=float)
        c = self.cfg
        a = u @ self.d_ir
        b = u @ self.w
        idio = np.sum((u * self.w) ** 2)
        return c.horizon * (c.sigma_y**2 * a * a + c.sigma_c**2 * (c.rho * b * b + (1 - c.rho) * idio))

    def __call__(self, u) -> float:
        return math.sqrt(max(self.variance(u), 0.0))

    def gradient(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        sd = self(u)
        if sd == 0.0:
            return np.zeros_like(u)
        c = self.cfg
        dv = 2 * c.horizon * (
            c.sigma_y**2 * (u @ self.d_ir) * self.d_ir
            + c.sigma_c**2 * (c.rho * (u @ self.w) * self.w + (1 - c.rho) * u * self.w**2)
        )
        return dv / (2 * sd)


def portfolio_stdev(u, sleeves, cfg: RiskConfig = RiskConfig()) -> float:
    return StdevModel(sleeves, cfg)(u)


def risk_components(u, sleeves, cfg: RiskConfig = RiskConfig()) -> dict:
    """Unweighted value of every measure."""
    out = {m: scenario_measure(u, sleeves, m) for m in ("ir", "csx2", "csl")}
    out["stdev"] = portfolio_stdev(u, sleeves, cfg)
    return out


def total_risk(u, sleeves, cfg: RiskConfig = RiskConfig()) -> tuple[float, str]:
    """Weighted maximum of the measures and the label of the largest one.

    Measures whose weight is ``None`` are left out.
    """
    comps = risk_components(u, sleeves, cfg)
    best, label = -math.inf, ""
    for m in MEASURES:
        a = cfg.weight(m)
        if a is None:
            continue
        v = a * comps[m]
        if v > best:
            best, label = v, m
    return best, label
