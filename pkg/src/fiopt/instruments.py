"""Bullet-bond analytics: price/yield conversion, duration, convexity and stress loss.

All prices are fractions of par quoted at a coupon date (no accrued interest).
A bond of maturity ``T`` paying ``m`` coupons a year is treated as having
``round(m * T)`` whole coupon periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

#: Lowest yield searched by :func:`yield_from_price` unless overridden.
YIELD_FLOOR = -0.05
#: Highest yield searched by :func:`yield_from_price`.
YIELD_CAP = 10.0
PRICE_TOL = 1e-10


class DomainError(ValueError):
    """Raised when a yield makes the discount base ``1 + y/m`` non-positive."""


class NoRootError(ValueError):
    """Raised when no yield on the search bracket reproduces a price."""


@dataclass(frozen=True)
class BulletBond:
    maturity_years: float
    coupon_rate: float
    payments_per_year: int = 2

    def __post_init__(self):
        if self.maturity_years <= 0:
            raise ValueError("maturity_years must be positive")
        if self.payments_per_year < 1:
            raise ValueError("payments_per_year must be >= 1")

    @property
    def periods(self) -> int:
        return n_periods(self.maturity_years, self.payments_per_year)

    def price(self, y: float) -> float:
        return price_bullet(self.maturity_years, self.coupon_rate, self.payments_per_year, y)

    def quote(self, y: float) -> "PriceQuote":
        return PriceQuote(clean_price=self.price(y), yield_value=y)


@dataclass(frozen=True)
class PriceQuote:
    clean_price: float
    yield_value: float


def n_periods(T: float, m: int) -> int:
    """Whole number of coupon periods for maturity ``T``, halves rounded up, at least one."""
    return max(1, math.floor(m * T + 0.5 + 1e-9))


def _log_base(y: float, m: int) -> float:
    base = 1.0 + y / m
    if not base > 0.0:
        raise DomainError(f"1 + y/m must be positive (y={y}, m={m})")
    return math.log1p(y / m)


def price_bullet(T: float, c: float, m: int, y: float) -> float:
    """Price of a bullet bond as a fraction of par.

    ``P = v + c * (1 - v) / y`` with ``v = (1 + y/m)^(-n)``; at ``y = 0`` the
    annuity factor takes its limit ``n/m`` so the price is ``1 + c*T``.
    """
    n = n_periods(T, m)
    lb = _log_base(y, m)
    disc = math.exp(-n * lb)
    if y == 0.0:
        annuity = n / m
    else:
        # -expm1 keeps 1 - v accurate for tiny |y|
        annuity = -math.expm1(-n * lb) / y
    return disc + c * annuity


def _cashflows(T: float, c: float, m: int):
    n = n_periods(T, m)
    cpn = c / m
    return n, [(k, cpn + (1.0 if k == n else 0.0)) for k in range(1, n + 1)]


def duration_convexity(T: float, c: float, m: int, y: float) -> tuple[float, float]:
    """Modified duration and convexity, both from analytic derivatives in ``y``.

    Returns
    -------
    (duration, convexity)
        ``-P'/P`` in years and ``P''/P`` in years squared.
    """
    _log_base(y, m)
    base = 1.0 + y / m
    _, flows = _cashflows(T, c, m)
    p = d1 = d2 = 0.0
    for k, cf in flows:
        v = base ** (-k)
        p += cf * v
        d1 -= cf * (k / m) * v / base
        d2 += cf * (k / m) * ((k + 1) / m) * v / (base * base)
    return -d1 / p, d2 / p


def yield_from_price(
    T: float,
    c: float,
    m: int,
    P: float,
    lo: float = YIELD_FLOOR,
    hi: float = YIELD_CAP,
) -> float:
    """Invert :func:`price_bullet` for the yield.

    Price is strictly decreasing in yield, so the root on ``[lo, hi]`` is
    unique when it exists. Raises :class:`NoRootError` when ``P`` lies outside
    ``[price(hi), price(lo)]``.
    """
    if P <= 0:
        raise NoRootError("price must be positive")
    lo = max(lo, -m * (1.0 - 1e-9))
    p_lo = price_bullet(T, c, m, lo)
    p_hi = price_bullet(T, c, m, hi)
    if not (p_hi - PRICE_TOL <= P <= p_lo + PRICE_TOL):
        raise NoRootError(
            f"price {P} not attainable for yields in [{lo}, {hi}] "
            f"(price range [{p_hi:.6g}, {p_lo:.6g}])"
        )
    if abs(P - p_lo) <= PRICE_TOL:
        return lo
    if abs(P - p_hi) <= PRICE_TOL:
        return hi
    y = brentq(lambda x: price_bullet(T, c, m, x) - P, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    return float(y)


def stress_loss(T: float, y0: float, m: int, y_star: float) -> float:
    """Loss on a par bond (coupon ``y0``) when its yield jumps to ``y_star``.

    Equals ``1 - price_bullet(T, y0, m, y_star)``; negative when ``y0 > y_star``.
    """
    if y_star <= 0:
        raise DomainError("stress yield must be positive")
    n = n_periods(T, m)
    return (1.0 - y0 / y_star) * -math.expm1(-n * math.log1p(y_star / m))
