"""Rating scales, rating-transition Markov chains, rating curves and expected return."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from .instruments import price_bullet

RATINGS = (
    "AAA", "AA+", "AA", "AA-", "A+", "A", "A-",
    "BBB+", "BBB", "BBB-", "BB+", "BB", "BB-",
    "B+", "B", "B-", "CCC+", "CCC", "CCC-", "CC", "C", "D",
)
DEFAULT = "D"
_WARF_ANCHORS = {"AAA": 1.0, "AA": 20.0, "A": 120.0, "BBB": 360.0, "BB": 1350.0,
                 "B": 2720.0, "CCC": 6500.0, "D": 10000.0}


class UnknownRatingError(KeyError):
    pass


class NonStochasticError(ValueError):
    pass


def _warf_table():
    # geometric interpolation between whole-letter anchors
    anchors = [RATINGS.index(k) for k in _WARF_ANCHORS]
    values = list(_WARF_ANCHORS.values())
    out = {}
    for (i0, v0), (i1, v1) in zip(zip(anchors, values), zip(anchors[1:], values[1:])):
        for i in range(i0, i1 + 1):
            w = (i - i0) / (i1 - i0)
            out[RATINGS[i]] = v0 if w == 0 else v1 if w == 1 else math.exp((1 - w) * math.log(v0) + w * math.log(v1))
    return out


_WARF = _warf_table()


def check_rating(label: str) -> str:
    if label not in RATINGS:
        raise UnknownRatingError(label)
    return label


def linear_score(label: str) -> int:
    """Linear rating score: AAA=1, AA+=2, AA=3, ..."""
    return RATINGS.index(check_rating(label)) + 1


def warf_score(label: str) -> float:
    """Weighted-average-rating-factor score, interpolated geometrically for notches."""
    return _WARF[check_rating(label)]


def letter(label: str) -> str:
    """Whole-letter grade of a notch rating (``BB-`` -> ``BB``; CC and C -> CCC)."""
    check_rating(label)
    if label in ("CC", "C"):
        return "CCC"
    return label.rstrip("+-")


@dataclass(frozen=True)
class TransitionMatrix:
    """One-period rating migration probabilities with an absorbing default state last."""

    states: tuple
    matrix: np.ndarray
    period: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", p)
        object.__setattr__(self, "states", tuple(self.states))
        n = len(self.states)
        if p.shape != (n, n):
            raise NonStochasticError(f"matrix shape {p.shape} does not match {n} states")
        for s in self.states:
            check_rating(s)
        if self.states[-1] != DEFAULT:
            raise NonStochasticError("last state must be default (D)")
        if np.any(p < 0) or np.any(p > 1):
            raise NonStochasticError("probabilities must lie in [0, 1]")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-12:
            raise NonStochasticError("rows must sum to one")
        if p[-1, -1] != 1.0:
            raise NonStochasticError("default state must be absorbing")

    def index(self, label: str) -> int:
        """Row of ``label``; notches absent from the matrix use their whole-letter row."""
        if label in self.states:
            return self.states.index(label)
        if letter(label) in self.states:
            return self.states.index(letter(label))
        raise UnknownRatingError(label)

    def default_probability(self, label: str, t: float = 1.0) -> float:
        return float(transition_probabilities(self, t)[self.index(label), -1])


def transition_probabilities(M: TransitionMatrix, t: float) -> np.ndarray:
    """Migration probabilities over ``t`` years.

    Whole multiples of the period use matrix powers. Fractional horizons use
    the eigendecomposition power when it stays a valid stochastic matrix, and
    otherwise interpolate linearly between the neighbouring integer powers.
    """
    if t < 0:
        raise ValueError("horizon must be nonnegative")
    k = t / M.period
    n = len(M.states)
    if abs(k - round(k)) < 1e-12:
        return np.linalg.matrix_power(M.matrix, int(round(k)))
    lo = math.floor(k)
    w, V = np.linalg.eig(M.matrix)
    try:
        P = (V * np.power(w.astype(complex), k)) @ np.linalg.inv(V)
        ok = np.max(np.abs(P.imag)) < 1e-10 and P.real.min() > -1e-10 and np.linalg.cond(V) < 1e8
    except np.linalg.LinAlgError:
        ok = False
    if ok:
        P = np.clip(P.real, 0.0, 1.0)
    else:
        A = np.linalg.matrix_power(M.matrix, lo)
        P = (1 - (k - lo)) * A + (k - lo) * (A @ M.matrix)
    P[-1] = np.eye(n)[-1]
    return P / P.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class Curve:
    """Piecewise-linear curve on increasing tenors, no extrapolation."""

    tenors: tuple
    values: tuple

    def __post_init__(self):
        t = tuple(float(x) for x in self.tenors)
        v = tuple(float(x) for x in self.values)
        if len(t) != len(v) or len(t) == 0:
            raise ValueError("tenors and values must be non-empty and aligned")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("tenors must be strictly increasing")
        object.__setattr__(self, "tenors", t)
        object.__setattr__(self, "values", v)

    @classmethod
    def flat(cls, level: float, lo: float = 0.0, hi: float = 50.0) -> "Curve":
        return cls((lo, hi), (level, level))

    def __call__(self, T: float) -> float:
        if not self.tenors[0] - 1e-12 <= T <= self.tenors[-1] + 1e-12:
            raise ValueError(f"maturity {T} outside curve range [{self.tenors[0]}, {self.tenors[-1]}]")
        return float(np.interp(T, self.tenors, self.values))

    def shifted(self, dv: float) -> "Curve":
        return Curve(self.tenors, tuple(v + dv for v in self.values))

    def scaled(self, k: float) -> "Curve":
        return Curve(self.tenors, tuple(v * k for v in self.values))


@dataclass(frozen=True)
class RatingCurveSet:
    """Spread curve per rating plus the riskfree zero curve and recovery rate.

    ``discount(t) = (1 + r(t))^-t`` with ``r`` the riskfree curve.
    """

    riskfree: Curve
    spreads: Mapping[str, Curve]
    recovery_rate: float = 0.30
    checked: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.recovery_rate < 1.0:
            raise ValueError("recovery rate must lie in [0, 1)")
        if not self.checked:
            return
        for label, crv in self.spreads.items():
            check_rating(label)
            if min(crv.values) < 0:
                raise ValueError(f"negative spread on {label} curve")
        ordered = sorted(self.spreads, key=linear_score)
        grid = sorted({t for c in self.spreads.values() for t in c.tenors})
        for better, worse in zip(ordered, ordered[1:]):
            for T in grid:
                try:
                    sb, sw = self.spreads[better](T), self.spreads[worse](T)
                except ValueError:
                    continue
                if sw < sb - 1e-12:
                    raise ValueError(f"{worse} curve tighter than {better} at T={T}")

    def spread(self, rating: str, T: float) -> float:
        if rating in self.spreads:
            return self.spreads[rating](T)
        if letter(rating) in self.spreads:
            return self.spreads[letter(rating)](T)
        raise UnknownRatingError(rating)

    def discount(self, t: float) -> float:
        return (1.0 + self.riskfree(t)) ** (-t)

    def with_curve(self, rating: str, curve: Curve, checked: bool = True) -> "RatingCurveSet":
        spreads = dict(self.spreads)
        spreads[rating] = curve
        return RatingCurveSet(self.riskfree, spreads, self.recovery_rate, checked)


def price_on_rating_curve(rating: str, T: float, c: float, m: int, curves: RatingCurveSet) -> float:
    """Price of a bond of ``rating``; a defaulted bond is worth the recovery rate."""
    if rating == DEFAULT:
        return curves.recovery_rate
    y = curves.riskfree(T) + curves.spread(rating, T)
    return price_bullet(T, c, m, y)


@dataclass(frozen=True)
class ReturnDecomposition:
    carry_rolldown: float
    migration: float
    cheapness: float

    @property
    def total(self) -> float:
        return self.carry_rolldown + self.migration + self.cheapness


def expected_total_return(
    T: float,
    c: float,
    m: int,
    rating: str,
    price: float,
    curves: RatingCurveSet,
    M: TransitionMatrix,
    t: float = 1.0,
    accrual_adjust: bool = False,
) -> ReturnDecomposition:
    """Expected total return over horizon ``t`` split into three pieces.

    ``carry_rolldown = c t + B(t) P_i(T-t) - P_i(T)``;
    ``migration = B(t) sum_j p_ij(t) (P_j(T-t) - P_i(T-t))``;
    ``cheapness = P_i(T) - price``. With ``accrual_adjust`` the coupon
    accrual ``c t`` is reduced to ``(1 - exp(-lam t)) c / lam`` where ``lam``
    is the hazard rate implied by the one-year default probability.
    """
    check_rating(rating)
    if rating == DEFAULT:
        raise UnknownRatingError("cannot compute return from the default state")
    if not 0 <= t < T:
        raise ValueError("horizon must lie in [0, maturity)")
    row = transition_probabilities(M, t)[M.index(rating)]
    B = curves.discount(t)
    rem = T - t
    p_i_rem = price_on_rating_curve(rating, rem, c, m, curves)
    p_i_now = price_on_rating_curve(rating, T, c, m, curves)
    accrued = c * t
    if accrual_adjust:
        pd1 = M.default_probability(rating, 1.0)
        if pd1 > 0:
            lam = -math.log1p(-pd1)
            accrued = -math.expm1(-lam * t) * c / lam
    migration = 0.0
    for j, state in enumerate(M.states):
        if row[j] == 0.0:
            continue
        p_j = price_on_rating_curve(state, rem, c, m, curves)
        migration += row[j] * (p_j - p_i_rem)
    return ReturnDecomposition(
        carry_rolldown=accrued + B * p_i_rem - p_i_now,
        migration=B * migration,
        cheapness=p_i_now - price,
    )


def hurdle_yield(
    rating: str,
    T: float,
    c: Optional[float],
    m: int,
    curves: RatingCurveSet,
    M: TransitionMatrix,
    t: float = 1.0,
    riskfree: Optional[float] = None,
    bracket: tuple = (-0.02, 1.0),
    tol: float = 1e-5,
    accrual_adjust: bool = False,
) -> float:
    """Lowest yield at which the bond's expected total return is nonnegative.

    The rating-``rating`` curve is shifted in parallel so the bond yields ``y``
    at its maturity and prices on that curve; other rating curves stay put.
    ``c=None`` means a par bond (coupon equal to the yield). ``riskfree``
    replaces the riskfree curve with a flat level. Bisection to ``tol``
    (default 0.1bp).
    """
    if riskfree is not None:
        curves = replace(curves, riskfree=Curve.flat(riskfree, curves.riskfree.tenors[0], curves.riskfree.tenors[-1]))
    key = rating if rating in curves.spreads else letter(rating)
    if key not in curves.spreads:
        raise UnknownRatingError(rating)
    base = curves.spreads[key]
    rf_T = curves.riskfree(T)
    s_T = base(T)

    def tr(y):
        shifted = curves.with_curve(key, base.shifted(y - rf_T - s_T), checked=False)
        cpn = y if c is None else c
        p0 = price_on_rating_curve(rating, T, cpn, m, shifted)
        return expected_total_return(T, cpn, m, rating, p0, shifted, M, t, accrual_adjust).total

    lo, hi = bracket
    f_lo, f_hi = tr(lo), tr(hi)
    if f_lo >= 0:
        raise ValueError(f"return already nonnegative at bracket low {lo}")
    if f_hi < 0:
        raise ValueError(f"no yield in [{lo}, {hi}] gives nonnegative return")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if tr(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi
