"""Market snapshots and per-sleeve expected excess returns."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .credit import (
    DEFAULT,
    Curve,
    RatingCurveSet,
    ReturnDecomposition,
    TransitionMatrix,
    expected_total_return,
    letter,
)
from .instruments import price_bullet
from .sleeve import Sleeve


@dataclass(frozen=True)
class MarketSnapshot:
    """Riskfree curve plus per-sleeve yield and spread on one date."""

    date: str
    riskfree: Curve
    yields: dict = field(default_factory=dict)
    spreads: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CreditModel:
    """Transition matrix with reference spread-curve shapes per rating.

    On a given date every reference curve is scaled by the ratio of the
    sleeve's observed spread to its own rating's reference spread, so curve
    shapes and rating gaps move proportionally with the spread level.
    """

    matrix: TransitionMatrix
    curves: RatingCurveSet

    def spread_curves(self, rating: str, T: float, spread: float) -> dict:
        ref = self.curves.spread(rating, T)
        k = spread / ref if ref > 0 else 1.0
        return {r: c.scaled(k) for r, c in self.curves.spreads.items()}


def reprice_universe(template, snap: MarketSnapshot) -> list:
    """Sleeves at the snapshot's yields and spreads, durations recomputed."""
    out = []
    for s in template:
        if s.name not in snap.yields or s.name not in snap.spreads:
            raise KeyError(f"snapshot {snap.date} has no data for sleeve {s.name}")
        out.append(s.with_market(float(snap.yields[s.name]), float(snap.spreads[s.name])))
    return out


def sleeve_return(sleeve: Sleeve, riskfree: Curve, credit: Optional[CreditModel] = None,
                  horizon: float = 1.0) -> ReturnDecomposition:
    """Expected excess return of a sleeve per unit of market value.

    Forward curves stay fixed (carry and rolldown), spread curves roll down
    with their reference shape, and rating migration to default uses the
    transition matrix. Discounting at the front end of the riskfree curve
    makes the result an excess return. Floaters roll on a flat curve at their
    reference rate, so they carry no rate rolldown.
    """
    T, c, m, y, s = sleeve.maturity, sleeve.coupon, sleeve.frequency, sleeve.yield_, sleeve.spread
    if T <= horizon:
        raise ValueError(f"{sleeve.name}: maturity must exceed the horizon")
    lo, hi = riskfree.tenors[0], riskfree.tenors[-1]
    if sleeve.floating:
        base = Curve.flat(y - s, lo, hi)
    else:
        # align the curve with the sleeve's own riskfree yield at its maturity
        base = riskfree.shifted((y - s) - riskfree(T))
    use_credit = credit is not None and s > 0
    if use_credit:
        spreads = credit.spread_curves(sleeve.rating, T, s)
        matrix = credit.matrix
        recovery = credit.curves.recovery_rate
    else:
        spreads = {sleeve.rating: Curve.flat(s, lo, hi)}
        matrix = TransitionMatrix((sleeve.rating, DEFAULT), np.eye(2)) if sleeve.rating != DEFAULT else None
        recovery = 0.0
    key = sleeve.rating if sleeve.rating in spreads else letter(sleeve.rating)
    spreads = dict(spreads)
    spreads[key] = spreads[key].shifted(s - spreads[key](T))
    curves = RatingCurveSet(base, spreads, recovery, checked=False)
    p0 = price_bullet(T, c, m, y)
    dec = expected_total_return(T, c, m, key, p0, curves, matrix, horizon)
    return ReturnDecomposition(dec.carry_rolldown / p0, dec.migration / p0, dec.cheapness / p0)


def expected_excess_returns(sleeves, riskfree: Curve, credit: Optional[CreditModel] = None,
                            horizon: float = 1.0) -> np.ndarray:
    return np.array([sleeve_return(s, riskfree, credit, horizon).total for s in sleeves])
