"""The investable unit of the optimiser: one stylised asset class."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .instruments import duration_convexity

SECTOR_TAGS = ("HY", "EM", "structured", "financial")


@dataclass(frozen=True)
class Sleeve:
    """A broad asset class treated as a single bullet bond.

    Parameters
    ----------
    name : str
        Unique identifier.
    maturity, coupon, frequency :
        Bullet-bond terms (years, fraction per annum, payments per year).
    yield_ : float
        Current yield, fraction per annum.
    spread : float
        Credit spread over the riskfree (or LIBOR) yield.
    rating : str
        Rating label on the scale in :mod:`fiopt.credit`.
    d_ir, d_cr : float
        Interest-rate and credit durations. Floating sleeves have ``d_ir = 0``.
    limit : float
        Maximum allocation as a fraction of NAV.
    stress_spread : float
        Stress spread level ``z*`` used by the credit stress loss.
    """

    name: str
    maturity: float
    coupon: float
    frequency: int
    yield_: float
    spread: float
    rating: str
    d_ir: float
    d_cr: float
    floating: bool = False
    sectors: frozenset = field(default_factory=frozenset)
    limit: float = 1.0
    stress_spread: float = 0.0
    ticker: str = ""

    def __post_init__(self):
        if self.d_ir < 0 or self.d_cr < 0:
            raise ValueError(f"{self.name}: durations must be nonnegative")
        if self.floating and self.d_ir != 0:
            raise ValueError(f"{self.name}: floating sleeve must have zero rate duration")
        if not 0.0 <= self.limit <= 1.0:
            raise ValueError(f"{self.name}: allocation limit {self.limit} outside [0, 1]")
        if self.spread < 0:
            raise ValueError(f"{self.name}: negative spread")
        unknown = set(self.sectors) - set(SECTOR_TAGS)
        if unknown:
            raise ValueError(f"{self.name}: unknown sector tags {sorted(unknown)}")
        object.__setattr__(self, "sectors", frozenset(self.sectors))

    @property
    def riskfree(self) -> float:
        """Riskfree (or LIBOR, for floaters) yield implied by yield minus spread."""
        return self.yield_ - self.spread

    def with_market(self, yield_: float, spread: float) -> "Sleeve":
        """Copy at new market levels with durations recomputed."""
        d_ir, d_cr = sleeve_durations(self.maturity, self.coupon, self.frequency, yield_, self.floating)
        return replace(self, yield_=yield_, spread=spread, d_ir=d_ir, d_cr=d_cr)


def sleeve_durations(T, c, m, y, floating=False):
    """(rate duration, credit duration) for a sleeve; a floater keeps only the credit leg."""
    d, _ = duration_convexity(T, c, m, y)
    return (0.0 if floating else d), d
