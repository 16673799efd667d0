"""The stylised 16-sleeve sample universe.

Parameter values are invented for illustration. Yields are the reference
riskfree curve at the sleeve maturity plus a spread, floaters reference the
three-month point. Stress spreads ``z*`` are placeholder levels of the size
seen in a severe credit crisis.
"""

from __future__ import annotations

from .credit import RatingCurveSet
from .sleeve import Sleeve, sleeve_durations

FLOAT_TENOR = 0.25

# name, ticker, maturity, rating, spread, floating, sectors, limit, stress spread
SAMPLE_ROWS = (
    ("UST_2Y", "UST2", 2.0, "AAA", 0.0, False, (), 1.0, 0.0),
    ("UST_5Y", "UST5", 5.0, "AAA", 0.0, False, (), 1.0, 0.0),
    ("UST_10Y", "UST10", 10.0, "AAA", 0.0, False, (), 1.0, 0.0),
    ("UST_30Y", "UST30", 30.0, "AAA", 0.0, False, (), 1.0, 0.0),
    ("IG_AA", "CORP_AA", 7.0, "AA", 0.0070, False, (), 0.40, 0.025),
    ("IG_A", "CORP_A", 7.0, "A", 0.0100, False, (), 0.40, 0.040),
    ("IG_BBB", "CORP_BBB", 7.0, "BBB", 0.0165, False, (), 0.40, 0.060),
    ("HY_BB", "HY_BB", 5.0, "BB", 0.0270, False, ("HY",), 0.30, 0.100),
    ("HY_B", "HY_B", 5.0, "B", 0.0400, False, ("HY",), 0.30, 0.150),
    ("HY_CCC", "HY_CCC", 5.0, "CCC", 0.0800, False, ("HY",), 0.10, 0.250),
    ("US_SUBFIN", "USFIN_SUB", 8.0, "BBB-", 0.0230, False, ("financial",), 0.20, 0.090),
    ("EU_SUBFIN", "EUFIN_SUB_FLT", 5.0, "BB+", 0.0250, True, ("financial", "HY"), 0.20, 0.110),
    ("EM_IG", "EM_IG", 8.0, "BBB", 0.0180, False, ("EM",), 0.15, 0.070),
    ("EM_HY", "EM_HY", 6.0, "BB-", 0.0350, False, ("EM", "HY"), 0.15, 0.130),
    ("RMBS", "RMBS_AGY", 6.0, "AAA", 0.0050, False, ("structured",), 0.10, 0.030),
    ("CLO", "CLO_AAA_BBB_FLT", 6.0, "A", 0.0150, True, ("structured",), 0.10, 0.080),
)


def sample_universe(curves: RatingCurveSet, frequency: int = 2) -> list:
    """Sleeves priced at par on ``curves``' riskfree curve plus their spread."""
    out = []
    for name, ticker, T, rating, s, flt, sectors, limit, z in SAMPLE_ROWS:
        rf = curves.riskfree(FLOAT_TENOR if flt else T)
        y = round(rf + s, 6)
        d_ir, d_cr = sleeve_durations(T, y, frequency, y, flt)
        out.append(Sleeve(name, T, y, frequency, y, s, rating, d_ir, d_cr, flt,
                          frozenset(sectors), limit, z, ticker))
    return out
