import json
import math

import numpy as np
import pytest

from fiopt.credit import Curve
from fiopt.io import (HistoryParams, ValidationError, data_path, generate_synthetic_history, load_config,
                      load_market_series, load_rating_curves, load_transition_matrix, load_universe, metadata_line,
                      parse_grid, quarterly_dates, write_market_series, write_rating_curves,
                      write_transition_matrix, write_universe)
from fiopt.scenarios import table_stats_normal
from oracles import price_by_cashflows

HEADER = "name,ticker,maturity,coupon,frequency,rating,yield,spread,d_ir,d_cr,floating,sectors,limit,stress_spread\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_empty_universe(tmp_path):
    with pytest.raises(ValidationError, match="empty"):
        load_universe(write(tmp_path, "u.csv", HEADER))


def test_limit_above_one_names_the_row(tmp_path):
    rows = HEADER + "A,,5,0.04,2,AAA,0.04,0,,,false,,1.0,0\nB,,5,0.04,2,AAA,0.04,0,,,false,,1.2,0\n"
    with pytest.raises(ValidationError, match=r"row 2 \(B\)"):
        load_universe(write(tmp_path, "u.csv", rows))


def test_bad_rows_are_all_reported(tmp_path):
    rows = (HEADER + "A,,5,0.04,2,ZZZ,0.04,0,,,false,,1.0,0\n" + "A2,,5,0.04,2,BB,0.06,0.02,,,false,,1.0,0\n"
            + "A2,,5,0.04,2,AAA,0.04,0,,,false,,1.0,0\n")
    with pytest.raises(ValidationError) as exc:
        load_universe(write(tmp_path, "u.csv", rows))
    msg = str(exc.value)
    assert "row 1" in msg and "row 2" in msg and "row 3" in msg


def test_missing_file_and_columns(tmp_path):
    with pytest.raises(ValidationError):
        load_universe(tmp_path / "nope.csv")
    with pytest.raises(ValidationError, match="missing columns"):
        load_universe(write(tmp_path, "u.csv", "name,maturity\nA,5\n"))


def test_shipped_universe_durations_match_finite_differences():
    U = load_universe(data_path("universe16.csv"))
    assert len(U) == 16
    assert len({s.name for s in U}) == 16
    for s in U:
        h = 1e-6
        p = price_by_cashflows(s.maturity, s.coupon, s.frequency, s.yield_)
        d = -(price_by_cashflows(s.maturity, s.coupon, s.frequency, s.yield_ + h)
              - price_by_cashflows(s.maturity, s.coupon, s.frequency, s.yield_ - h)) / (2 * h) / p
        assert s.d_cr == pytest.approx(d, rel=1e-6)
        assert s.d_ir == (0.0 if s.floating else s.d_cr)
        if s.spread > 0:
            assert s.stress_spread > 0


def test_blank_durations_are_recomputed(tmp_path):
    U = load_universe(write(tmp_path, "u.csv", HEADER + "A,,5,0.05,2,BB,0.06,0.02,,,false,HY,0.5,0.1\n"))
    h = 1e-6
    p = price_by_cashflows(5, 0.05, 2, 0.06)
    d = -(price_by_cashflows(5, 0.05, 2, 0.06 + h) - price_by_cashflows(5, 0.05, 2, 0.06 - h)) / (2 * h) / p
    assert U[0].d_ir == pytest.approx(d, rel=1e-6)
    assert U[0].sectors == frozenset({"HY"})


def test_universe_round_trip(tmp_path):
    U = load_universe(data_path("universe16.csv"))
    write_universe(tmp_path / "u.csv", U, metadata_line("abc", 3))
    assert load_universe(tmp_path / "u.csv") == U
    assert (tmp_path / "u.csv").read_text().startswith("# fiopt config_hash=abc seed=3")


def test_matrix_and_curves_round_trip(tmp_path):
    M = load_transition_matrix(data_path("transitions.csv"))
    write_transition_matrix(tmp_path / "m.csv", M)
    M2 = load_transition_matrix(tmp_path / "m.csv")
    assert M2.states == M.states and np.array_equal(M2.matrix, M.matrix)
    C = load_rating_curves(data_path("rating_curves.csv"))
    write_rating_curves(tmp_path / "c.csv", C)
    C2 = load_rating_curves(tmp_path / "c.csv")
    assert C2.riskfree == C.riskfree and dict(C2.spreads) == dict(C.spreads)


def test_matrix_validation(tmp_path):
    bad = "from,A,D\nA,0.8,0.1\nD,0,1\n"
    with pytest.raises(ValidationError, match="sum"):
        load_transition_matrix(write(tmp_path, "m.csv", bad))
    order = "from,A,D\nD,0,1\nA,0.9,0.1\n"
    with pytest.raises(ValidationError):
        load_transition_matrix(write(tmp_path, "m2.csv", order))


def test_market_series_round_trip_and_validation(tmp_path):
    U = load_universe(data_path("universe16.csv"))
    dates = quarterly_dates("2010-01-01", "2011-01-01")
    S = generate_synthetic_history(HistoryParams(), U, dates, seed=1)
    write_market_series(tmp_path / "h.csv", S)
    S2 = load_market_series(tmp_path / "h.csv")
    assert S2 == S
    text = (tmp_path / "h.csv").read_text().splitlines()
    swapped = "\n".join([text[0], text[2], text[1]] + text[3:])
    with pytest.raises(ValidationError, match="increasing"):
        load_market_series(write(tmp_path, "bad.csv", swapped))
    neg = (tmp_path / "h.csv").read_text().replace(f",{S[1].spreads['HY_B']!r},", ",-0.01,", 1)
    with pytest.raises(ValidationError, match="negative"):
        load_market_series(write(tmp_path, "neg.csv", neg))


def test_synthetic_history_without_volatility_is_constant():
    U = load_universe(data_path("universe16.csv"))
    dates = quarterly_dates("2010-01-01", "2012-01-01")
    S = generate_synthetic_history(HistoryParams(sigma_y=0.0, sigma_hat=0.0), U, dates, seed=5)
    assert all(s.yields == S[0].yields and s.spreads == S[0].spreads for s in S)


def test_synthetic_history_is_seeded():
    U = load_universe(data_path("universe16.csv"))
    dates = quarterly_dates("2010-01-01", "2012-01-01")
    a = generate_synthetic_history(HistoryParams(), U, dates, seed=5)
    b = generate_synthetic_history(HistoryParams(), U, dates, seed=5)
    c = generate_synthetic_history(HistoryParams(), U, dates, seed=6)
    assert a == b and a != c


def test_ten_day_yield_moves_match_normal_table():
    U = load_universe(data_path("universe16.csv"))[:1]
    # two calendar weeks are ten business days
    d = np.arange(np.datetime64("2001-01-01"), np.datetime64("2200-01-01"), np.timedelta64(14, "D"))
    S = generate_synthetic_history(HistoryParams(sigma_hat=0.0), U, [str(x) for x in d], seed=2)
    y = np.array([s.yields["UST_2Y"] for s in S])
    dx = 100 * np.diff(y)
    ref = table_stats_normal(0.009)
    n = dx.size
    assert abs(np.mean(np.abs(dx)) - ref.mean_abs) < 3 * np.std(np.abs(dx)) / math.sqrt(n)
    assert abs(np.mean(dx**4) - ref.fourth) < 3 * np.std(dx**4) / math.sqrt(n)


def test_config_loading(tmp_path):
    cfg = load_config(data_path("config.json"))
    assert cfg.risk.alphas == (1.0, 1.0, 1.0, 2.0)
    assert cfg.constraints.sector_caps["structured"] == 0.10
    assert len(cfg.grid_points()) == 20
    assert cfg.scenarios[3].bump_at(10) == pytest.approx(0.01)
    assert cfg.source_hash
    bad = json.loads(data_path("config.json").read_text())
    bad["constraints"]["sector_caps"]["HY"] = 1.5
    p = write(tmp_path, "c.json", json.dumps(bad))
    with pytest.raises(ValidationError):
        load_config(p)
    ref = json.loads(data_path("config.json").read_text())
    ref["transition_matrix"] = "missing.csv"
    with pytest.raises(ValidationError, match="not found"):
        load_config(write(tmp_path, "c2.json", json.dumps(ref)))


def test_grid_parsing():
    assert parse_grid("0.01:0.3:5") == (0.01, 0.3, 5)
    for bad in ("0.3:0.01:5", "a:b:c", "0:1:5", "0.1:0.2:1"):
        with pytest.raises(ValidationError):
            parse_grid(bad)
