"""Regenerate the shipped sample universe, run configuration and synthetic history."""

import argparse
import json
from pathlib import Path

from fiopt.io import (HistoryParams, data_path, generate_synthetic_history, load_rating_curves,
                      metadata_line, quarterly_dates, write_market_series, write_universe)
from fiopt.samples import sample_universe

CONFIG = {
    "risk": {"sigma_y": 0.009, "sigma_c": 0.35, "rho": 0.8, "horizon": 1.0, "alphas": [1.0, 1.0, 1.0, 2.0]},
    "constraints": {
        "sector_caps": {"HY": 0.60, "EM": 0.15, "structured": 0.10, "financial": 0.20},
        "average_rating": "BB",
        "warf_cap": None,
        "budget": 1.0,
    },
    "scenarios": [
        {"label": "rates+2%", "rate_bump": 0.02, "loss_floor": 0.10},
        {"label": "CSx2", "spread_multiplier": 2.0, "loss_floor": 0.08},
        {"label": "CSL", "stress": True, "loss_floor": 0.12},
        {"label": "steepener", "rate_bump": {"short": -0.005, "long": 0.01, "pivot": 5.0}, "loss_floor": 0.06},
    ],
    "grid": {"lo": 0.005, "hi": 0.40, "n": 20},
    "transition_matrix": "transitions.csv",
    "rating_curves": "rating_curves.csv",
    "recovery_rate": 0.30,
    "horizon": 1.0,
    "backtest": {"start": "2006-01-01", "end": "2016-10-01", "step_months": 3},
    "history": {"sigma_y": 0.009, "kappa": 0.0, "sigma_hat": 0.40, "rho": 0.8, "kappa_spread": 0.3},
    "seed": 7,
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(data_path("")), help="output directory")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    curves = load_rating_curves(data_path("rating_curves.csv"))
    universe = sample_universe(curves)
    write_universe(out / "universe16.csv", universe,
                   "# Stylised 16-sleeve universe; invented parameters, z* are placeholder stress levels")
    (out / "config.json").write_text(json.dumps(CONFIG, indent=2) + "\n")
    bt = CONFIG["backtest"]
    dates = quarterly_dates(bt["start"], bt["end"], bt["step_months"])
    series = generate_synthetic_history(HistoryParams(**CONFIG["history"]), universe, dates,
                                        seed=CONFIG["seed"], riskfree=curves.riskfree)
    write_market_series(out / "history.csv", series, metadata_line("sample", CONFIG["seed"]))
    print(f"wrote {len(universe)} sleeves and {len(series)} dates to {out}")


if __name__ == "__main__":
    main()
