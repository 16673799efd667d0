"""Generate a synthetic market history, fit frontiers per date and the factor dynamics."""

import argparse

import numpy as np

from fiopt.frontier import run_backtest
from fiopt.io import data_path, generate_synthetic_history, load_config, load_universe, quarterly_dates


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", default=str(data_path("config.json")))
    p.add_argument("--universe", default=str(data_path("universe16.csv")))
    p.add_argument("--seed", type=int)
    p.add_argument("--no-stdev", action="store_true")
    args = p.parse_args()
    cfg = load_config(args.config)
    U = load_universe(args.universe)
    seed = cfg.seed if args.seed is None else args.seed
    risk = cfg.risk.without("stdev") if args.no_stdev else cfg.risk
    dates = quarterly_dates(cfg.backtest_start, cfg.backtest_end, cfg.step_months)
    series = generate_synthetic_history(cfg.history, U, dates, seed, cfg.riskfree_curve())
    res = run_backtest(series, U, cfg.constraints, risk, cfg.grid_points(), cfg.credit_model(),
                       dt=cfg.step_months / 12.0)
    print(f"{'date':>10} {'a':>8} {'b':>8} {'rmse/a':>8}")
    for d in res.dates:
        f = res.fits[d]
        print(f"{d:>10} {f.a:8.4f} {f.b:8.4f} {f.rmse / f.a:8.4f}")
    for k, msg in res.errors.items():
        print(f"skipped {k}: {msg}")
    fs = res.factors
    if fs is None:
        return
    corr = np.corrcoef(np.log(fs.a), np.log(fs.b))[0, 1]
    corr_star = np.corrcoef(np.log(fs.a_star), np.log(fs.b_star))[0, 1]
    print(f"p={fs.p:.4f} corr(ln a, ln b)={corr:.3f} corr(ln a*, ln b*)={corr_star:.2e}")
    if fs.ou is not None:
        ou = fs.ou
        print("mean-reversion matrix (per year):")
        print(np.array2string(ou.kappa, precision=3))
        print("standard errors:")
        print(np.array2string(ou.kappa_stderr, precision=3))
        print("long-run mean of (ln a, ln b):", np.array2string(ou.mean, precision=3))


if __name__ == "__main__":
    main()
