"""Command-line interface.

Exit codes: 0 success, 1 invalid input or usage, 2 solver failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .credit import UnknownRatingError
from .frontier import (DegenerateDataError, FrontierProblem, SolverFailure, fit_frontier,
                       run_backtest, sweep_frontier)
from .instruments import DomainError, duration_convexity, price_bullet
from .io import (ValidationError, data_path, generate_synthetic_history, load_config, load_market_series,
                 load_universe, metadata_line, parse_grid, quarterly_dates, write_market_series, write_table)
from .market import expected_excess_returns, sleeve_return
from .optimizer import build_constraints, maximize_er
from .risk import StdevModel, loss_vector, total_risk
from .scenarios import scenario_matrix

log = logging.getLogger("fiopt")

COMMANDS = ("price", "risk", "er", "optimize", "frontier", "backtest", "gen-data")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fiopt", description="Fixed-income allocation: pricing, risk, frontiers and backtests.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def common(sp, series=False):
        sp.add_argument("--config", help="run configuration JSON (default: shipped sample)")
        sp.add_argument("--universe", help="universe CSV (default: shipped 16-sleeve sample)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, help="override the configured seed")
        if series:
            sp.add_argument("--series", help="market series CSV")

    for name, helptext in (("price", "price and durations per sleeve"),
                           ("risk", "per-sleeve risk measures"),
                           ("er", "expected excess return decomposition per sleeve")):
        common(sub.add_parser(name, help=helptext))
    sp = sub.add_parser("optimize", help="maximise ER under scenario floors or a total-risk limit")
    common(sp)
    sp.add_argument("--limit", type=float, help="total-risk limit; default uses the configured scenario floors")
    sp.add_argument("--no-stdev", action="store_true", help="drop the standard-deviation measure")
    for name in ("frontier", "backtest"):
        sp = sub.add_parser(name, help="efficient frontier sweep and fit" if name == "frontier"
                            else "frontier fits over a market history and factor dynamics")
        common(sp, series=name == "backtest")
        sp.add_argument("--no-stdev", action="store_true", help="drop the standard-deviation measure")
        sp.add_argument("--grid", help="risk grid lo:hi:n (log-spaced)")
    sp = sub.add_parser("gen-data", help="write a synthetic market history")
    common(sp)
    sp.add_argument("--start", help="first date (default: configured backtest start)")
    sp.add_argument("--end", help="last date (default: configured backtest end)")
    return p


class _Run:
    """Inputs shared by every command."""

    def __init__(self, args):
        cfg_path = args.config or data_path("config.json")
        self.cfg = load_config(cfg_path)
        if args.seed is not None:
            self.cfg.seed = args.seed
        if getattr(args, "no_stdev", False):
            self.cfg.risk = self.cfg.risk.without("stdev")
        if getattr(args, "grid", None):
            self.cfg.grid = parse_grid(args.grid)
        self.universe = load_universe(args.universe or data_path("universe16.csv"))
        self.out = Path(args.out)
        self.meta = metadata_line(self.cfg.source_hash, self.cfg.seed)

    def write(self, name, header, rows):
        write_table(self.out / name, header, rows, self.meta)
        return self.out / name


def _print(header, rows):
    print(",".join(header))
    for r in rows:
        print(",".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in r))


def cmd_price(run, args):
    header = ["name", "price", "yield", "d_ir", "d_cr", "convexity"]
    rows = []
    for s in run.universe:
        D, C = duration_convexity(s.maturity, s.coupon, s.frequency, s.yield_)
        rows.append([s.name, price_bullet(s.maturity, s.coupon, s.frequency, s.yield_), s.yield_,
                     s.d_ir, s.d_cr, C])
    run.write("prices.csv", header, rows)
    _print(header, rows)


def cmd_risk(run, args):
    U = run.universe
    losses = {m: loss_vector(U, m) for m in ("ir", "csx2", "csl")}
    sd = StdevModel(U, run.cfg.risk)
    header = ["name", "ir", "csx2", "csl", "stdev"]
    rows = []
    for j, s in enumerate(U):
        e = np.zeros(len(U)); e[j] = 1.0
        rows.append([s.name, losses["ir"][j], losses["csx2"][j], losses["csl"][j], sd(e)])
    run.write("risk.csv", header, rows)
    _print(header, rows)


def cmd_er(run, args):
    credit = run.cfg.credit_model()
    rf = run.cfg.riskfree_curve()
    header = ["name", "carry_rolldown", "migration", "cheapness", "er"]
    rows = []
    for s in run.universe:
        d = sleeve_return(s, rf, credit, run.cfg.horizon)
        rows.append([s.name, d.carry_rolldown, float(d.migration), d.cheapness, float(d.total)])
    run.write("er.csv", header, rows)
    _print(header, rows)


def _er(run, sleeves=None):
    return expected_excess_returns(sleeves or run.universe, run.cfg.riskfree_curve(),
                                   run.cfg.credit_model(), run.cfg.horizon)


def cmd_optimize(run, args):
    U = run.universe
    er = _er(run)
    cons = build_constraints(U, run.cfg.constraints)
    if args.limit is not None:
        sol, _ = FrontierProblem(U, er, cons, run.cfg.risk).solve(args.limit)
    else:
        specs = run.cfg.scenarios
        dX = scenario_matrix(U, specs) if specs else None
        floors = [s.loss_floor for s in specs] if specs else None
        sol = maximize_er(er, cons, dX, floors, [f"scenario:{s.label}" for s in specs] or None)
        if not sol.optimal:
            raise SolverFailure(f"{sol.status}: {sol.diagnostics}")
    value, label = total_risk(sol.x, U, run.cfg.risk)
    rows = [[s.name, float(w)] for s, w in zip(U, sol.x)] + [["cash", float(1 - sum(sol.x))]]
    run.write("weights.csv", ["name", "weight"], rows)
    print(f"ER {sol.objective:.6f}  total risk {value:.6f} ({label})  binding: {', '.join(sol.binding)}")
    _print(["name", "weight"], rows)


def _point_rows(label, pts):
    return [[label, p.limit, p.er, p.binding] for p in pts]


def _fit_row(label, f):
    return [label, f.a, f.b, f.slope_at_origin, f.rmse]


POINT_HEADER = ["date", "limit", "er", "binding"]
FIT_HEADER = ["date", "a", "b", "slope_at_origin", "rmse"]


def cmd_frontier(run, args):
    U = run.universe
    er = _er(run)
    cons = build_constraints(U, run.cfg.constraints)
    pts = sweep_frontier(U, er, cons, run.cfg.risk, run.cfg.grid_points())
    fit = fit_frontier(pts, label="snapshot")
    run.write("frontier_points.csv", POINT_HEADER, _point_rows("snapshot", pts))
    run.write("frontier_fit.csv", FIT_HEADER, [_fit_row("snapshot", fit)])
    print(f"a={fit.a:.6f} b={fit.b:.6f} rmse={fit.rmse:.3g} points={len(pts)}")


def cmd_backtest(run, args):
    if not args.series:
        raise ValidationError("backtest needs --series")
    series = load_market_series(args.series)
    c = run.cfg
    if c.backtest_start:
        series = [s for s in series if s.date >= c.backtest_start]
    if c.backtest_end:
        series = [s for s in series if s.date <= c.backtest_end]
    if not series:
        raise ValidationError("no market dates inside the backtest window")
    res = run_backtest(series, run.universe, c.constraints, c.risk, c.grid_points(), c.credit_model(),
                       dt=c.step_months / 12.0)
    for d, msg in res.errors.items():
        print(f"warning: {d}: {msg}", file=sys.stderr)
    if not res.dates:
        raise SolverFailure("no date produced a frontier")
    rows = [r for d in res.dates for r in _point_rows(d, res.frontiers[d])]
    run.write("frontier_points.csv", POINT_HEADER, rows)
    run.write("frontier_fit.csv", FIT_HEADER, [_fit_row(d, res.fits[d]) for d in res.dates])
    fs = res.factors
    if fs is not None:
        run.write("factor_series.csv", ["date", "a", "b", "a_star", "b_star", "p"],
                  [[d, fs.a[i], fs.b[i], fs.a_star[i], fs.b_star[i], fs.p] for i, d in enumerate(fs.labels)])
        header = ["row", "col", "kappa", "kappa_stderr", "phi", "resid_cov", "diffusion", "long_run_mean_row",
                  "status"]
        rows = []
        if fs.ou is not None:
            ou = fs.ou
            names = ("ln_a", "ln_b")
            for i, ni in enumerate(names):
                for j, nj in enumerate(names):
                    rows.append([ni, nj, ou.kappa[i, j], ou.kappa_stderr[i, j], ou.phi[i, j],
                                 ou.resid_cov[i, j], ou.diffusion[i, j], ou.mean[i], "ok"])
        else:
            reason = res.errors.get("ou", "fewer than ten dates")
            rows.append(["", "", *[float("nan")] * 6, reason])
        run.write("ou_fit.csv", header, rows)
        print(f"dates={len(res.dates)} p={fs.p:.4f} skipped={len(res.errors)}")
    else:
        print(f"dates={len(res.dates)} (too few for a factor series)")


def cmd_gen_data(run, args):
    c = run.cfg
    start = args.start or c.backtest_start or "2006-01-01"
    end = args.end or c.backtest_end or "2016-10-01"
    dates = quarterly_dates(start, end, c.step_months)
    series = generate_synthetic_history(c.history, run.universe, dates, c.seed, c.riskfree_curve())
    write_market_series(run.out / "history.csv", series, run.meta)
    print(f"wrote {len(series)} dates to {run.out / 'history.csv'}")


HANDLERS = {"price": cmd_price, "risk": cmd_risk, "er": cmd_er, "optimize": cmd_optimize,
            "frontier": cmd_frontier, "backtest": cmd_backtest, "gen-data": cmd_gen_data}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        run = _Run(args)
        HANDLERS[args.command](run, args)
    except (SolverFailure, DegenerateDataError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, UnknownRatingError, DomainError, ValueError, KeyError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
