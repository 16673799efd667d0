"""File formats, run configuration and synthetic market history.

Every file is comma-separated UTF-8 text. Lines starting with ``#`` are
comments; written outputs start with one such metadata line carrying the
config hash and seed. Floats are written with ``repr`` so a write/read round
trip is exact.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .credit import Curve, RatingCurveSet, TransitionMatrix, UnknownRatingError, check_rating
from .market import CreditModel, MarketSnapshot
from .optimizer import ConstraintConfig
from .risk import RiskConfig
from .scenarios import BUSINESS_DAYS, CurveTwist, ScenarioSpec
from .sleeve import Sleeve, sleeve_durations

UNIVERSE_COLUMNS = ("name", "ticker", "maturity", "coupon", "frequency", "rating", "yield", "spread",
                    "d_ir", "d_cr", "floating", "sectors", "limit", "stress_spread")


class ValidationError(ValueError):
    """Bad input file or configuration; message names the offending row or key."""


def data_path(name: str) -> Path:
    return Path(str(resources.files("fiopt") / "data" / name))


def _rows(path):
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"{path}: file not found")
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    return reader.fieldnames or [], list(reader)


def metadata_line(config_hash: str = "", seed=None) -> str:
    return f"# fiopt config_hash={config_hash or 'none'} seed={'none' if seed is None else seed}"


def write_table(path, header: Sequence[str], rows, meta: Optional[str] = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if meta:
            fh.write(meta + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def read_table(path):
    """Header and rows of a delimited file, skipping comment lines."""
    header, rows = _rows(path)
    return header, rows


# --- universe ---------------------------------------------------------------

def _parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "y", "float", "floating"):
        return True
    if t in ("", "0", "false", "no", "n", "fixed"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_sleeve(row: dict) -> Sleeve:
    T = float(row["maturity"])
    c = float(row["coupon"])
    m = int(row["frequency"])
    y = float(row["yield"])
    s = float(row["spread"])
    floating = _parse_bool(row.get("floating", ""))
    d_ir_txt, d_cr_txt = (row.get("d_ir") or "").strip(), (row.get("d_cr") or "").strip()
    if not d_ir_txt or not d_cr_txt:
        d_ir, d_cr = sleeve_durations(T, c, m, y, floating)
        d_ir = float(d_ir_txt) if d_ir_txt else d_ir
        d_cr = float(d_cr_txt) if d_cr_txt else d_cr
    else:
        d_ir, d_cr = float(d_ir_txt), float(d_cr_txt)
    sectors = frozenset(t.strip() for t in (row.get("sectors") or "").split(";") if t.strip())
    z = float(row.get("stress_spread") or 0.0)
    rating = check_rating(row["rating"].strip())
    if T <= 0 or m < 1:
        raise ValueError("maturity must be positive and frequency >= 1")
    if s > 0 and z <= 0:
        raise ValueError("credit sleeve needs a positive stress spread")
    return Sleeve(
        name=row["name"].strip(), maturity=T, coupon=c, frequency=m, yield_=y, spread=s,
        rating=rating, d_ir=d_ir, d_cr=d_cr, floating=floating, sectors=sectors,
        limit=float(row.get("limit") or 1.0), stress_spread=z, ticker=(row.get("ticker") or "").strip(),
    )


def load_universe(path) -> list:
    """Sleeves from a universe file; any bad row aborts with its row number."""
    header, rows = _rows(path)
    if not rows:
        raise ValidationError(f"{path}: empty universe")
    missing = {"name", "maturity", "coupon", "frequency", "rating", "yield", "spread"} - set(header)
    if missing:
        raise ValidationError(f"{path}: missing columns {sorted(missing)}")
    sleeves, errors, seen = [], [], set()
    for i, row in enumerate(rows, start=1):
        name = (row.get("name") or "").strip()
        try:
            if name in seen:
                raise ValueError(f"duplicate name {name!r}")
            seen.add(name)
            sleeves.append(parse_sleeve(row))
        except UnknownRatingError as exc:
            errors.append(f"row {i} ({name}): unknown rating {exc}")
        except (ValueError, KeyError, TypeError) as exc:
            errors.append(f"row {i} ({name}): {exc}")
    if errors:
        raise ValidationError(f"{path}: " + "; ".join(errors))
    return sleeves


def write_universe(path, sleeves, meta: Optional[str] = None):
    rows = [[s.name, s.ticker, s.maturity, s.coupon, s.frequency, s.rating, s.yield_, s.spread,
             s.d_ir, s.d_cr, "true" if s.floating else "false", ";".join(sorted(s.sectors)),
             s.limit, s.stress_spread] for s in sleeves]
    write_table(path, UNIVERSE_COLUMNS, rows, meta)


# --- credit data ------------------------------------------------------------

def load_transition_matrix(path, renormalize_tol: float = 1e-6) -> TransitionMatrix:
    """Matrix with a ``from`` column and one column per destination state.

    Rows off by at most ``renormalize_tol`` from summing to one are rescaled
    (published tables are rounded); larger errors are rejected.
    """
    header, rows = _rows(path)
    states = header[1:]
    if [r[header[0]].strip() for r in rows] != states:
        raise ValidationError(f"{path}: row states must match column states in order")
    P = np.array([[float(r[s]) for s in states] for r in rows])
    sums = P.sum(axis=1)
    if np.any(np.abs(sums - 1) > renormalize_tol):
        bad = [states[i] for i in np.flatnonzero(np.abs(sums - 1) > renormalize_tol)]
        raise ValidationError(f"{path}: rows {bad} do not sum to one")
    P = P / sums[:, None]
    try:
        return TransitionMatrix(tuple(states), P)
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def write_transition_matrix(path, M: TransitionMatrix, meta=None):
    write_table(path, ["from", *M.states], [[s, *map(float, M.matrix[i])] for i, s in enumerate(M.states)], meta)


def load_rating_curves(path, recovery_rate: float = 0.30) -> RatingCurveSet:
    header, rows = _rows(path)
    if not header or header[0] != "tenor" or "riskfree" not in header:
        raise ValidationError(f"{path}: need 'tenor' and 'riskfree' columns")
    tenors = [float(r["tenor"]) for r in rows]
    rf = Curve(tenors, [float(r["riskfree"]) for r in rows])
    spreads = {lab: Curve(tenors, [float(r[lab]) for r in rows]) for lab in header if lab not in ("tenor", "riskfree")}
    try:
        return RatingCurveSet(rf, spreads, recovery_rate)
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def write_rating_curves(path, curves: RatingCurveSet, meta=None):
    tenors = curves.riskfree.tenors
    labels = list(curves.spreads)
    rows = [[t, curves.riskfree(t), *[curves.spreads[k](t) for k in labels]] for t in tenors]
    write_table(path, ["tenor", "riskfree", *labels], rows, meta)


# --- market series ----------------------------------------------------------

def load_market_series(path) -> list:
    """Snapshots from a wide file: ``date``, ``rf:<tenor>``..., ``<sleeve>:yield``, ``<sleeve>:spread``."""
    header, rows = _rows(path)
    if not header or header[0] != "date":
        raise ValidationError(f"{path}: first column must be 'date'")
    rf_cols = [h for h in header if h.startswith("rf:")]
    if not rf_cols:
        raise ValidationError(f"{path}: no riskfree columns")
    tenors = [float(h[3:]) for h in rf_cols]
    names = [h[:-6] for h in header if h.endswith(":yield")]
    out, prev = [], None
    for i, r in enumerate(rows, start=1):
        date = r["date"].strip()
        if prev is not None and date <= prev:
            raise ValidationError(f"{path}: row {i}: dates must be strictly increasing")
        prev = date
        spreads = {n: float(r[f"{n}:spread"]) for n in names}
        neg = [n for n, v in spreads.items() if v < 0]
        if neg:
            raise ValidationError(f"{path}: row {i}: negative spread for {neg}")
        out.append(MarketSnapshot(date, Curve(tenors, [float(r[h]) for h in rf_cols]),
                                  {n: float(r[f"{n}:yield"]) for n in names}, spreads))
    return out


def write_market_series(path, series, meta=None):
    if not series:
        raise ValidationError("empty market series")
    tenors = series[0].riskfree.tenors
    names = list(series[0].yields)
    header = ["date", *[f"rf:{t:g}" for t in tenors]]
    for n in names:
        header += [f"{n}:yield", f"{n}:spread"]
    rows = []
    for s in series:
        row = [s.date, *[float(v) for v in s.riskfree.values]]
        for n in names:
            row += [float(s.yields[n]), float(s.spreads[n])]
        rows.append(row)
    write_table(path, header, rows, meta)


# --- configuration ----------------------------------------------------------

@dataclass
class HistoryParams:
    sigma_y: float = 0.009
    kappa: float = 0.0
    sigma_hat: float = 0.40
    rho: float = 0.8
    kappa_spread: float = 0.3


@dataclass
class RunConfig:
    risk: RiskConfig = field(default_factory=RiskConfig)
    constraints: ConstraintConfig = field(default_factory=ConstraintConfig)
    scenarios: list = field(default_factory=list)
    grid: tuple = (0.005, 0.40, 20)
    riskfree: Optional[Curve] = None
    transition_matrix: Optional[str] = None
    rating_curves: Optional[str] = None
    recovery_rate: float = 0.30
    horizon: float = 1.0
    backtest_start: Optional[str] = None
    backtest_end: Optional[str] = None
    step_months: int = 3
    history: HistoryParams = field(default_factory=HistoryParams)
    seed: int = 0
    source_hash: str = ""

    def grid_points(self) -> np.ndarray:
        lo, hi, n = self.grid
        return np.geomspace(lo, hi, int(n))

    def credit_model(self) -> CreditModel:
        M = load_transition_matrix(self.transition_matrix or data_path("transitions.csv"))
        curves = load_rating_curves(self.rating_curves or data_path("rating_curves.csv"), self.recovery_rate)
        return CreditModel(M, curves)

    def riskfree_curve(self) -> Curve:
        if self.riskfree is not None:
            return self.riskfree
        return self.credit_model().curves.riskfree


def parse_grid(text: str) -> tuple:
    """``"lo:hi:n"`` -> (lo, hi, n) for a log-spaced grid."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ValidationError(f"grid must look like lo:hi:n, got {text!r}") from None
    if not (0 < lo < hi) or n < 2:
        raise ValidationError("grid needs 0 < lo < hi and n >= 2")
    return lo, hi, n


def _scenario_from(d: dict) -> ScenarioSpec:
    bump = d.get("rate_bump", 0.0)
    if isinstance(bump, dict):
        bump = CurveTwist(float(bump["short"]), float(bump["long"]), float(bump.get("pivot", 5.0)))
    return ScenarioSpec(d["label"], bump, float(d.get("spread_multiplier", 1.0)),
                        bool(d.get("stress", False)), float(d.get("loss_floor", 0.0)))


def load_config(path=None) -> RunConfig:
    """Run configuration from JSON; ``None`` gives the shipped defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"{path}: config not found")
    text = path.read_bytes()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    base = path.parent

    def rel(p):
        if p is None:
            return None
        q = Path(p)
        q = q if q.is_absolute() else base / q
        if not q.exists():
            raise ValidationError(f"{path}: referenced file {q} not found")
        return str(q)

    try:
        r = raw.get("risk", {})
        alphas = tuple(r.get("alphas", (1.0, 1.0, 1.0, 2.0)))
        risk = RiskConfig(r.get("sigma_y", 0.009), r.get("sigma_c", 0.35), r.get("rho", 0.8),
                          r.get("horizon", 1.0), alphas)
        c = raw.get("constraints", {})
        cons = ConstraintConfig(
            sector_caps=c.get("sector_caps", ConstraintConfig().sector_caps),
            average_rating=c.get("average_rating", "BB"),
            warf_cap=c.get("warf_cap"),
            budget=c.get("budget", 1.0),
            extra_rows=[(row["label"], row["coefficients"], row["rhs"]) for row in c.get("extra_rows", [])],
        )
        if cons.average_rating is not None:
            check_rating(cons.average_rating)
        g = raw.get("grid", {})
        grid = (g.get("lo", 0.005), g.get("hi", 0.40), g.get("n", 20))
        rf = raw.get("riskfree_curve")
        rf = Curve(rf["tenors"], rf["values"]) if rf else None
        bt = raw.get("backtest", {})
        h = raw.get("history", {})
        cfg = RunConfig(
            risk=risk, constraints=cons,
            scenarios=[_scenario_from(d) for d in raw.get("scenarios", [])],
            grid=grid, riskfree=rf,
            transition_matrix=rel(raw.get("transition_matrix")),
            rating_curves=rel(raw.get("rating_curves")),
            recovery_rate=float(raw.get("recovery_rate", 0.30)),
            horizon=float(raw.get("horizon", 1.0)),
            backtest_start=bt.get("start"), backtest_end=bt.get("end"),
            step_months=int(bt.get("step_months", 3)),
            history=HistoryParams(**h),
            seed=int(raw.get("seed", 0)),
            source_hash=hashlib.sha256(text).hexdigest()[:16],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    if not 0 < cfg.grid[0] < cfg.grid[1]:
        raise ValidationError(f"{path}: grid needs 0 < lo < hi")
    return cfg


# --- synthetic history ------------------------------------------------------

def quarterly_dates(start: str, end: str, step_months: int = 3) -> list:
    d = np.datetime64(start, "M")
    stop = np.datetime64(end, "M")
    out = []
    while d <= stop:
        out.append(str(np.datetime64(d, "D")))
        d = d + np.timedelta64(step_months, "M")
    return out


def _year_fractions(dates):
    ds = np.array(dates, dtype="datetime64[D]")
    if np.any(np.diff(ds) <= np.timedelta64(0, "D")):
        raise ValidationError("dates must be strictly increasing")
    bd = np.busday_count(ds[:-1], ds[1:])
    return bd / BUSINESS_DAYS


def generate_synthetic_history(params: HistoryParams, template, dates, seed: int = 0,
                               riskfree: Optional[Curve] = None) -> list:
    """Market snapshots with Gaussian rate moves and lognormal spreads.

    The riskfree curve moves by a one-factor Gaussian shock ``X`` with
    loading ``(1 - exp(-kappa T)) / (kappa T)`` (parallel when ``kappa = 0``)
    and ``dX = -kappa X dt + sigma_y dW``. Each sleeve's log spread follows
    ``d ln s = -kappa_s (ln s - ln s0) dt + sigma_hat dZ_j`` with the ``Z_j``
    equicorrelated at ``rho``. Time steps are business days between dates.
    """
    riskfree = riskfree or load_rating_curves(data_path("rating_curves.csv")).riskfree
    dts = _year_fractions(dates)
    rng = np.random.default_rng(seed)
    tenors = np.array(riskfree.tenors)
    rf0 = np.array(riskfree.values)
    k = params.kappa

    def loading(T):
        T = np.asarray(T, dtype=float)
        if k == 0:
            return np.ones_like(T)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = -np.expm1(-k * T) / (k * T)
        return np.where(T > 0, out, 1.0)

    n = len(template)
    s0 = np.array([s.spread for s in template])
    logs = np.log(np.where(s0 > 0, s0, 1.0))
    credit = s0 > 0
    x = 0.0
    out = []
    for i, date in enumerate(dates):
        if i > 0:
            dt = float(dts[i - 1])
            z_r = rng.standard_normal()
            z_c = rng.standard_normal()
            z_i = rng.standard_normal(n)
            if dt > 0:
                if k > 0:
                    decay = math.exp(-k * dt)
                    sd = params.sigma_y * math.sqrt(-math.expm1(-2 * k * dt) / (2 * k))
                else:
                    decay, sd = 1.0, params.sigma_y * math.sqrt(dt)
                x = x * decay + sd * z_r
                dz = math.sqrt(params.rho) * z_c + math.sqrt(1 - params.rho) * z_i
                ks = params.kappa_spread
                logs = logs - ks * (logs - np.log(np.where(s0 > 0, s0, 1.0))) * dt + params.sigma_hat * math.sqrt(dt) * dz
        curve = Curve(tenors, rf0 + x * loading(tenors))
        spreads = np.where(credit, np.exp(logs), 0.0)
        ys, ss = {}, {}
        for j, sl in enumerate(template):
            base = curve(min(0.25, tenors[-1])) if sl.floating else curve(sl.maturity)
            ss[sl.name] = float(spreads[j])
            ys[sl.name] = float(base + spreads[j])
        out.append(MarketSnapshot(str(date), curve, ys, ss))
    return out


def config_to_json(cfg: RunConfig) -> str:
    """Serialise the fields that round-trip through :func:`load_config`."""
    d = {
        "risk": {"sigma_y": cfg.risk.sigma_y, "sigma_c": cfg.risk.sigma_c, "rho": cfg.risk.rho,
                 "horizon": cfg.risk.horizon, "alphas": list(cfg.risk.alphas)},
        "constraints": {"sector_caps": cfg.constraints.sector_caps,
                        "average_rating": cfg.constraints.average_rating,
                        "warf_cap": cfg.constraints.warf_cap, "budget": cfg.constraints.budget},
        "grid": {"lo": cfg.grid[0], "hi": cfg.grid[1], "n": cfg.grid[2]},
        "recovery_rate": cfg.recovery_rate,
        "horizon": cfg.horizon,
        "backtest": {"start": cfg.backtest_start, "end": cfg.backtest_end, "step_months": cfg.step_months},
        "history": asdict(cfg.history),
        "seed": cfg.seed,
    }
    return json.dumps(d, indent=2)
