"""Efficient frontier sweeps, the two-parameter frontier fit and factor dynamics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_discrete_lyapunov

from . import lp as lpmod
from .lp import LinearProgram
from .market import CreditModel, MarketSnapshot, expected_excess_returns, reprice_universe
from .optimizer import ConstraintSet, ConvexLimit, build_constraints, cutting_plane_solve
from .risk import MEASURES, RiskConfig, StdevModel, loss_vector

log = logging.getLogger(__name__)

RISK_TOL = 1e-7


class SolverFailure(RuntimeError):
    pass


class DegenerateDataError(ValueError):
    pass


class NonMeanRevertingError(ValueError):
    pass


def default_grid(lo: float = 0.005, hi: float = 0.40, n: int = 20) -> np.ndarray:
    return np.geomspace(lo, hi, n)


@dataclass(frozen=True)
class FrontierPoint:
    limit: float
    er: float
    binding: str
    weights: Optional[tuple] = None
    cuts: int = 0


class FrontierProblem:
    """Everything needed to solve one frontier point at any risk limit."""

    def __init__(self, sleeves, er, cons: ConstraintSet, cfg: RiskConfig = RiskConfig()):
        self.sleeves = list(sleeves)
        self.er = np.asarray(er, dtype=float)
        self.cons = cons
        self.cfg = cfg
        self.losses = {m: loss_vector(self.sleeves, m) for m in ("ir", "csx2", "csl")}
        self.stdev = StdevModel(self.sleeves, cfg)
        n = len(self.sleeves)
        self._base = LinearProgram(self.er, cons.A.reshape(-1, n), cons.b, np.zeros(n), cons.upper.copy(),
                                   list(cons.labels), list(cons.names))

    def program(self, limit: float) -> LinearProgram:
        rows, rhs, labels = [], [], []
        for m in ("ir", "csx2", "csl"):
            a = self.cfg.weight(m)
            if a is None:
                continue
            rows.append(self.losses[m]); rhs.append(limit / a); labels.append(f"risk:{m}")
        if not rows:
            return self._base
        return self._base.add_rows(rows, rhs, labels)

    def limits(self, limit: float) -> list:
        a = self.cfg.weight("stdev")
        if a is None:
            return []
        return [ConvexLimit(self.stdev, self.stdev.gradient, limit / a, "stdev")]

    def components(self, u) -> dict:
        out = {m: float(self.losses[m] @ u) for m in self.losses}
        out["stdev"] = self.stdev(u)
        return out

    def binding_label(self, u, limit: float) -> str:
        """Weighted measure that meets the limit, or ``none`` when risk is slack."""
        comps = self.components(u)
        best, label = -math.inf, "none"
        for m in MEASURES:
            a = self.cfg.weight(m)
            if a is not None and a * comps[m] > best:
                best, label = a * comps[m], m
        tol = max(RISK_TOL, 2e-6 * limit)
        return label if best >= limit - tol else "none"

    def solve(self, limit: float, seed_cuts=None, eps_cut: float = 1e-6, max_iter: int = 50):
        sol, state = cutting_plane_solve(self.program(limit), self.limits(limit), eps_cut, max_iter, seed_cuts)
        if not sol.optimal:
            raise SolverFailure(f"risk limit {limit}: {sol.status} {sol.diagnostics}")
        if not state.converged:
            raise SolverFailure(f"risk limit {limit}: {sol.diagnostics[-1]}")
        return sol, state


def sweep_frontier(sleeves, er, cons: ConstraintSet, cfg: RiskConfig = RiskConfig(),
                   grid: Sequence[float] = None, reuse_cuts: bool = True) -> list:
    """Maximum ER at each total-risk limit in ``grid``.

    The total risk ``max_k a_k R_k <= limit`` becomes ``R_k <= limit / a_k``:
    scenario measures are linear rows, the standard deviation is enforced by
    cutting planes. Because the standard deviation is positively homogeneous,
    its tangent cuts ``u . g <= limit`` stay valid at every limit, so with
    ``reuse_cuts`` the gradients found at one point seed the next.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("risk grid must be nonnegative and strictly increasing")
    prob = FrontierProblem(sleeves, er, cons, cfg)
    a4 = cfg.weight("stdev")
    grads = []
    points = []
    for limit in grid:
        seed = None
        if reuse_cuts and grads and a4 is not None:
            seed = [(f"seed:stdev:{i}", g, limit / a4 - 1e-6) for i, g in enumerate(grads)]
        sol, state = prob.solve(limit, seed)
        if a4 is not None:
            grads.extend(row for lab, row, _ in state.cuts if not lab.startswith("seed:"))
        points.append(FrontierPoint(float(limit), float(sol.objective), prob.binding_label(sol.x, limit),
                                    tuple(float(v) for v in sol.x), len(state.cuts)))
    return points


@dataclass(frozen=True)
class FrontierFit:
    a: float
    b: float
    rmse: float
    label: str = ""
    grad_norm: float = 0.0
    iterations: int = 0

    def __call__(self, R):
        return self.a * -np.expm1(-np.asarray(R, dtype=float) / self.b)

    @property
    def slope_at_origin(self) -> float:
        return self.a / self.b


def _frontier_model(R, a, b):
    e = np.exp(-R / b)
    f = 1.0 - e
    J = np.column_stack([f, -a * e * R / (b * b)])
    return a * f, J


def fit_frontier(points, label: str = "", max_iter: int = 200) -> FrontierFit:
    """Least-squares fit of ``r = a (1 - exp(-R / b))``.

    ``points`` holds :class:`FrontierPoint` objects or ``(R, r)`` pairs.
    The scale ``b`` is seeded on a log-spaced grid with ``a`` solved exactly
    for each candidate, then refined by damped Gauss-Newton.
    """
    pts = [(p.limit, p.er) if isinstance(p, FrontierPoint) else tuple(p) for p in points]
    R = np.array([p[0] for p in pts], dtype=float)
    r = np.array([p[1] for p in pts], dtype=float)
    if len(np.unique(R)) < 3:
        raise DegenerateDataError("need at least three distinct risk levels")
    if not np.any(r > 0):
        raise DegenerateDataError("frontier has no positive return")

    def best_a(b):
        f = -np.expm1(-R / b)
        a = float(f @ r / (f @ f))
        return a, float(np.sum((a * f - r) ** 2))

    Rpos = R[R > 0]
    cands = np.geomspace(Rpos.min() / 20, Rpos.max() * 20, 400)
    b = min(cands, key=lambda x: best_a(x)[1])
    a = best_a(b)[0]

    lam = 1e-3
    it = 0
    gnorm = np.inf
    for it in range(1, max_iter + 1):
        model, J = _frontier_model(R, a, b)
        res = model - r
        sse = res @ res
        g = J.T @ res
        gnorm = float(np.linalg.norm(2 * g))
        if gnorm < 1e-10:
            break
        H = J.T @ J
        improved = False
        for _ in range(60):
            step = np.linalg.solve(H + lam * np.diag(np.diag(H)), -g)
            a_new, b_new = a + step[0], b + step[1]
            if b_new > 0 and a_new > 0:
                m_new, _ = _frontier_model(R, a_new, b_new)
                sse_new = float(np.sum((m_new - r) ** 2))
                if sse_new <= sse:
                    a, b = a_new, b_new
                    lam = max(lam / 10, 1e-12)
                    improved = True
                    break
            lam *= 10
        if not improved or np.all(np.abs(step) <= 1e-15 * (np.abs([a, b]) + 1e-300)):
            model, J = _frontier_model(R, a, b)
            gnorm = float(np.linalg.norm(2 * J.T @ (model - r)))
            break
    model, _ = _frontier_model(R, a, b)
    rmse = float(np.sqrt(np.mean((model - r) ** 2)))
    return FrontierFit(float(a), float(b), rmse, label, gnorm, it)


@dataclass
class FactorSeries:
    labels: list
    a: np.ndarray
    b: np.ndarray
    p: float
    a_star: np.ndarray
    b_star: np.ndarray
    p_stderr: float = float("nan")
    residual_cov: float = 0.0
    ou: Optional["OUFit"] = None


def factorize_series(a, b, labels=None) -> FactorSeries:
    """Split ``(a_t, b_t)`` into ``a*_t = a_t`` and ``b*_t = b_t / a_t^p``.

    ``p`` is the OLS slope of ``ln b`` on ``ln a``, which makes
    ``ln a`` and ``ln b*`` uncorrelated in sample.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 3 or a.size != b.size:
        raise DegenerateDataError("need at least three aligned dates")
    if np.any(a <= 0) or np.any(b <= 0):
        raise DegenerateDataError("factor values must be positive")
    la, lb = np.log(a), np.log(b)
    da = la - la.mean()
    sxx = float(da @ da)
    if sxx <= 1e-14 * max(1.0, float(la @ la)):
        raise DegenerateDataError("a_t is constant; exponent undefined")
    p = float(da @ (lb - lb.mean()) / sxx)
    resid = lb - lb.mean() - p * da
    dof = a.size - 2
    p_se = float(np.sqrt(resid @ resid / dof / sxx)) if dof > 0 else float("nan")
    b_star = b / a**p
    cov = float(np.mean(da * (np.log(b_star) - np.log(b_star).mean())))
    labels = list(labels) if labels is not None else list(range(a.size))
    return FactorSeries(labels, a, b, p, a.copy(), b_star, p_se, cov)


@dataclass
class OUFit:
    """Discrete VAR(1) fit ``x' = mu + Phi x + eta`` and its OU equivalent.

    ``kappa`` is the mean-reversion matrix ``-log(Phi) / dt``, ``mean`` the
    long-run mean, ``resid_cov`` the covariance of ``eta`` and ``diffusion``
    the continuous-time noise covariance matching it.
    """

    phi: np.ndarray
    mu: np.ndarray
    kappa: np.ndarray
    mean: np.ndarray
    resid_cov: np.ndarray
    diffusion: np.ndarray
    phi_stderr: np.ndarray
    kappa_stderr: np.ndarray
    dt: float
    n_obs: int


def _logm_mean_reverting(phi):
    w, V = np.linalg.eig(phi)
    if np.any(np.abs(w) >= 1.0) or np.any((np.abs(w.imag) < 1e-12) & (w.real <= 0)):
        raise NonMeanRevertingError(f"transition eigenvalues {w} not inside (0, 1)")
    L = (V * np.log(w.astype(complex))) @ np.linalg.inv(V)
    return L.real


def fit_ou(x, dt: float) -> OUFit:
    """Fit a mean-reverting OU process to equally spaced observations ``x`` (T x d)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 10:
        raise DegenerateDataError("need at least ten observations")
    if dt <= 0:
        raise ValueError("observation spacing must be positive")
    X = np.column_stack([np.ones(x.shape[0] - 1), x[:-1]])
    Y = x[1:]
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise NonMeanRevertingError("series is degenerate (constant or collinear); no mean reversion identifiable")
    coef, *_ = np.linalg.lstsq(X, Y, rcond=None)
    mu = coef[0]
    phi = coef[1:].T
    resid = Y - X @ coef
    n, d = Y.shape
    dof = max(n - X.shape[1], 1)
    S = resid.T @ resid / dof
    kappa = -_logm_mean_reverting(phi) / dt
    mean = np.linalg.solve(np.eye(d) - phi, mu)
    stat = solve_discrete_lyapunov(phi, S)
    diffusion = kappa @ stat + stat @ kappa.T
    XtX_inv = np.linalg.inv(X.T @ X)
    # cov(vec(phi)) = S kron (X'X)^-1 restricted to slope rows
    cov_slope = np.kron(S, XtX_inv[1:, 1:])
    phi_se = np.sqrt(np.diag(cov_slope)).reshape(d, d)
    # delta method for kappa via a numerical Jacobian of phi -> kappa
    h = 1e-7
    base = kappa.ravel()
    Jac = np.empty((d * d, d * d))
    for k in range(d * d):
        dp = np.zeros(d * d); dp[k] = h
        try:
            kp = -_logm_mean_reverting(phi + dp.reshape(d, d)) / dt
        except NonMeanRevertingError:
            kp = kappa
        Jac[:, k] = (kp.ravel() - base) / h
    kappa_se = np.sqrt(np.maximum(np.diag(Jac @ cov_slope @ Jac.T), 0.0)).reshape(d, d)
    return OUFit(phi, mu, kappa, mean, S, diffusion, phi_se, kappa_se, dt, x.shape[0])


@dataclass
class BacktestResult:
    dates: list
    frontiers: dict
    fits: dict
    factors: Optional[FactorSeries]
    errors: dict = field(default_factory=dict)


def frontier_for_snapshot(template, snap: MarketSnapshot, cons_cfg, cfg: RiskConfig,
                          grid, credit: Optional[CreditModel] = None, horizon: float = 1.0):
    sleeves = reprice_universe(template, snap)
    er = expected_excess_returns(sleeves, snap.riskfree, credit, horizon)
    cons = build_constraints(sleeves, cons_cfg)
    pts = sweep_frontier(sleeves, er, cons, cfg, grid)
    return pts, fit_frontier(pts, label=snap.date)


def run_backtest(series: Sequence[MarketSnapshot], template, cons_cfg, cfg: RiskConfig = RiskConfig(),
                 grid=None, credit: Optional[CreditModel] = None, step: int = 1,
                 dt: float = 0.25) -> BacktestResult:
    """Frontier and fit on every ``step``-th snapshot, then the factor series.

    A date that fails (missing data, solver failure, degenerate fit) is
    recorded in ``errors`` and the run continues. The OU model is fitted to
    ``(ln a, ln b)`` when at least ten dates succeed.
    """
    grid = default_grid() if grid is None else grid
    result = BacktestResult([], {}, {}, None)
    for snap in list(series)[::step]:
        try:
            pts, fit = frontier_for_snapshot(template, snap, cons_cfg, cfg, grid, credit)
        except (KeyError, ValueError, SolverFailure) as exc:
            log.warning("date %s skipped: %s", snap.date, exc)
            result.errors[snap.date] = str(exc)
            continue
        result.dates.append(snap.date)
        result.frontiers[snap.date] = pts
        result.fits[snap.date] = fit
    if len(result.dates) >= 3:
        a = [result.fits[d].a for d in result.dates]
        b = [result.fits[d].b for d in result.dates]
        try:
            fs = factorize_series(a, b, result.dates)
        except DegenerateDataError as exc:
            result.errors["factorize"] = str(exc)
            fs = FactorSeries(list(result.dates), np.array(a), np.array(b), float("nan"),
                              np.array(a), np.full(len(a), float("nan")))
        if len(result.dates) >= 10:
            try:
                fs.ou = fit_ou(np.log(np.column_stack([a, b])), dt * step)
            except (DegenerateDataError, NonMeanRevertingError) as exc:
                result.errors["ou"] = str(exc)
        result.factors = fs
    return result
