"""Portfolio linear programs, the constraint library and cutting planes for convex limits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import lp as lpmod
from .credit import linear_score, warf_score
from .lp import LinearProgram, LpSolution, solve
from .sleeve import SECTOR_TAGS

DEFAULT_SECTOR_CAPS = {"HY": 0.60, "EM": 0.15, "structured": 0.10, "financial": 0.20}
CASH_RATING = "AAA"


@dataclass
class ConstraintConfig:
    sector_caps: dict = field(default_factory=lambda: dict(DEFAULT_SECTOR_CAPS))
    average_rating: Optional[str] = "BB"
    warf_cap: Optional[float] = None
    budget: float = 1.0
    # (label, {sleeve name: coefficient}, rhs); e.g. a regulatory-capital row
    extra_rows: list = field(default_factory=list)

    def __post_init__(self):
        for tag, cap in self.sector_caps.items():
            if tag not in SECTOR_TAGS:
                raise ValueError(f"unknown sector tag {tag!r}")
            if not 0.0 <= cap <= 1.0:
                raise ValueError(f"sector cap for {tag} outside [0, 1]")


@dataclass
class ConstraintSet:
    """Linear rows ``A u <= b`` plus per-sleeve upper bounds."""

    names: list
    A: np.ndarray
    b: np.ndarray
    labels: list
    upper: np.ndarray

    def violated_at_cash(self) -> list:
        return [lab for lab, rhs in zip(self.labels, self.b) if rhs < 0]

    def with_rows(self, A_new, b_new, labels) -> "ConstraintSet":
        A_new = np.atleast_2d(np.asarray(A_new, dtype=float)).reshape(-1, len(self.names))
        return ConstraintSet(self.names, np.vstack([self.A, A_new]),
                             np.concatenate([self.b, np.atleast_1d(b_new)]),
                             self.labels + list(labels), self.upper.copy())

    def without(self, label: str) -> "ConstraintSet":
        keep = [i for i, lab in enumerate(self.labels) if lab != label]
        return ConstraintSet(self.names, self.A[keep], self.b[keep],
                             [self.labels[i] for i in keep], self.upper.copy())


def build_constraints(sleeves, cfg: ConstraintConfig = None) -> ConstraintSet:
    """Allocation, sector, rating and budget rows for ``sleeves``.

    Rating averages include the uninvested remainder as cash rated AAA, so the
    average-rating row reads ``sum u_j (score_j - score_cash) <= cap - score_cash``;
    the WARF row is built the same way.
    """
    cfg = cfg or ConstraintConfig()
    names = [s.name for s in sleeves]
    n = len(sleeves)
    rows, rhs, labels = [], [], []
    if cfg.budget is not None:
        rows.append(np.ones(n)); rhs.append(cfg.budget); labels.append("budget")
    for tag, cap in cfg.sector_caps.items():
        mask = np.array([tag in s.sectors for s in sleeves], dtype=float)
        if mask.any():
            rows.append(mask); rhs.append(cap); labels.append(f"sector:{tag}")
    if cfg.average_rating is not None:
        cash = linear_score(CASH_RATING)
        rows.append(np.array([linear_score(s.rating) - cash for s in sleeves], dtype=float))
        rhs.append(linear_score(cfg.average_rating) - cash)
        labels.append("average_rating")
    if cfg.warf_cap is not None:
        cash = warf_score(CASH_RATING)
        rows.append(np.array([warf_score(s.rating) - cash for s in sleeves]))
        rhs.append(cfg.warf_cap - cash)
        labels.append("warf")
    for label, coefs, bound in cfg.extra_rows:
        unknown = set(coefs) - set(names)
        if unknown:
            raise ValueError(f"row {label!r} references unknown sleeves {sorted(unknown)}")
        rows.append(np.array([coefs.get(nm, 0.0) for nm in names], dtype=float))
        rhs.append(float(bound)); labels.append(label)
    A = np.array(rows, dtype=float).reshape(len(rows), n)
    return ConstraintSet(names, A, np.array(rhs, dtype=float), labels,
                         np.array([s.limit for s in sleeves], dtype=float))


def _scenario_rows(dX, floors, dY=None, labels=None):
    dX = np.atleast_2d(np.asarray(dX, dtype=float))
    floors = np.asarray(floors, dtype=float)
    dY = np.zeros(len(floors)) if dY is None else np.asarray(dY, dtype=float)
    labels = labels or [f"scenario:{i}" for i in range(len(floors))]
    # sum_j u_j dX_ij - dY_i >= -eps_i   <=>   -dX_i . u <= eps_i - dY_i
    return -dX, floors - dY, list(labels)


def _base_program(er, cons: ConstraintSet, extra=None) -> LinearProgram:
    A, b, labels = cons.A, cons.b, list(cons.labels)
    if extra is not None:
        A = np.vstack([A, extra[0]]); b = np.concatenate([b, extra[1]]); labels += extra[2]
    n = len(cons.names)
    return LinearProgram(np.asarray(er, dtype=float), A.reshape(-1, n), b,
                         np.zeros(n), cons.upper.copy(), labels, list(cons.names))


def _finish(sol: LpSolution, prog: LinearProgram) -> LpSolution:
    if sol.status == lpmod.INFEASIBLE:
        sol.diagnostics = [lab for lab, rhs in zip(prog.row_labels, prog.b) if rhs < 0]
    return sol


def maximize_er(er, cons: ConstraintSet, dX=None, floors=None, scenario_labels=None,
                transaction_costs=None, previous=None) -> LpSolution:
    """Maximise ``er . u`` subject to scenario loss floors and ``cons``.

    ``dX[i, j]`` is the return of sleeve ``j`` in scenario ``i``; each scenario
    requires ``sum_j u_j dX_ij >= -floors[i]``. Optional ``transaction_costs``
    charge ``tc_j |u_j - previous_j|`` through split buy/sell variables.
    On infeasibility ``diagnostics`` lists the rows already violated by cash.
    """
    extra = None
    if dX is not None:
        extra = _scenario_rows(dX, floors, labels=scenario_labels)
    prog = _base_program(er, cons, extra)
    if transaction_costs is None:
        return _finish(solve(prog), prog)
    n = len(cons.names)
    tc = np.asarray(transaction_costs, dtype=float)
    prev = np.zeros(n) if previous is None else np.asarray(previous, dtype=float)
    # variables [u, buy, sell]; u - buy + sell = prev as two inequalities
    A = np.hstack([prog.A, np.zeros((prog.A.shape[0], 2 * n))])
    eye = np.eye(n)
    link = np.hstack([eye, -eye, eye])
    A = np.vstack([A, link, -link])
    b = np.concatenate([prog.b, prev, -prev])
    labels = prog.row_labels + [f"trade:{nm}" for nm in cons.names] + [f"trade-:{nm}" for nm in cons.names]
    c = np.concatenate([prog.c, -tc, -tc])
    hi = np.concatenate([prog.hi, np.full(2 * n, np.inf)])
    full = LinearProgram(c, A, b, np.zeros(3 * n), hi, labels,
                         list(cons.names) + [f"buy:{x}" for x in cons.names] + [f"sell:{x}" for x in cons.names])
    sol = _finish(solve(full), full)
    if sol.optimal:
        sol.x = sol.x[:n]
    return sol


def track_index_with_view(er, cons: ConstraintSet, dX, dY, floors, scenario_labels=None) -> LpSolution:
    """Maximise ER while keeping scenario underperformance to the index within floors."""
    extra = _scenario_rows(dX, floors, dY, scenario_labels)
    prog = _base_program(er, cons, extra)
    return _finish(solve(prog), prog)


def track_index_minimax(dX, dY, floors, upper) -> LpSolution:
    """Minimise the worst scenario tracking shortfall ``u0``.

    Variables are ``[u0, u_1..u_n]`` with ``u0`` free. ``objective`` is the
    minimised ``u0``; a positive value means the tolerances cannot all be met,
    flagged in ``diagnostics``.
    """
    dX = np.atleast_2d(np.asarray(dX, dtype=float))
    k, n = dX.shape
    dY = np.asarray(dY, dtype=float)
    eps = np.asarray(floors, dtype=float)
    # u0 + dX_i . u - dY_i + eps_i >= 0   <=>   -u0 - dX_i . u <= eps_i - dY_i
    A = np.hstack([-np.ones((k, 1)), -dX])
    c = np.zeros(n + 1); c[0] = -1.0
    lo = np.concatenate([[-np.inf], np.zeros(n)])
    hi = np.concatenate([[np.inf], np.asarray(upper, dtype=float)])
    prog = LinearProgram(c, A, eps - dY, lo, hi, [f"scenario:{i}" for i in range(k)],
                         ["u0"] + [f"u{j + 1}" for j in range(n)])
    sol = solve(prog)
    if sol.optimal:
        sol.objective = float(sol.x[0])
        if sol.objective > lpmod.FEAS_TOL:
            sol.diagnostics.append("tracking-infeasible-at-tolerance")
    return sol


@dataclass
class ConvexLimit:
    """``fn(u) <= limit`` for a convex ``fn`` with gradient ``grad``."""

    fn: Callable
    grad: Callable
    limit: float
    label: str = "convex"


@dataclass
class CuttingPlaneState:
    x: Optional[np.ndarray] = None
    cuts: list = field(default_factory=list)
    risk: dict = field(default_factory=dict)
    iterations: int = 0
    eps_cut: float = 1e-6
    objectives: list = field(default_factory=list)
    converged: bool = False
    gap: float = 0.0


def cutting_plane_solve(prog: LinearProgram, limits: Sequence[ConvexLimit] = (), eps_cut: float = 1e-6,
                        max_iter: int = 50, seed_cuts=None) -> tuple[LpSolution, CuttingPlaneState]:
    """Solve ``prog`` with convex limits enforced by accumulated tangent cuts.

    Each pass solves the LP; every violated limit ``R(u*) > R`` adds the row
    ``u . g <= (R - eps_cut) - R(u*) + u* . g`` with ``g = grad R(u*)``. Cuts
    are never removed. Stops once every limit holds or after ``max_iter``
    passes; ``state.gap`` is the worst remaining excess.

    ``seed_cuts`` is an optional list of ``(label, row, rhs)`` valid
    inequalities added before the first pass.
    """
    state = CuttingPlaneState(eps_cut=eps_cut)
    current = prog
    if seed_cuts:
        rows = [r for _, r, _ in seed_cuts]
        current = current.add_rows(rows, [v for _, _, v in seed_cuts], [lab for lab, _, _ in seed_cuts])
        state.cuts.extend(seed_cuts)
    sol = None
    for it in range(max_iter + 1):
        sol = solve(current)
        state.iterations = it + 1
        if not sol.optimal:
            return sol, state
        x = sol.x
        state.x = x
        state.objectives.append(sol.objective)
        new_rows, new_rhs, new_labels = [], [], []
        worst = 0.0
        for lim in limits:
            val = float(lim.fn(x))
            state.risk[lim.label] = val
            if val > lim.limit:
                worst = max(worst, val - lim.limit)
                g = np.asarray(lim.grad(x), dtype=float)
                new_rows.append(g)
                new_rhs.append(lim.limit - eps_cut - val + float(x @ g))
                new_labels.append(f"cut:{lim.label}:{len(state.cuts) + len(new_rows)}")
        state.gap = worst
        if not new_rows:
            state.converged = True
            return sol, state
        if it == max_iter:
            break
        state.cuts.extend(zip(new_labels, new_rows, new_rhs))
        current = current.add_rows(new_rows, new_rhs, new_labels)
    sol.diagnostics.append(f"cutting plane not converged after {max_iter} iterations, gap {state.gap:.3g}")
    return sol, state
