"""Dense bounded-variable primal simplex for small linear programs.

Solves::

    maximise   c . x
    subject to A x <= b,   lo <= x <= hi

Bounds may be infinite on either side. Phase one minimises the sum of
artificial variables on rows whose right-hand side is negative at the origin.
Pricing is Dantzig's largest reduced cost; after ``stall_limit`` consecutive
degenerate steps the solver switches to Bland's smallest-index rule, which
cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11


@dataclass
class LinearProgram:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    row_labels: Optional[Sequence[str]] = None
    col_labels: Optional[Sequence[str]] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        m = self.A.shape[0]
        self.lo = np.zeros(n) if self.lo is None else np.asarray(self.lo, dtype=float).ravel()
        self.hi = np.full(n, np.inf) if self.hi is None else np.asarray(self.hi, dtype=float).ravel()
        if self.b.size != m or self.lo.size != n or self.hi.size != n:
            raise ValueError("dimension mismatch in linear program")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b))):
            raise ValueError("coefficients must be finite")
        if np.any(self.lo > self.hi) or np.any(self.lo == np.inf) or np.any(self.hi == -np.inf):
            raise ValueError("inconsistent variable bounds")
        self.row_labels = list(self.row_labels) if self.row_labels is not None else [f"r{i}" for i in range(m)]
        self.col_labels = list(self.col_labels) if self.col_labels is not None else [f"x{j}" for j in range(n)]
        if len(self.row_labels) != m or len(self.col_labels) != n:
            raise ValueError("label count mismatch")

    @property
    def shape(self):
        return self.A.shape

    def add_rows(self, A_new, b_new, labels=None) -> "LinearProgram":
        A_new = np.atleast_2d(np.asarray(A_new, dtype=float))
        b_new = np.atleast_1d(np.asarray(b_new, dtype=float))
        labels = list(labels) if labels is not None else [f"r{len(self.b) + i}" for i in range(len(b_new))]
        return LinearProgram(
            self.c, np.vstack([self.A, A_new]), np.concatenate([self.b, b_new]),
            self.lo.copy(), self.hi.copy(), self.row_labels + labels, self.col_labels,
        )

    def row_activity(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float)


@dataclass
class LpSolution:
    status: str
    x: Optional[np.ndarray]
    objective: float
    binding: list = field(default_factory=list)
    iterations: int = 0
    duals: Optional[np.ndarray] = None
    bland_used: bool = False
    diagnostics: list = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Working state: dense ``B^-1 [A | S | R]`` with bounded nonbasic columns."""

    def __init__(self, T, xB, basis, ub, at_upper):
        self.T = T
        self.xB = xB
        self.basis = basis
        self.ub = ub
        self.at_upper = at_upper

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j


def _run(tab: _Tableau, cost, allowed, max_iter, stall_limit, it0):
    """Primal bounded simplex iterations; returns (status, iterations, bland_used)."""
    T, ub = tab.T, tab.ub
    n_cols = T.shape[1]
    basic = np.zeros(n_cols, dtype=bool)
    it = it0
    stall = 0
    bland = False
    while True:
        basic[:] = False
        basic[tab.basis] = True
        d = cost - cost[tab.basis] @ T
        inc = (~tab.at_upper) & (d > OPT_TOL)
        dec = tab.at_upper & (d < -OPT_TOL)
        elig = (inc | dec) & allowed & ~basic & (ub > 0)
        cand = np.flatnonzero(elig)
        if cand.size == 0:
            return OPTIMAL, it, bland
        if it >= max_iter:
            return ITERATION_LIMIT, it, bland
        it += 1
        if bland:
            j = int(cand[0])
        else:
            j = int(cand[np.argmax(np.abs(d[cand]))])
        delta = -1.0 if tab.at_upper[j] else 1.0
        alpha = delta * T[:, j]
        ratios = np.full(alpha.size, np.inf)
        pos = alpha > PIVOT_TOL
        ratios[pos] = np.maximum(tab.xB[pos], 0.0) / alpha[pos]
        ub_b = ub[tab.basis]
        neg = (alpha < -PIVOT_TOL) & np.isfinite(ub_b)
        ratios[neg] = np.maximum(ub_b[neg] - tab.xB[neg], 0.0) / -alpha[neg]
        t_row = ratios.min() if ratios.size else np.inf
        t_flip = ub[j]
        if not np.isfinite(t_row) and not np.isfinite(t_flip):
            return UNBOUNDED, it, bland
        if t_flip <= t_row:
            t = t_flip
            tab.xB -= t * alpha
            tab.at_upper[j] = not tab.at_upper[j]
        else:
            t = t_row
            ties = np.flatnonzero(ratios <= t_row + 1e-12)
            r = int(ties[np.argmin(np.asarray(tab.basis)[ties])])
            leaving = tab.basis[r]
            hits_upper = alpha[r] < 0
            tab.xB -= t * alpha
            tab.xB[r] = (ub[j] - t) if tab.at_upper[j] else t
            tab.at_upper[leaving] = hits_upper
            tab.at_upper[j] = False
            tab.pivot(r, j)
        if t <= FEAS_TOL:
            stall += 1
            if stall >= stall_limit:
                bland = True
        else:
            stall = 0


def solve(lp: LinearProgram, max_iter: int = 10_000, stall_limit: int = 50) -> LpSolution:
    """Solve ``lp`` (maximisation). Never raises on well-formed input."""
    m, n = lp.A.shape

    # x = offset + S z, with 0 <= z <= zub
    cols, signs, zub = [], [], []
    offset = np.zeros(n)
    for k in range(n):
        lo, hi = lp.lo[k], lp.hi[k]
        if np.isfinite(lo):
            offset[k] = lo
            cols.append(k); signs.append(1.0); zub.append(hi - lo)
        elif np.isfinite(hi):
            offset[k] = hi
            cols.append(k); signs.append(-1.0); zub.append(np.inf)
        else:
            cols.append(k); signs.append(1.0); zub.append(np.inf)
            cols.append(k); signs.append(-1.0); zub.append(np.inf)
    nz = len(cols)
    S = np.zeros((n, nz))
    S[cols, np.arange(nz)] = signs
    Az = lp.A @ S
    bz = lp.b - lp.A @ offset
    cz = S.T @ lp.c

    flip = bz < 0
    sign = np.where(flip, -1.0, 1.0)
    n_art = int(flip.sum())
    art_rows = np.flatnonzero(flip)
    N = nz + m + n_art
    M = np.zeros((m, N))
    M[:, :nz] = Az * sign[:, None]
    M[:, nz:nz + m] = np.diag(sign)
    M[art_rows, nz + m + np.arange(n_art)] = 1.0
    rhs = np.abs(bz)
    ub = np.concatenate([np.asarray(zub, dtype=float), np.full(m, np.inf), np.full(n_art, np.inf)])

    basis = [nz + i for i in range(m)]
    for a, i in enumerate(art_rows):
        basis[i] = nz + m + a
    # initial basis is a signed identity: slack rows have +1, artificial rows +1
    T = M.copy()
    tab = _Tableau(T, rhs.copy(), basis, ub, np.zeros(N, dtype=bool))

    allowed = np.ones(N, dtype=bool)
    its = 0
    bland_used = False
    if n_art:
        cost1 = np.zeros(N)
        cost1[nz + m:] = -1.0
        status, its, bl = _run(tab, cost1, allowed, max_iter, stall_limit, its)
        bland_used |= bl
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, None, np.nan, iterations=its, bland_used=bland_used)
        infeas = float(np.sum(tab.xB[[i for i, v in enumerate(tab.basis) if v >= nz + m]]))
        if infeas > FEAS_TOL * max(1.0, float(np.max(rhs))):
            return LpSolution(INFEASIBLE, None, np.nan, iterations=its, bland_used=bland_used)
        for r, v in enumerate(list(tab.basis)):
            if v < nz + m:
                continue
            row = np.abs(tab.T[r, :nz + m])
            row[[b for b in tab.basis if b < nz + m]] = 0.0
            cand = np.flatnonzero(row > 1e-9)
            if cand.size:
                j = int(cand[0])
                tab.xB[r] = ub[j] if tab.at_upper[j] else 0.0
                tab.at_upper[j] = False
                tab.at_upper[v] = False
                tab.pivot(r, j)
        ub[nz + m:] = 0.0
        allowed[nz + m:] = False

    cost2 = np.zeros(N)
    cost2[:nz] = cz
    status, its, bl = _run(tab, cost2, allowed, max_iter, stall_limit, its)
    bland_used |= bl
    if status != OPTIMAL:
        return LpSolution(status, None, np.inf if status == UNBOUNDED else np.nan,
                          iterations=its, bland_used=bland_used)

    # recompute basic values from the original data to shed pivot drift
    z_all = np.where(tab.at_upper, ub, 0.0)
    z_all[np.isinf(z_all)] = 0.0
    z_all[tab.basis] = 0.0
    B = M[:, tab.basis]
    try:
        xB = np.linalg.solve(B, rhs - M @ z_all)
    except np.linalg.LinAlgError:
        xB = tab.xB
    z_all[tab.basis] = xB
    z = np.clip(z_all[:nz], 0.0, np.asarray(zub))
    x = offset + S @ z
    x = np.clip(x, lp.lo, lp.hi)

    d = cost2 - cost2[tab.basis] @ tab.T
    duals = -d[nz:nz + m]
    act = lp.A @ x
    scale = 1.0 + np.abs(lp.b)
    binding = [lp.row_labels[i] for i in range(m) if abs(act[i] - lp.b[i]) <= 1e-9 * scale[i]]
    return LpSolution(OPTIMAL, x, float(lp.c @ x), binding, its, duals, bland_used)
