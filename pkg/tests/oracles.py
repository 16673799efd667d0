"""Independent reference implementations used as test oracles.

Nothing here imports the package's solvers or closed forms; each oracle
takes the slow, obvious route.
"""

import itertools
import math

import numpy as np


def price_by_cashflows(T, c, m, y):
    """Sum each discounted coupon and the redemption one by one."""
    n = max(1, int(math.floor(T * m + 0.5 + 1e-9)))
    total = 0.0
    for k in range(1, n + 1):
        cf = c / m + (1.0 if k == n else 0.0)
        total += cf / (1.0 + y / m) ** k
    return total


def central_difference(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h), (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)


def lp_vertex_enumeration(c, A, b, lo, hi, tol=1e-9):
    """Best objective over all basic feasible points of ``max c.x, Ax <= b, lo <= x <= hi``.

    Bounds must be finite. Returns ``(value, x)`` or ``(None, None)`` when no
    vertex is feasible.
    """
    c = np.asarray(c, float)
    n = c.size
    G = np.vstack([A, np.eye(n), -np.eye(n)])
    h = np.concatenate([b, hi, -np.asarray(lo, float)])
    combos = np.array(list(itertools.combinations(range(G.shape[0]), n)))
    M = G[combos]
    rhs = h[combos]
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-12
    X = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
    feas = np.all(X @ G.T <= h + tol * (1 + np.abs(h)), axis=1)
    if not feas.any():
        return None, None
    vals = X[feas] @ c
    k = int(np.argmax(vals))
    return float(vals[k]), X[feas][k]


def transition_power_bruteforce(P, steps):
    """Multi-step migration probabilities by enumerating every rating path."""
    P = np.asarray(P, float)
    k = P.shape[0]
    out = np.zeros_like(P)
    for i in range(k):
        for path in itertools.product(range(k), repeat=steps):
            prob, cur = 1.0, i
            for s in path:
                prob *= P[cur, s]
                cur = s
            out[i, path[-1]] += prob
    return out


def covariance_oracle(d_ir, w, sigma_y, sigma_c, rho, horizon):
    """Covariance of sleeve returns assembled entry by entry."""
    n = len(d_ir)
    C = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            corr = 1.0 if i == j else rho
            C[i, j] = horizon * (sigma_y**2 * d_ir[i] * d_ir[j] + sigma_c**2 * corr * w[i] * w[j])
    return C


def normal_quantile(p):
    """Bisection on the error-function CDF."""
    lo, hi = -10.0, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 0.5 * (1 + math.erf(mid / math.sqrt(2))) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
