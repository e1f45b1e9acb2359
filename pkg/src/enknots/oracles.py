"""Slow-but-sure elastic net solvers used as ground truth in tests.

These are deliberately independent of the exact-path code: plain cyclic
coordinate descent, the orthonormal closed form, and a grid-scan knot finder.
The path algorithms never call anything here.
"""
from __future__ import annotations

import numpy as np

from .errors import NotConverged, NotOrthonormal
from .model import Dataset, ENParams, kkt_residual

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


def soft_threshold(z: float, t: float) -> float:
    """sign(z) * max(|z| - t, 0), the scalar l1 proximal operator."""
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def en_solve_cd(d: Dataset, lam: float, alpha: float,
                tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                beta0: np.ndarray | None = None) -> np.ndarray:
    """Cyclic coordinate descent on the elastic net objective.

    Coordinate updates are exact scalar minimizations,
    ``beta_j <- S(x_j' (y - X_{-j} beta_{-j}), lam*alpha) / (||x_j||^2 + lam*(1-alpha))``,
    swept in fixed order 1..p until the largest coefficient change in a sweep
    falls below ``tol`` and the KKT residuals are below ``10 * tol``.
    """
    params = ENParams(alpha=alpha, lam=lam)
    gamma, eta = params.gamma, params.eta
    X, y = d.X, d.y
    p = d.p
    col_sq = np.einsum("ij,ij->j", X, X)
    beta = np.zeros(p) if beta0 is None else np.asarray(beta0, dtype=float).copy()
    r = y - X @ beta
    it = 0
    while it < max_iter:
        it += 1
        delta = 0.0
        for j in range(p):
            bj = beta[j]
            rho = X[:, j] @ r + col_sq[j] * bj
            bj_new = soft_threshold(rho, gamma) / (col_sq[j] + eta)
            if bj_new != bj:
                r += X[:, j] * (bj - bj_new)
                beta[j] = bj_new
                delta = max(delta, abs(bj_new - bj))
        if delta < tol:
            kkt = kkt_residual(d, beta, params)
            if max(kkt) <= 10.0 * tol:
                return beta
    kkt = kkt_residual(d, beta, params)
    if max(kkt) <= 10.0 * tol:
        return beta
    raise NotConverged(max_iter, beta=beta, kkt=kkt)


def en_solve_orthonormal(d: Dataset, lam: float, alpha: float) -> np.ndarray:
    """Exact per-coordinate solution when X'X = I."""
    G = d.X.T @ d.X
    if np.max(np.abs(G - np.eye(d.p))) > 1e-8:
        raise NotOrthonormal("X'X deviates from identity by more than 1e-8")
    params = ENParams(alpha=alpha, lam=lam)
    c = d.X.T @ d.y
    out = np.array([soft_threshold(cj, params.gamma) for cj in c])
    return out / (1.0 + params.eta)


def knots_bruteforce(d: Dataset, alpha: float, lambda_max: float, step: float,
                     lambda_min: float = 0.0, tol: float = 1e-9,
                     max_iter: int = DEFAULT_MAX_ITER) -> list[float]:
    """Approximate knot locations by scanning a descending lambda grid.

    Solves the elastic net at each grid point (warm started from the previous
    one) and reports the midpoint of every bracketing cell where the support
    changes. Each reported knot is within ``step`` of a true one.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    lams = np.arange(lambda_max, lambda_min - 0.5 * step, -step)
    knots = []
    beta = np.zeros(d.p)
    prev_supp = None
    prev_lam = None
    for lam in lams:
        beta = en_solve_cd(d, float(lam), alpha, tol=tol, max_iter=max_iter,
                           beta0=beta)
        supp = frozenset(np.nonzero(beta)[0].tolist())
        if prev_supp is not None and supp != prev_supp:
            knots.append(0.5 * (prev_lam + float(lam)))
        prev_supp, prev_lam = supp, float(lam)
    return knots
