"""Covariance test statistics for predictor entry along l1 paths.

The statistic at step k compares the covariance between the response and the
fitted values at the next knot with and without the predictor that entered at
the current knot,

    T_k = (1/sigma^2) * (<y, X b(lam_{k+1})> - <y, X_A b_A(lam_{k+1})>),

where A is the active set just before the entry and the restricted coefficient
vector solves the same problem on the columns of A only. For the elastic net
the statistic carries an extra factor ``1 + eta_{k+1}`` with
``eta_{k+1} = lam_{k+1} * (1 - alpha)``, compensating the ridge shrinkage.
Under the null that all true predictors are already active, T_k is
asymptotically Exp(1); with an estimated noise variance the reference becomes
F with (2, n - p) degrees of freedom.

Restricted fits are computed by running the exact path solver on the
column-restricted (augmented, for alpha < 1) design and evaluating its
piecewise-linear path at the required penalty, keeping the statistic exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special
import scipy.stats

from .enpath import AlphaGrid, PathGrid, augment, en_knot_grid
from .errors import (InvalidReference, KnotIndexOutOfRange, NonpositiveSigma2,
                     RankDeficient, Underdetermined)
from .lars import KnotPath, beta_at, extract_knot, lars_path
from .model import Dataset


@dataclass(frozen=True)
class ExpReference:
    """Exponential null reference with the given rate (mean 1/rate)."""

    rate: float = 1.0

    def sf(self, x: float) -> float:
        return float(np.exp(-self.rate * max(x, 0.0)))

    def ppf(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return -np.log1p(-q) / self.rate

    def label(self) -> str:
        return f"Exp({self.rate:g})"


@dataclass(frozen=True)
class FReference:
    """F(2, dfd) null reference, used when the noise variance is estimated."""

    dfd: int

    def sf(self, x: float) -> float:
        x = max(x, 0.0)
        # survival function via the regularized incomplete beta function
        return float(scipy.special.betainc(self.dfd / 2.0, 1.0,
                                           self.dfd / (self.dfd + 2.0 * x)))

    def ppf(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return scipy.stats.f.ppf(q, 2, self.dfd)

    def label(self) -> str:
        return f"F(2, {self.dfd})"


def pvalue(statistic: float, reference) -> float:
    """Upper-tail probability of the statistic under the reference."""
    if not np.isfinite(statistic):
        raise InvalidReference(f"statistic must be finite, got {statistic}")
    if isinstance(reference, (ExpReference, FReference)):
        return reference.sf(statistic)
    raise InvalidReference(f"unknown reference {reference!r}")


@dataclass(frozen=True)
class CovTestResult:
    k: int
    entering_predictor: int  # 0-based
    statistic: float
    reference: object
    p_value: float
    sigma2_used: float
    sigma2_estimated: bool = False

    def __post_init__(self):
        if not -1e-8 <= self.p_value <= 1.0 + 1e-12:
            raise ValueError(f"p-value out of range: {self.p_value}")


def sigma2_hat(d: Dataset) -> float:
    """Unbiased full-model residual variance ||y - X b_ls||^2 / (n - p)."""
    if d.n <= d.p:
        raise Underdetermined(f"need n > p, got n={d.n}, p={d.p}")
    beta, _, rank, _ = np.linalg.lstsq(d.X, d.y, rcond=None)
    if rank < d.p:
        raise RankDeficient(f"design has rank {rank} < p={d.p}")
    r = d.y - d.X @ beta
    return float(r @ r) / (d.n - d.p)


def _support(beta) -> list:
    return np.nonzero(beta)[0].tolist()


def _entering_at(path: KnotPath, k: int) -> int:
    """Predictor entering at entry-knot k: the new member of the support at
    knot k+1 relative to knot k."""
    _, b_k = extract_knot(path, k)
    _, b_next = extract_knot(path, k + 1)
    new = sorted(set(_support(b_next)) - set(_support(b_k)))
    if len(new) == 1:
        return int(new[0])
    pos = path.entry_positions
    if k < len(pos) and path.events[pos[k]].kind == "enter":
        return int(path.events[pos[k]].index)
    return -1


def _restricted_fit_lasso(d: Dataset, cols, lam_eval: float) -> float:
    """<y, X_A b_A(lam_eval)> for the Lasso restricted to the given columns."""
    if not cols:
        return 0.0
    sub = d.restrict(cols)
    path = lars_path(sub, max_active=len(cols))
    b = beta_at(path, lam_eval)
    return float(d.y @ (sub.X @ b))


def _restricted_fit_en(d: Dataset, cols, lam: float, alpha: float) -> float:
    """Same for the elastic net: augmented path at eta = lam*(1-alpha),
    evaluated at gamma = lam*alpha."""
    if not cols:
        return 0.0
    sub = d.restrict(cols)
    aug = augment(sub, lam * (1.0 - alpha))
    path = lars_path(aug, max_active=len(cols))
    b = beta_at(path, lam * alpha)
    return float(d.y @ (sub.X @ b))


def cov_test_lasso(d: Dataset, path: KnotPath, k: int, sigma2: float,
                   reference=None, sigma2_estimated: bool = False) -> CovTestResult:
    """Covariance test for the predictor entering at Lasso entry-knot k."""
    if sigma2 <= 0.0:
        raise NonpositiveSigma2(f"sigma2 must be > 0, got {sigma2}")
    if path.alpha != 1.0:
        raise ValueError("cov_test_lasso requires an alpha = 1 path")
    lam_next, b_full = extract_knot(path, k + 1)
    _, b_k = extract_knot(path, k)
    fit_full = float(d.y @ (d.X @ b_full))
    fit_res = _restricted_fit_lasso(d, _support(b_k), lam_next)
    t = (fit_full - fit_res) / sigma2
    ref = reference if reference is not None else ExpReference(1.0)
    return CovTestResult(k=k, entering_predictor=_entering_at(path, k),
                         statistic=t, reference=ref, p_value=pvalue(t, ref),
                         sigma2_used=sigma2, sigma2_estimated=sigma2_estimated)


def cov_test_en(d: Dataset, path_grid: PathGrid, alpha: float, k: int,
                sigma2: float, reference=None,
                sigma2_estimated: bool = False) -> CovTestResult:
    """Covariance test for the predictor entering at elastic net entry-knot k.

    Identical to the Lasso test at alpha = 1. For alpha < 1 the restricted fit
    solves the elastic net on the active columns at the next knot's penalty,
    and the statistic carries the ``1 + eta_{k+1}`` factor tied to that knot.
    """
    idx = path_grid.grid.index_of(alpha)
    if alpha == 1.0:
        return cov_test_lasso(d, path_grid.paths[0], k, sigma2,
                              reference=reference,
                              sigma2_estimated=sigma2_estimated)
    if sigma2 <= 0.0:
        raise NonpositiveSigma2(f"sigma2 must be > 0, got {sigma2}")
    path = path_grid.paths[idx]
    if k + 1 >= len(path.knots):
        raise KnotIndexOutOfRange(
            f"path at alpha={alpha} has {len(path.knots) - 1} knots beyond the "
            f"first; step k={k} needs knot {k + 1}")
    lam_next = float(path.knots[k + 1])
    b_full = path.betas[k + 1]
    b_k = path.betas[k]
    eta_next = lam_next * (1.0 - alpha)
    fit_full = float(d.y @ (d.X @ b_full))
    fit_res = _restricted_fit_en(d, _support(b_k), lam_next, alpha)
    t = (1.0 + eta_next) / sigma2 * (fit_full - fit_res)
    new = sorted(set(_support(b_full)) - set(_support(b_k)))
    entering = int(new[0]) if len(new) == 1 else int(path.events[k].index)
    ref = reference if reference is not None else ExpReference(1.0)
    return CovTestResult(k=k, entering_predictor=entering, statistic=t,
                         reference=ref, p_value=pvalue(t, ref),
                         sigma2_used=sigma2, sigma2_estimated=sigma2_estimated)


def covtest_sequence(d: Dataset, alpha: float, K: int | None = None,
                     sigma2: float | None = None, grid_step: float = 0.01,
                     refine: bool = False) -> list[CovTestResult]:
    """Covariance tests for entry steps k = 0..K-1 at one mixing parameter.

    With ``sigma2`` given the reference is Exp(1); when omitted the noise
    variance is estimated from the full least squares fit (requires n > p) and
    the reference switches to F(2, n - p). For alpha < 1 the knots come from a
    one-step warm-started grid walk from 1 down to alpha in steps of
    ``grid_step``; fixed-point refinement is off by default because the
    one-step chain is the algorithm's defined output (refined knots can land
    on a different path branch in drop/re-entry regions).
    """
    if K is None:
        K = d.p
    if sigma2 is None:
        s2 = sigma2_hat(d)
        ref = FReference(dfd=d.n - d.p)
        estimated = True
    else:
        s2 = sigma2
        ref = ExpReference(1.0)
        estimated = False
    if alpha == 1.0:
        path = lars_path(d, stop_entries=K + 1)
        return [cov_test_lasso(d, path, k, s2, reference=ref,
                               sigma2_estimated=estimated) for k in range(K)]
    grid = AlphaGrid.from_range(alpha_min=alpha, step=grid_step)
    pg = en_knot_grid(d, grid, K=K, refine=refine)
    return [cov_test_en(d, pg, alpha, k, s2, reference=ref,
                        sigma2_estimated=estimated) for k in range(K)]
