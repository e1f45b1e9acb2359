"""Elastic net knots over a decreasing grid of mixing parameters.

For a fixed mixing parameter the elastic net problem is a Lasso on the
augmented data ``y_a = (y; 0)``, ``X_a(eta) = (X; sqrt(eta) I_p)`` with l1
penalty ``gamma = lam * alpha`` and ridge level ``eta = lam * (1 - alpha)``.
Knowing eta at a knot therefore reduces knot finding to a LARS run on the
augmented design. Walking the grid downward from alpha = 1, each knot's eta is
warm started from the same knot at the previous grid point,
``eta_k ~= lam_k(alpha_prev) * (1 - alpha)``, which is accurate on a dense
grid; an optional fixed-point refinement re-derives eta from the knot it
produced until the knot value stabilizes.

The augmented design is deliberately not re-normalized: rescaling its columns
would change the problem, so the LARS engine runs on raw inner products
(columns of norm sqrt(1 + eta)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (AlphaNotInGrid, AlphaOutOfRange, GridTooCoarse,
                     KnotIndexOutOfRange, NegativeEta)
from .lars import KnotPath, PathEvent, extract_knot, lambda_max, lars_path
from .model import ActiveSet, Dataset

REFINE_TOL = 1e-8
REFINE_MAX_ITER = 20


@dataclass(frozen=True)
class AlphaGrid:
    """Strictly decreasing mixing-parameter grid starting exactly at 1."""

    values: np.ndarray
    step: float = 0.01

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0 or v[0] != 1.0:
            raise AlphaOutOfRange("grid must start at alpha = 1 exactly")
        if np.any(np.diff(v) >= 0):
            raise AlphaOutOfRange("grid values must be strictly decreasing")
        if v[-1] <= 0.0 or np.any(v > 1.0):
            raise AlphaOutOfRange("grid values must lie in (0, 1]")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_range(cls, alpha_min: float = 0.5, step: float = 0.01) -> "AlphaGrid":
        if not 0.0 < alpha_min <= 1.0:
            raise AlphaOutOfRange(f"alpha_min must be in (0, 1], got {alpha_min}")
        m = int(round((1.0 - alpha_min) / step))
        vals = np.round(1.0 - step * np.arange(m + 1), 12)
        if not math.isclose(vals[-1], alpha_min, rel_tol=0, abs_tol=1e-9):
            vals = np.append(vals, alpha_min)
        return cls(values=vals, step=step)

    @classmethod
    def default(cls) -> "AlphaGrid":
        return cls.from_range(0.5, 0.01)

    def index_of(self, alpha: float) -> int:
        hits = np.where(np.abs(self.values - alpha) <= 1e-9)[0]
        if hits.size == 0:
            raise AlphaNotInGrid(f"alpha={alpha} is not a grid value")
        return int(hits[0])

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class PathGrid:
    """One :class:`KnotPath` per grid value; ``paths[0]`` is the plain Lasso path."""

    grid: AlphaGrid
    paths: tuple
    K: int

    def path_for(self, alpha: float) -> KnotPath:
        return self.paths[self.grid.index_of(alpha)]


def augment(d: Dataset, eta: float) -> Dataset:
    """Augmented dataset ``(y; 0)``, ``(X; sqrt(eta) I_p)``.

    The result is intentionally left unstandardized: its columns have norm
    sqrt(1 + eta) and the identity block has nonzero column means.
    """
    if eta < 0.0:
        raise NegativeEta(f"eta must be >= 0, got {eta}")
    p = d.p
    Xa = np.vstack([d.X, math.sqrt(eta) * np.eye(p)])
    ya = np.concatenate([d.y, np.zeros(p)])
    return Dataset(y=ya, X=Xa, standardized=False)


def _en_knot_run(d, alpha, eta_guess, k, strict_ties):
    """(lam_k, beta_k, entering index at the run's entry knot k)."""
    aug = augment(d, eta_guess)
    path = lars_path(aug, stop_entries=k + 1, max_active=d.p,
                     strict_ties=strict_ties)
    gamma_k, beta_k = extract_knot(path, k)
    pos = path.entry_positions
    entering = path.events[pos[k]].index if k < len(pos) else -1
    return gamma_k / alpha, beta_k, entering


def en_knot_at(d: Dataset, alpha: float, eta_guess: float, k: int,
               strict_ties: bool = False) -> tuple[float, np.ndarray]:
    """Entry knot ``k`` of the elastic net path at ``alpha``, for a fixed ridge
    level ``eta_guess``: a LARS run on the augmented design, with the found l1
    knot mapped back through ``lam = gamma / alpha``."""
    if not 0.0 < alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in (0, 1], got {alpha}")
    if k < 0:
        raise KnotIndexOutOfRange(f"knot index must be >= 0, got {k}")
    lam, beta, _ = _en_knot_run(d, alpha, eta_guess, k, strict_ties)
    return lam, beta


def _refined_knot(d, alpha, eta_guess, k, strict_ties):
    """Fixed-point iteration eta <- lam * (1 - alpha); returns the one-step
    value alongside the converged one."""
    lam_one, beta, ent = _en_knot_run(d, alpha, eta_guess, k, strict_ties)
    lam = lam_one
    for _ in range(REFINE_MAX_ITER):
        eta = lam * (1.0 - alpha)
        lam_new, beta, ent = _en_knot_run(d, alpha, eta, k, strict_ties)
        if abs(lam_new - lam) < REFINE_TOL:
            lam = lam_new
            break
        lam = lam_new
    return lam_one, lam, beta, ent


def en_knot_grid(d: Dataset, grid: AlphaGrid, K: int,
                 refine: bool = False, strict_ties: bool = False) -> PathGrid:
    """Knots ``lam_k(alpha)`` for ``k = 0..K`` over the whole grid.

    The first grid point (alpha = 1) is a single plain LARS run. For each later
    grid point, knot k is recomputed from an augmented LARS run whose ridge
    level is warm started from knot k at the previous grid point; knot 0 is
    always the analytic zero-crossing penalty. With ``refine`` the ridge level
    is iterated to its fixed point, and a :class:`GridTooCoarse` warning is
    emitted when the one-step value was off by more than 1%.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    lasso = lars_path(d, stop_entries=K + 1, strict_ties=strict_ties)
    paths = [lasso]
    prev = np.full(K + 1, np.nan)
    avail = min(K, lasso.n_entries - 1 + (1 if lasso.has_terminal else 0))
    for k in range(avail + 1):
        prev[k] = extract_knot(lasso, k)[0]

    for alpha in grid.values[1:]:
        lam_a = np.full(K + 1, np.nan)
        betas_a = np.zeros((K + 1, d.p))
        run_entering = np.full(K + 1, -1, dtype=int)
        lam_a[0], j0 = lambda_max(d, alpha)
        run_entering[0] = j0
        kmax = 0
        for k in range(1, K + 1):
            if not np.isfinite(prev[k]):
                break
            eta_tilde = prev[k] * (1.0 - alpha)
            try:
                if refine:
                    lam_one, lam_k, beta_k, ent = _refined_knot(
                        d, alpha, eta_tilde, k, strict_ties)
                    if lam_k > 0 and abs(lam_one - lam_k) > 0.01 * lam_k:
                        warnings.warn(GridTooCoarse(
                            f"one-step knot {k} at alpha={alpha} off by "
                            f"{abs(lam_one - lam_k) / lam_k:.1%}"))
                else:
                    lam_k, beta_k, ent = _en_knot_run(d, alpha, eta_tilde, k,
                                                      strict_ties)
            except KnotIndexOutOfRange:
                break
            lam_a[k] = lam_k
            betas_a[k] = beta_k
            run_entering[k] = ent
            kmax = k
        paths.append(_assemble_path(d, alpha, lam_a[:kmax + 1],
                                    betas_a[:kmax + 1],
                                    run_entering[:kmax + 1]))
        prev = lam_a

    return PathGrid(grid=grid, paths=tuple(paths), K=K)


def _assemble_path(d, alpha, lams, betas, run_entering):
    """Stitch per-knot solutions for one alpha into a KnotPath.

    The entering predictor at knot k is resolved as the support difference
    between consecutive knot solutions when that difference is a single index
    (the generic case); otherwise the augmented run that produced knot k
    supplies its own entry event. The active set below knot k is the support
    at knot k plus the predictor entering there.
    """
    m = len(lams)
    events = []
    active_sets = []
    for k in range(m):
        supp_k = set(np.nonzero(betas[k])[0].tolist())
        if k + 1 < m:
            diff = sorted(set(np.nonzero(betas[k + 1])[0].tolist()) - supp_k)
            entering = int(diff[0]) if len(diff) == 1 else int(run_entering[k])
        else:
            entering = int(run_entering[k])
        if entering < 0 and lams[k] == 0.0:
            events.append(PathEvent("end", -1))
        else:
            events.append(PathEvent("enter", entering))
        below = sorted(supp_k | ({entering} if entering >= 0 else set()))
        signs = []
        for j in below:
            if betas[k][j] != 0.0:
                signs.append(1 if betas[k][j] > 0 else -1)
            elif k + 1 < m and betas[k + 1][j] != 0.0:
                signs.append(1 if betas[k + 1][j] > 0 else -1)
            else:
                c = float(d.X[:, j] @ (d.y - d.X @ betas[k]))
                signs.append(1 if c >= 0 else -1)
        active_sets.append(ActiveSet(tuple(below), tuple(signs)))
    return KnotPath(alpha=float(alpha), knots=lams, betas=betas,
                    events=tuple(events), active_sets=tuple(active_sets))
