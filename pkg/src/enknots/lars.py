"""Exact LARS solution path for the Lasso, including drop events.

The path is parameterized directly by the penalty level: on a segment with
active set A and sign vector s, the solution is the affine function
``beta_A(lam) = w_A - lam * d_A`` with ``w_A = (X_A'X_A)^{-1} X_A'y`` and
``d_A = (X_A'X_A)^{-1} s``. Each step finds the largest penalty below the
current knot at which either an inactive predictor's correlation reaches the
penalty (entry) or an active coefficient crosses zero (drop), and fires that
event. Column norms are not assumed to be one, so the same engine runs on
augmented designs whose columns have norm sqrt(1 + eta).

Knots used by the covariance tests are indexed by entry events only
(:func:`extract_knot`); drop knots remain in the path but do not advance the
entry index. When the path saturates, a terminal knot at penalty zero holding
the least squares solution on the final active set is appended, so the path is
defined on all of [0, lambda_0].
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import (AlphaOutOfRange, KnotIndexOutOfRange,
                     RankDeficientActiveSet, TiedEntry)
from .model import ActiveSet, Dataset


class PathEvent(NamedTuple):
    kind: str   # "enter" | "drop" | "end"
    index: int  # 0-based predictor index, -1 for "end"


@dataclass(frozen=True)
class KnotPath:
    """Ordered knots of one l1 path with solutions and events at each knot.

    ``betas[i]`` is the exact solution at ``knots[i]``; ``events[i]`` is the
    support change that fires at ``knots[i]`` as the penalty decreases through
    it, and ``active_sets[i]`` is the active set on the interval just below.
    """

    alpha: float
    knots: np.ndarray
    betas: np.ndarray
    events: tuple
    active_sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=float))
        object.__setattr__(self, "betas", np.asarray(self.betas, dtype=float))
        if np.any(np.diff(self.knots) >= 0):
            raise ValueError("knots must be strictly decreasing")

    @property
    def entry_positions(self) -> list:
        return [i for i, e in enumerate(self.events) if e.kind == "enter"]

    @property
    def n_entries(self) -> int:
        return len(self.entry_positions)

    @property
    def has_terminal(self) -> bool:
        return len(self.events) > 0 and self.events[-1].kind == "end"


def lambda_max(d: Dataset, alpha: float) -> tuple[float, int]:
    """Smallest penalty with an all-zero solution, and the first entering predictor.

    ``lam0 = max_j |<x_j, y>| / alpha``; ties break to the lowest index.
    """
    if not 0.0 < alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in (0, 1], got {alpha}")
    c = d.X.T @ d.y
    j = int(np.argmax(np.abs(c)))
    return float(np.abs(c[j]) / alpha), j


def _solve_active(X, y, active, signs):
    """Fresh symmetric solve of the active Gram system; (w, d, XA)."""
    XA = X[:, active]
    G = XA.T @ XA
    try:
        cho = scipy.linalg.cho_factor(G, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise RankDeficientActiveSet(
            f"active Gram matrix singular for set {active}") from exc
    w = scipy.linalg.cho_solve(cho, XA.T @ y)
    dvec = scipy.linalg.cho_solve(cho, np.asarray(signs, dtype=float))
    return w, dvec, XA


def _lars_engine(X, y, max_active, stop_entries=None, max_steps=None,
                 strict_ties=False, tie_tol=1e-12):
    n, p = X.shape
    c0 = X.T @ y
    j0 = int(np.argmax(np.abs(c0)))
    lam0 = float(abs(c0[j0]))

    knots = [lam0]
    betas = [np.zeros(p)]
    if lam0 == 0.0:
        events = [PathEvent("end", -1)]
        active_sets = [ActiveSet()]
        return knots, betas, events, active_sets

    tie_abs = tie_tol * max(1.0, lam0)
    s0 = 1 if c0[j0] >= 0 else -1
    events = [PathEvent("enter", j0)]
    active = [j0]
    signs = [s0]
    active_sets = [ActiveSet((j0,), (s0,))]
    n_entered = 1
    lam = lam0
    if max_steps is None:
        max_steps = 10 * p + 64

    while True:
        if stop_entries is not None and n_entered >= stop_entries:
            break
        if len(knots) - 1 >= max_steps:
            break
        w, dvec, XA = _solve_active(X, y, active, signs)

        candidates = []  # (lam_star, priority index, kind, j, sign)
        hi = lam * (1.0 - 1e-12)
        if len(active) < max_active:
            mask = np.ones(p, dtype=bool)
            mask[active] = False
            inact = np.where(mask)[0]
            if inact.size:
                a = X[:, inact].T @ (y - XA @ w)
                b = X[:, inact].T @ (XA @ dvec)
                with np.errstate(divide="ignore", invalid="ignore"):
                    lam_plus = a / (1.0 - b)
                    lam_minus = -a / (1.0 + b)
                for j, lp, lm in zip(inact, lam_plus, lam_minus):
                    if np.isfinite(lp) and 0.0 < lp < hi:
                        candidates.append((float(lp), int(j), "enter", int(j), 1))
                    if np.isfinite(lm) and 0.0 < lm < hi:
                        candidates.append((float(lm), int(j), "enter", int(j), -1))
        for pos, j in enumerate(active):
            if dvec[pos] != 0.0:
                ld = w[pos] / dvec[pos]
                if 0.0 < ld < hi:
                    candidates.append((float(ld), int(j), "drop", int(j), 0))

        if not candidates:
            # saturated or no further events: terminal knot at lam = 0 with
            # the least squares solution on the final active set
            beta_end = np.zeros(p)
            beta_end[active] = w
            knots.append(0.0)
            betas.append(beta_end)
            events.append(PathEvent("end", -1))
            active_sets.append(active_sets[-1])
            break

        candidates.sort(key=lambda t: (-t[0], t[1]))
        lam_next, _, kind, j, sgn = candidates[0]
        tied = [c for c in candidates
                if c[0] > lam_next - tie_abs and c[3] != j]
        if tied:
            if strict_ties:
                raise TiedEntry(
                    f"events for predictors {j} and {tied[0][3]} tie at "
                    f"lambda={lam_next:.6g}")
            group = [candidates[0]] + tied
            lam_next, _, kind, j, sgn = min(group, key=lambda t: t[3])
            warnings.warn(
                f"near-tied path events at lambda={lam_next:.6g}; "
                f"picking predictor {j}", stacklevel=2)

        beta_k = np.zeros(p)
        beta_k[active] = w - lam_next * dvec
        if kind == "enter":
            beta_k[j] = 0.0
            active.append(j)
            signs.append(sgn)
            n_entered += 1
        else:
            pos = active.index(j)
            beta_k[j] = 0.0
            del active[pos]
            del signs[pos]
        knots.append(lam_next)
        betas.append(beta_k)
        events.append(PathEvent(kind, j))
        active_sets.append(ActiveSet(tuple(active), tuple(signs)))
        lam = lam_next
        if lam == 0.0:
            break

    return knots, betas, events, active_sets


def lars_path(d: Dataset, max_knots: int | None = None, *,
              stop_entries: int | None = None, max_active: int | None = None,
              strict_ties: bool = False, alpha: float = 1.0) -> KnotPath:
    """Exact Lasso path of ``d`` as a :class:`KnotPath`.

    ``max_knots`` caps the number of steps taken after the first knot;
    ``stop_entries`` stops the path once that many entry events have fired
    (cheaper when only the first few knots are needed). ``max_active`` defaults
    to ``min(n - 1, p)`` for standardized data, where the centered design can
    support at most n - 1 active predictors.
    """
    if max_knots is not None and max_knots < 1:
        raise ValueError("max_knots must be >= 1")
    if max_active is None:
        max_active = min(d.n - 1 if d.standardized else d.n, d.p)
    knots, betas, events, active_sets = _lars_engine(
        d.X, d.y, max_active=max_active, stop_entries=stop_entries,
        max_steps=max_knots, strict_ties=strict_ties)
    return KnotPath(alpha=alpha, knots=np.array(knots),
                    betas=np.array(betas), events=tuple(events),
                    active_sets=tuple(active_sets))


def extract_knot(path: KnotPath, k: int) -> tuple[float, np.ndarray]:
    """The k-th knot counting entry events only (terminal knot addressable at
    ``k = n_entries`` when the path ran to penalty zero)."""
    pos = path.entry_positions
    if 0 <= k < len(pos):
        i = pos[k]
        return float(path.knots[i]), path.betas[i].copy()
    if k == len(pos) and path.has_terminal:
        return float(path.knots[-1]), path.betas[-1].copy()
    raise KnotIndexOutOfRange(
        f"entry knot {k} not available (path has {len(pos)} entries"
        f"{' + terminal' if path.has_terminal else ''})")


def beta_at(path: KnotPath, lam: float) -> np.ndarray:
    """Evaluate the piecewise-linear path at an arbitrary penalty level."""
    knots = path.knots
    if lam >= knots[0]:
        return np.zeros(path.betas.shape[1])
    if lam < knots[-1]:
        raise ValueError(
            f"lambda={lam} below the computed path (ends at {knots[-1]})")
    i = min(int(np.searchsorted(-knots, -lam, side="right")) - 1,
            len(knots) - 2)
    k0, k1 = knots[i], knots[i + 1]
    t = (lam - k1) / (k0 - k1)
    return t * path.betas[i] + (1.0 - t) * path.betas[i + 1]
