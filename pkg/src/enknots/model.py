"""Core linear-model types, standardization, the elastic net objective and its
first-order optimality residuals.

Conventions used throughout the package: the response is centered to mean zero
and predictor columns are centered and scaled to unit l2-norm (not unit
variance). The intercept is handled by centering only. Internally every
computation runs on the standardized scale; coefficients are mapped back to the
original scale at the reporting layer via ``to_original_scale``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AlphaOutOfRange, DimensionMismatch, ZeroVarianceColumn

_STD_TOL = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Response vector plus predictor matrix with standardization metadata.

    ``col_norms``, ``col_means`` and ``y_mean`` record the transform applied by
    :func:`standardize` so fits can be mapped back to the original scale. For a
    raw dataset they default to the identity transform.
    """

    y: np.ndarray
    X: np.ndarray
    standardized: bool = False
    col_norms: np.ndarray | None = None
    col_means: np.ndarray | None = None
    y_mean: float = 0.0

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
        if y.size < 1 or X.shape[1] < 1:
            raise DimensionMismatch("need n >= 1 and p >= 1")
        if not (np.isfinite(y).all() and np.isfinite(X).all()):
            raise ValueError("non-finite entries in dataset")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        if self.col_norms is not None:
            object.__setattr__(self, "col_norms",
                               np.asarray(self.col_norms, dtype=float).ravel())
        if self.col_means is not None:
            object.__setattr__(self, "col_means",
                               np.asarray(self.col_means, dtype=float).ravel())
        if self.standardized:
            norms = np.linalg.norm(X, axis=0)
            if np.max(np.abs(norms**2 - 1.0)) > _STD_TOL:
                raise ValueError("standardized dataset must have unit-norm columns")
            if abs(y.mean()) > _STD_TOL:
                raise ValueError("standardized dataset must have mean-zero response")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def restrict(self, cols) -> "Dataset":
        """Dataset on a subset of predictor columns (same response)."""
        cols = list(cols)
        return Dataset(
            y=self.y,
            X=self.X[:, cols],
            standardized=self.standardized,
            col_norms=None if self.col_norms is None else self.col_norms[cols],
            col_means=None if self.col_means is None else self.col_means[cols],
            y_mean=self.y_mean,
        )

    def to_original_scale(self, beta: np.ndarray) -> tuple[np.ndarray, float]:
        """Map standardized-scale coefficients to (original coefficients, intercept)."""
        beta = np.asarray(beta, dtype=float).ravel()
        if beta.size != self.p:
            raise DimensionMismatch(f"beta has size {beta.size}, expected {self.p}")
        norms = self.col_norms if self.col_norms is not None else np.ones(self.p)
        means = self.col_means if self.col_means is not None else np.zeros(self.p)
        b = beta / norms
        intercept = self.y_mean - float(means @ b)
        return b, intercept


@dataclass(frozen=True)
class ENParams:
    """Elastic net parameter pair (lam, alpha).

    ``gamma = lam * alpha`` and ``eta = lam * (1 - alpha)`` are the l1/l2 split
    used by the augmented formulation; they are always derived, never stored.
    """

    alpha: float
    lam: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise AlphaOutOfRange(f"alpha must be in (0, 1], got {self.alpha}")
        if self.lam < 0.0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")

    @property
    def gamma(self) -> float:
        return self.lam * self.alpha

    @property
    def eta(self) -> float:
        return self.lam * (1.0 - self.alpha)


@dataclass(frozen=True)
class ActiveSet:
    """Ordered indices of the nonzero coefficients and their signs.

    Indices are 0-based predictor positions; the reporting layer converts to
    the 1-based numbering used in output tables.
    """

    indices: tuple = ()
    signs: tuple = ()

    def __post_init__(self):
        if len(self.indices) != len(set(self.indices)):
            raise ValueError("active set indices must be unique")
        if len(self.signs) != len(self.indices):
            raise ValueError("signs must match indices")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +-1")

    def __len__(self):
        return len(self.indices)

    def __contains__(self, j):
        return j in self.indices


def standardize(raw: Dataset) -> Dataset:
    """Center y, center each predictor column and scale it to unit l2-norm.

    Idempotent: an already-standardized dataset is returned unchanged. Raises
    ZeroVarianceColumn for constant columns.
    """
    if raw.standardized:
        return raw
    means = raw.X.mean(axis=0)
    Xc = raw.X - means
    norms = np.linalg.norm(Xc, axis=0)
    for j in range(raw.p):
        if norms[j] == 0.0:
            raise ZeroVarianceColumn(j)
    y_mean = float(raw.y.mean())
    return Dataset(
        y=raw.y - y_mean,
        X=Xc / norms,
        standardized=True,
        col_norms=norms,
        col_means=means,
        y_mean=y_mean,
    )


def en_objective(d: Dataset, beta: np.ndarray, params: ENParams) -> float:
    """0.5 ||y - X beta||^2 + lam * (alpha ||beta||_1 + (1-alpha)/2 ||beta||_2^2)."""
    beta = np.asarray(beta, dtype=float).ravel()
    if beta.size != d.p:
        raise DimensionMismatch(f"beta has size {beta.size}, expected {d.p}")
    r = d.y - d.X @ beta
    penalty = params.alpha * np.abs(beta).sum() \
        + 0.5 * (1.0 - params.alpha) * float(beta @ beta)
    return 0.5 * float(r @ r) + params.lam * penalty


def kkt_residual(d: Dataset, beta: np.ndarray,
                 params: ENParams) -> tuple[float, float]:
    """First-order optimality residuals of the elastic net problem.

    Returns ``(active_violation, inactive_excess)``: the worst violation of the
    stationarity condition over nonzero coordinates, and the worst amount by
    which an inactive coordinate's correlation exceeds the l1 threshold
    (clamped at zero). Both are zero at an exact solution.
    """
    beta = np.asarray(beta, dtype=float).ravel()
    if beta.size != d.p:
        raise DimensionMismatch(f"beta has size {beta.size}, expected {d.p}")
    c = d.X.T @ (d.y - d.X @ beta)
    gamma, eta = params.gamma, params.eta
    active = beta != 0.0
    active_violation = 0.0
    if active.any():
        g = c[active] - eta * beta[active] - gamma * np.sign(beta[active])
        active_violation = float(np.max(np.abs(g)))
    inactive_excess = 0.0
    if (~active).any():
        inactive_excess = float(max(0.0, np.max(np.abs(c[~active])) - gamma))
    return active_violation, inactive_excess
