"""Synthetic designs with structured covariance and the Monte Carlo harness
for null distributions of the covariance test statistic.

Rows of the predictor matrix are i.i.d. multivariate normal with compound
symmetry, AR(1), or identity covariance; the response is Gaussian around
``X beta_star``. Each replicate draws its own design and response,
standardizes, walks the mixing-parameter grid for the requested knots, and
evaluates the covariance test at the configured step. Replicate r uses an
independent random stream derived from (seed, r), so results do not depend on
execution order.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .covtest import ExpReference, FReference, cov_test_en, pvalue, sigma2_hat
from .enpath import AlphaGrid, en_knot_grid
from .errors import (CholeskyFailure, DimensionMismatch, EmptySamples,
                     EnknotsError, NotPositiveDefinite)
from .model import Dataset, standardize

STRUCTURES = ("identity", "cs", "ar1")


@dataclass(frozen=True)
class CovSpec:
    """Parameters of the predictor covariance matrix."""

    sigma2: float = 1.0
    rho: float = 0.0
    structure: str = "identity"
    p: int = 10

    def __post_init__(self):
        if self.sigma2 <= 0.0:
            raise NotPositiveDefinite(f"sigma2 must be > 0, got {self.sigma2}")
        if not -1.0 < self.rho < 1.0:
            raise NotPositiveDefinite(f"rho must be in (-1, 1), got {self.rho}")
        if self.structure not in STRUCTURES:
            raise ValueError(f"structure must be one of {STRUCTURES}")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.structure == "cs" and self.p > 1 and self.rho <= -1.0 / (self.p - 1):
            raise NotPositiveDefinite(
                f"compound symmetry needs rho > -1/(p-1) = {-1.0 / (self.p - 1):.4f}")


def make_sigma(spec: CovSpec) -> np.ndarray:
    """Covariance matrix for the given spec; validated symmetric positive definite."""
    p = spec.p
    if spec.structure == "identity":
        sig = np.eye(p)
    elif spec.structure == "cs":
        sig = (1.0 - spec.rho) * np.eye(p) + spec.rho * np.ones((p, p))
    else:
        idx = np.arange(p)
        sig = spec.rho ** np.abs(idx[:, None] - idx[None, :])
    sig = spec.sigma2 * sig
    if np.min(np.linalg.eigvalsh(sig)) <= 0.0:
        raise NotPositiveDefinite("covariance matrix is not positive definite")
    return sig


def sample_predictors(n: int, sigma: np.ndarray, rng) -> np.ndarray:
    """n i.i.d. rows from N(0, sigma) via the lower Cholesky factor."""
    try:
        L = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure(str(exc)) from exc
    return rng.standard_normal((n, sigma.shape[0])) @ L.T


def orthonormalize_columns(X: np.ndarray) -> np.ndarray:
    """Exactly orthonormal columns spanning the centered design (QR with a
    deterministic sign convention). Requires n - 1 >= p."""
    Xc = X - X.mean(axis=0)
    Q, R = np.linalg.qr(Xc)
    sgn = np.sign(np.diag(R))
    sgn[sgn == 0] = 1.0
    return Q * sgn


def gen_response(X: np.ndarray, beta_star: np.ndarray, noise_sd: float,
                 rng) -> np.ndarray:
    """y = X beta_star + noise_sd * z with standard normal z."""
    beta_star = np.asarray(beta_star, dtype=float).ravel()
    if beta_star.size != X.shape[1]:
        raise DimensionMismatch(
            f"beta_star has size {beta_star.size}, expected {X.shape[1]}")
    return X @ beta_star + noise_sd * rng.standard_normal(X.shape[0])


@dataclass(frozen=True)
class NullSimConfig:
    """One Monte Carlo experiment: design, signal, tested step, and bookkeeping.

    ``k_test`` is the entry step whose statistic is collected (0 for the
    global null). ``orthonormal_design`` replaces the sampled design with an
    exactly orthonormal one spanning the same columns.
    """

    n: int
    p: int
    cov: CovSpec
    beta_star: np.ndarray | None = None
    alpha_list: tuple = (1.0, 0.9, 0.5)
    k_test: int = 0
    reps: int = 1000
    seed: int = 0
    sigma2_known: bool = True
    orthonormal_design: bool = False
    grid_step: float = 0.01

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.cov.p != self.p:
            raise DimensionMismatch("cov.p must equal p")
        if self.beta_star is not None:
            b = np.asarray(self.beta_star, dtype=float).ravel()
            if b.size != self.p:
                raise DimensionMismatch("beta_star must have length p")
            nz = b[b != 0]
            if nz.size and not np.all(nz == nz[0]):
                raise ValueError("nonzero entries of beta_star must be equal")
            object.__setattr__(self, "beta_star", b)
        object.__setattr__(self, "alpha_list",
                           tuple(float(a) for a in self.alpha_list))


@dataclass
class NullSimSummary:
    """Per-alpha moments and quantiles of the collected statistics, with raw
    samples retained for QQ export."""

    config: NullSimConfig
    samples: dict = field(default_factory=dict)     # alpha -> np.ndarray
    records: list = field(default_factory=list)     # (rep, alpha, k, T, p)
    failures: list = field(default_factory=list)    # (rep, message)

    def stats(self, alpha: float) -> tuple[float, float, float]:
        """(mean, variance, empirical 95% quantile) of the samples at alpha.

        The quantile uses linear interpolation between order statistics at
        position 0.95 * (m - 1) + 1; a single sample reports variance 0.
        """
        s = self.samples[alpha]
        mean = float(np.mean(s))
        var = float(np.var(s, ddof=1)) if s.size > 1 else 0.0
        q95 = float(np.quantile(s, 0.95))
        return mean, var, q95

    @property
    def n_failures(self) -> int:
        return len(self.failures)


def mc_null_experiment(config: NullSimConfig) -> NullSimSummary:
    """Run the Monte Carlo experiment described by ``config``.

    Per replicate: draw the design and response, standardize, compute the knot
    grid down to the smallest requested alpha, and evaluate the covariance test
    at ``k_test`` for every alpha in ``alpha_list``. Replicates that fail on
    degenerate paths are recorded and skipped; more than 1% failures is an
    error.
    """
    spec = config.cov
    sigma = make_sigma(spec)
    alpha_min = min(config.alpha_list)
    if alpha_min == 1.0:
        grid = AlphaGrid(values=np.array([1.0]))
    else:
        grid = AlphaGrid.from_range(alpha_min=alpha_min, step=config.grid_step)
    beta_star = (np.zeros(config.p) if config.beta_star is None
                 else config.beta_star)
    samples = {a: [] for a in config.alpha_list}
    summary = NullSimSummary(config=config)
    for rep in range(config.reps):
        rng = np.random.default_rng([config.seed, rep])
        X = sample_predictors(config.n, sigma, rng)
        if config.orthonormal_design:
            X = orthonormalize_columns(X)
        y = gen_response(X, beta_star, 1.0, rng)
        try:
            d = standardize(Dataset(y=y, X=X))
            pg = en_knot_grid(d, grid, K=config.k_test + 1, refine=False)
            if config.sigma2_known:
                s2, ref, est = 1.0, ExpReference(1.0), False
            else:
                s2 = sigma2_hat(d)
                ref, est = FReference(dfd=d.n - d.p), True
            for a in config.alpha_list:
                res = cov_test_en(d, pg, a, config.k_test, s2, reference=ref,
                                  sigma2_estimated=est)
                samples[a].append(res.statistic)
                summary.records.append(
                    (rep, a, config.k_test, res.statistic, res.p_value))
        except EnknotsError as exc:
            summary.failures.append((rep, f"{type(exc).__name__}: {exc}"))
            continue
    if summary.n_failures > 0.01 * config.reps:
        raise EnknotsError(
            f"{summary.n_failures}/{config.reps} replicates failed")
    summary.samples = {a: np.asarray(v) for a, v in samples.items()}
    return summary


def qq_data(samples, reference) -> list[tuple[float, float]]:
    """(theoretical, empirical) quantile pairs at plotting positions
    (i - 0.5) / m."""
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    m = s.size
    if m == 0:
        raise EmptySamples("no samples given")
    pos = (np.arange(1, m + 1) - 0.5) / m
    theo = np.asarray(reference.ppf(pos), dtype=float)
    return list(zip(theo.tolist(), s.tolist()))


def write_samples_csv(summary: NullSimSummary, path) -> None:
    """Raw per-replicate statistics as CSV (rep, alpha, k, T, p_value)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rep", "alpha", "k", "T", "p_value"])
        for rec in summary.records:
            w.writerow(rec)


def write_summary_json(summary: NullSimSummary, path) -> None:
    """Per-alpha summary statistics as a JSON record."""
    cfg = summary.config
    out = {
        "n": cfg.n, "p": cfg.p, "reps": cfg.reps, "seed": cfg.seed,
        "k_test": cfg.k_test, "structure": cfg.cov.structure,
        "rho": cfg.cov.rho, "sigma2": cfg.cov.sigma2,
        "sigma2_known": cfg.sigma2_known,
        "orthonormal_design": cfg.orthonormal_design,
        "failures": summary.n_failures,
        "per_alpha": {},
    }
    for a in cfg.alpha_list:
        mean, var, q95 = summary.stats(a)
        out["per_alpha"][f"{a:g}"] = {
            "mean": mean, "var": var, "q95": q95,
            "n": int(summary.samples[a].size),
        }
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
