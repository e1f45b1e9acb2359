"""Exact elastic net solution-path knots, covariance significance tests for
predictor entry, and Monte Carlo null-distribution experiments."""

from .covtest import (CovTestResult, ExpReference, FReference, cov_test_en,
                      cov_test_lasso, covtest_sequence, pvalue, sigma2_hat)
from .datasets import load_prostate, load_prostate_full
from .enpath import (AlphaGrid, PathGrid, augment, en_knot_at, en_knot_grid)
from .lars import (KnotPath, PathEvent, beta_at, extract_knot, lambda_max,
                   lars_path)
from .model import (ActiveSet, Dataset, ENParams, en_objective, kkt_residual,
                    standardize)
from .oracles import (en_solve_cd, en_solve_orthonormal, knots_bruteforce,
                      soft_threshold)
from .simulate import (CovSpec, NullSimConfig, NullSimSummary, gen_response,
                       make_sigma, mc_null_experiment, orthonormalize_columns,
                       qq_data, sample_predictors, write_samples_csv,
                       write_summary_json)

__version__ = "0.1.0"

__all__ = [
    "ActiveSet", "AlphaGrid", "CovSpec", "CovTestResult", "Dataset",
    "ENParams", "ExpReference", "FReference", "KnotPath", "NullSimConfig",
    "NullSimSummary", "PathEvent", "PathGrid", "augment", "beta_at",
    "cov_test_en", "cov_test_lasso", "covtest_sequence", "en_knot_at",
    "en_knot_grid", "en_objective", "en_solve_cd", "en_solve_orthonormal",
    "extract_knot", "gen_response", "kkt_residual", "knots_bruteforce",
    "lambda_max", "lars_path", "load_prostate", "load_prostate_full",
    "make_sigma", "mc_null_experiment", "orthonormalize_columns", "pvalue",
    "qq_data", "sample_predictors", "sigma2_hat", "soft_threshold",
    "standardize", "write_samples_csv", "write_summary_json",
]
