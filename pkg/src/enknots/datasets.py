"""Bundled prostate cancer dataset (Stamey et al., 1989).

Classic tab-separated file: 97 observations of eight clinical predictors
(lcavol, lweight, age, lbph, svi, lcp, gleason, pgg45), the log-PSA response,
and a train/test flag marking the standard 67/30 split. The loader returns the
training subset used in the significance-test analyses.
"""
from __future__ import annotations

import hashlib
from importlib import resources

import numpy as np

from .errors import ChecksumMismatch, DataFileMissing
from .model import Dataset

PROSTATE_PREDICTORS = ("lcavol", "lweight", "age", "lbph", "svi", "lcp",
                       "gleason", "pgg45")
PROSTATE_SHA256 = "ee88cf8e8c351d80fcf4b4e0806aa19070145a71590118ad88e9111c6571d1f5"


def _read_bundled():
    try:
        raw = (resources.files("enknots") / "data" / "prostate.data").read_bytes()
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise DataFileMissing("bundled prostate.data not found") from exc
    digest = hashlib.sha256(raw).hexdigest()
    if digest != PROSTATE_SHA256:
        raise ChecksumMismatch(
            f"prostate.data sha256 {digest} != expected {PROSTATE_SHA256}")
    lines = raw.decode("utf-8").strip().split("\n")
    header = lines[0].strip().split("\t")
    rows = [ln.split("\t") for ln in lines[1:]]
    X = np.array([[float(v) for v in r[1:9]] for r in rows])
    y = np.array([float(r[9]) for r in rows])
    train = np.array([r[10] == "T" for r in rows])
    return header, X, y, train


def load_prostate() -> Dataset:
    """Training subset (n=67) with log-PSA response, predictors in the
    standard order; unstandardized."""
    _, X, y, train = _read_bundled()
    return Dataset(y=y[train], X=X[train])


def load_prostate_full():
    """(X, y, train_mask) over all 97 observations, for diagnostics."""
    _, X, y, train = _read_bundled()
    return X, y, train
