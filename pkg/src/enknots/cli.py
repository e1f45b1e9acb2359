"""Command-line front end.

Subcommands: ``knots`` and ``path`` write knot tables (and dense path samples)
for a dataset; ``covtest`` writes the per-step significance table; ``simulate``
runs the Monte Carlo null experiments, with presets reproducing the reference
experiments; ``qq`` emits quantile-quantile pairs; ``demo-prostate`` runs the
bundled real-data example end to end.

Input CSV format: header row, first column the response, remaining columns the
predictors, '.' decimal separator. Exit codes: 0 success, 1 usage error,
2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .covtest import ExpReference, FReference, covtest_sequence
from .datasets import load_prostate
from .enpath import AlphaGrid, en_knot_grid
from .errors import (ChecksumMismatch, DataFileMissing, EnknotsError,
                     NotConverged, ParseError, RankDeficientActiveSet,
                     TiedEntry)
from .lars import beta_at
from .model import Dataset, standardize
from .simulate import (CovSpec, NullSimConfig, mc_null_experiment, qq_data,
                       write_samples_csv, write_summary_json)

USAGE_ERROR, DATA_ERROR, NUMERICAL_ERROR = 1, 2, 3

TABLE1_CELLS = [
    ("S1", CovSpec(structure="identity", rho=0.0, p=10), 10),
    ("S1", CovSpec(structure="identity", rho=0.0, p=50), 50),
    ("S2", CovSpec(structure="cs", rho=0.25, p=10), 10),
    ("S2", CovSpec(structure="cs", rho=0.25, p=50), 50),
    ("S3", CovSpec(structure="ar1", rho=0.25, p=10), 10),
    ("S3", CovSpec(structure="ar1", rho=0.25, p=50), 50),
]


def read_dataset_csv(path) -> Dataset:
    """First column response, remaining columns predictors."""
    rows = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or len(header) < 2:
                raise ParseError(f"{path}: need a header row with >= 2 columns")
            width = len(header)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != width:
                    raise ParseError(f"{path}: line {lineno}: expected "
                                     f"{width} fields, got {len(row)}")
                try:
                    rows.append([float(v) for v in row])
                except ValueError as exc:
                    raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: no data rows")
    arr = np.asarray(rows)
    return Dataset(y=arr[:, 0], X=arr[:, 1:])


def _parse_alphas(args) -> list:
    if args.alpha_grid:
        try:
            amin, step = args.alpha_grid.split(":")
            grid = AlphaGrid.from_range(float(amin), float(step))
        except (ValueError, EnknotsError) as exc:
            raise ParseError(f"bad --alpha-grid {args.alpha_grid!r}: {exc}")
        return [float(a) for a in grid.values]
    if args.alpha:
        out = []
        for tok in args.alpha:
            for piece in tok.split(","):
                out.append(float(piece))
        return out
    return [1.0, 0.9, 0.5]


def _write_rows(path, header, rows, fmt):
    path = Path(path)
    if fmt == "json":
        payload = [dict(zip(header, r)) for r in rows]
        path.write_text(json.dumps(payload, indent=2) + "\n")
    else:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)


def _alpha_tag(a: float) -> str:
    return f"{a:g}".replace(".", "p")


def cmd_knots(args, dense: bool) -> int:
    d_raw = read_dataset_csv(args.input)
    d = standardize(d_raw)
    alphas = _parse_alphas(args)
    K = args.K if args.K is not None else d.p
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    grid_vals = sorted(set(alphas) | {1.0}, reverse=True)
    grid = AlphaGrid(values=np.array(grid_vals))
    pg = en_knot_grid(d, grid, K=K, refine=args.refine)
    coef_names = [f"beta{j + 1}" for j in range(d.p)]
    for a in alphas:
        path = pg.path_for(a)
        rows = []
        for i, lam in enumerate(path.knots):
            ev = path.events[i]
            b_orig, _ = d.to_original_scale(path.betas[i])
            rows.append([i, f"{lam:.12g}", ev.kind,
                         ev.index + 1 if ev.index >= 0 else ""]
                        + [f"{v:.12g}" for v in b_orig])
        _write_rows(outdir / f"knots_alpha{_alpha_tag(a)}.{args.format}",
                    ["k", "lambda", "event", "predictor"] + coef_names,
                    rows, args.format)
        if dense:
            rows = []
            for i in range(len(path.knots) - 1):
                for lam in np.linspace(path.knots[i], path.knots[i + 1],
                                       args.samples_per_segment,
                                       endpoint=False):
                    b_orig, icept = d.to_original_scale(beta_at(path, lam))
                    rows.append([f"{lam:.12g}", f"{icept:.12g}"]
                                + [f"{v:.12g}" for v in b_orig])
            lam_end = path.knots[-1]
            b_orig, icept = d.to_original_scale(beta_at(path, lam_end))
            rows.append([f"{lam_end:.12g}", f"{icept:.12g}"]
                        + [f"{v:.12g}" for v in b_orig])
            _write_rows(outdir / f"path_alpha{_alpha_tag(a)}.{args.format}",
                        ["lambda", "intercept"] + coef_names, rows, args.format)
    print(f"wrote {len(alphas)} knot table(s) to {outdir}")
    return 0


def _covtest_table(d, alphas, K, sigma2, fmt, outdir, stem):
    rows = []
    for a in alphas:
        seq = covtest_sequence(d, a, K=K, sigma2=sigma2)
        for r in seq:
            rows.append([f"{a:g}", r.k + 1, r.entering_predictor + 1,
                         f"{r.statistic:.12g}", f"{r.p_value:.12g}",
                         f"{r.p_value:.3f}", r.reference.label()])
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / f"{stem}.{fmt}"
    _write_rows(out, ["alpha", "step", "predictor", "T", "p_value",
                      "p_rounded", "reference"], rows, fmt)
    for a in alphas:
        line = " ".join(f"{float(r[5]):.3f} ({r[2]})"
                        for r in rows if r[0] == f"{a:g}")
        print(f"alpha={a:g}: {line}")
    print(f"wrote {out}")
    return 0


def cmd_covtest(args) -> int:
    if args.preset == "prostate" or args.demo_prostate:
        d = standardize(load_prostate())
    elif args.input:
        d = standardize(read_dataset_csv(args.input))
    else:
        raise ParseError("covtest needs --input or --preset prostate")
    alphas = _parse_alphas(args)
    sigma2 = None if args.estimate_sigma or args.sigma2 is None else args.sigma2
    if args.estimate_sigma:
        sigma2 = None
    K = args.K if args.K is not None else d.p
    return _covtest_table(d, alphas, K, sigma2, args.format, Path(args.out),
                          "covtest" if not args.demo_prostate else "prostate_covtest")


def _run_preset_table1(args, outdir) -> int:
    alphas = (1.0, 0.9, 0.5)
    results = {}
    for idx, (name, cov, p) in enumerate(TABLE1_CELLS):
        cfg = NullSimConfig(n=100, p=p, cov=cov, k_test=0, alpha_list=alphas,
                            reps=args.reps, seed=args.seed + idx,
                            sigma2_known=True)
        summary = mc_null_experiment(cfg)
        results[(name, p)] = summary
        write_samples_csv(summary, outdir / f"samples_{name}_p{p}.csv")
        write_summary_json(summary, outdir / f"summary_{name}_p{p}.json")
    ref_col = {"mean": 1.0, "var": 1.0, "q95": 3.0}
    header = ["structure", "stat", "Exp(1)"]
    for p in (10, 50):
        header += [f"p{p}_alpha{a:g}" for a in alphas]
    rows = []
    for name in ("S1", "S2", "S3"):
        for stat_i, stat in enumerate(("mean", "var", "q95")):
            row = [name, stat, f"{ref_col[stat]:g}"]
            for p in (10, 50):
                for a in alphas:
                    row.append(f"{results[(name, p)].stats(a)[stat_i]:.3f}")
            rows.append(row)
    _write_rows(outdir / f"table_global_null.{args.format}", header, rows,
                args.format)
    for r in rows:
        print(" ".join(str(v) for v in r))
    return 0


def _fig_config(preset, args) -> NullSimConfig:
    if preset == "fig2":
        k = args.k_test if args.k_test is not None else 1
        beta = np.zeros(50)
        beta[:k] = 3.0
        return NullSimConfig(n=100, p=50,
                             cov=CovSpec(structure="identity", p=50),
                             beta_star=beta, k_test=k, reps=args.reps,
                             seed=args.seed, sigma2_known=True)
    # fig3: one true signal, orthonormal design, statistic at step k+1
    beta = np.zeros(50)
    beta[:1] = 3.0
    return NullSimConfig(n=100, p=50, cov=CovSpec(structure="identity", p=50),
                         beta_star=beta, k_test=2, reps=args.reps,
                         seed=args.seed, sigma2_known=True,
                         orthonormal_design=True)


def cmd_simulate(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.preset == "table1":
        return _run_preset_table1(args, outdir)
    if args.preset in ("fig2", "fig3"):
        cfg = _fig_config(args.preset, args)
        summary = mc_null_experiment(cfg)
        stem = f"{args.preset}_k{cfg.k_test}"
        write_samples_csv(summary, outdir / f"samples_{stem}.csv")
        write_summary_json(summary, outdir / f"summary_{stem}.json")
        ref = ExpReference(0.5 if args.preset == "fig3" else 1.0)
        for a in cfg.alpha_list:
            pairs = qq_data(summary.samples[a], ref)
            _write_rows(outdir / f"qq_{stem}_alpha{_alpha_tag(a)}.{args.format}",
                        ["theoretical", "empirical"],
                        [[f"{t:.12g}", f"{e:.12g}"] for t, e in pairs],
                        args.format)
            mean, var, q95 = summary.stats(a)
            print(f"alpha={a:g}: mean={mean:.3f} var={var:.3f} q95={q95:.3f} "
                  f"(reference {ref.label()})")
        return 0
    # explicit configuration
    if args.n is None or args.p is None:
        raise ParseError("simulate needs --preset or both --n and --p")
    cov = CovSpec(structure=args.structure, rho=args.rho, p=args.p)
    beta = np.zeros(args.p)
    k = args.k_test or 0
    beta[:k] = args.signal
    cfg = NullSimConfig(n=args.n, p=args.p, cov=cov, beta_star=beta, k_test=k,
                        alpha_list=tuple(_parse_alphas(args)), reps=args.reps,
                        seed=args.seed, sigma2_known=not args.estimate_sigma,
                        orthonormal_design=args.orthonormal)
    summary = mc_null_experiment(cfg)
    write_samples_csv(summary, outdir / "samples.csv")
    write_summary_json(summary, outdir / "summary.json")
    for a in cfg.alpha_list:
        mean, var, q95 = summary.stats(a)
        print(f"alpha={a:g}: mean={mean:.3f} var={var:.3f} q95={q95:.3f}")
    return 0


def cmd_qq(args) -> int:
    if args.preset in ("fig2", "fig3"):
        return cmd_simulate(args)
    if not args.samples:
        raise ParseError("qq needs --samples CSV or --preset fig2/fig3")
    vals = []
    with open(args.samples, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "T" not in reader.fieldnames:
            raise ParseError(f"{args.samples}: expected a 'T' column")
        for row in reader:
            if args.filter_alpha is not None and \
                    abs(float(row.get("alpha", "nan")) - args.filter_alpha) > 1e-9:
                continue
            vals.append(float(row["T"]))
    if not vals:
        raise ParseError("no samples matched")
    ref = ExpReference(args.rate)
    pairs = qq_data(np.asarray(vals), ref)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / f"qq.{args.format}"
    _write_rows(out, ["theoretical", "empirical"],
                [[f"{t:.12g}", f"{e:.12g}"] for t, e in pairs], args.format)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="enknots",
        description="Elastic net path knots, entry significance tests, and "
                    "null-distribution experiments")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("--input", help="dataset CSV (response first column)")
        p.add_argument("--alpha", action="append",
                       help="mixing parameter, repeatable or comma separated")
        p.add_argument("--alpha-grid", metavar="MIN:STEP",
                       help="full grid from 1 down to MIN in steps of STEP")
        p.add_argument("--K", type=int, help="number of knots to track")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=".", help="output directory")

    p_knots = sub.add_parser("knots", help="knot table per alpha")
    p_path = sub.add_parser("path", help="knot tables plus dense path samples")
    for p in (p_knots, p_path):
        common(p)
        p.add_argument("--refine", action="store_true",
                       help="fixed-point refinement of each knot")
        p.add_argument("--samples-per-segment", type=int, default=20)

    p_cov = sub.add_parser("covtest", help="entry significance table")
    common(p_cov)
    p_cov.add_argument("--preset", choices=("prostate",))
    g = p_cov.add_mutually_exclusive_group()
    g.add_argument("--sigma2", type=float, help="known noise variance")
    g.add_argument("--estimate-sigma", action="store_true",
                   help="estimate noise variance from the full LS fit")
    p_cov.set_defaults(demo_prostate=False)

    p_sim = sub.add_parser("simulate", help="Monte Carlo null experiments")
    common(p_sim, with_input=False)
    p_sim.add_argument("--preset", choices=("table1", "fig2", "fig3"))
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--p", type=int)
    p_sim.add_argument("--structure", choices=("identity", "cs", "ar1"),
                       default="identity")
    p_sim.add_argument("--rho", type=float, default=0.0)
    p_sim.add_argument("--k-test", dest="k_test", type=int)
    p_sim.add_argument("--signal", type=float, default=3.0)
    p_sim.add_argument("--orthonormal", action="store_true")
    p_sim.add_argument("--reps", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--estimate-sigma", action="store_true")

    p_qq = sub.add_parser("qq", help="quantile-quantile pairs")
    common(p_qq, with_input=False)
    p_qq.add_argument("--preset", choices=("fig2", "fig3"))
    p_qq.add_argument("--samples", help="samples CSV from simulate")
    p_qq.add_argument("--rate", type=float, default=1.0,
                      help="exponential reference rate")
    p_qq.add_argument("--filter-alpha", type=float)
    p_qq.add_argument("--k-test", dest="k_test", type=int)
    p_qq.add_argument("--reps", type=int, default=1000)
    p_qq.add_argument("--seed", type=int, default=0)

    p_demo = sub.add_parser("demo-prostate",
                            help="significance table for the bundled data")
    common(p_demo, with_input=False)
    p_demo.set_defaults(preset="prostate", input=None, sigma2=None,
                        estimate_sigma=True, demo_prostate=True)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if args.command == "knots":
                return cmd_knots(args, dense=False)
            if args.command == "path":
                return cmd_knots(args, dense=True)
            if args.command in ("covtest", "demo-prostate"):
                return cmd_covtest(args)
            if args.command == "simulate":
                return cmd_simulate(args)
            if args.command == "qq":
                return cmd_qq(args)
            raise ParseError(f"unknown command {args.command}")
    except (ParseError, DataFileMissing, ChecksumMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (TiedEntry, RankDeficientActiveSet, NotConverged) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except EnknotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
