"""Command-line interface.

Every command writes plain CSV reports into ``--out-dir`` together with

* ``config.ini``, the resolved parameters of the run (can be passed back
  through ``--config`` to repeat it), and
* ``meta.ini``, a sidecar with the wall-clock timestamp and package version.

Report CSVs contain no timestamps, so identical configurations produce
byte-identical reports. Errors are printed as a single line
``error: <CODE>: <message>`` on stderr; the exit status is 1 for data or
configuration problems and 2 for numerical failures.
"""

import argparse
import configparser
import csv
import datetime
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import load_csv, save_csv
from .exceptions import (
    ConfigError,
    DataFileMissing,
    NumericalError,
    ParcurError,
)
from .linalg import condition_number
from .model import (
    equivalence_gap,
    ir_predict,
    ir_train,
    load_model,
    mlr_predict,
    mlr_train,
    save_model,
)
from .synth import NOISE_REGIMES, PRESETS, generate_fop, generate_preset, polynomial_specs
from .tune import (
    DEFAULT_FOLDS,
    DEFAULT_REL_TOL,
    DEFAULT_WINDOW,
    SMOOTHING_THRESHOLD,
    VALIDATION_MODES,
    cross_validate,
    fit_plot_table,
    prepare_training,
    regularize,
    remove_predictors,
    rho,
)

CONFIG_SECTION = "parcur"
CONFIG_VERSION = 1
YARN_DEGREE = 5
YARN_EXPORT_HINT = (
    "export the Yarn data once from R (package 'pls'), see README section "
    "'Yarn data'; then pass the CSV with --data"
)


# --------------------------------------------------------------------------
# small helpers


def parse_degree_grid(text):
    """Parse ``"2:20"`` (inclusive range), ``"2:20:2"`` or ``"3,5,7"``."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [int(v) for v in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            grid = list(range(lo, hi + 1, step))
        else:
            grid = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse degree grid {text!r}") from None
    if not grid or min(grid) < 1:
        raise ConfigError(f"degree grid {text!r} must list positive integers")
    return tuple(sorted(set(grid)))


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_table(path, header, rows):
    """Write a CSV report with deterministic float formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_ini(path, sections):
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    for name, values in sections.items():
        cp[name] = {k: _fmt(v) for k, v in values.items()}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        cp.write(fh)
    return path


def _safe_rho(actual, predicted):
    try:
        return rho(actual, predicted)
    except ParcurError:
        return float("nan")


# --------------------------------------------------------------------------
# data access shared by the commands


def load_data(args):
    """Return ``(train, test, manifest)`` from ``--data`` or ``--preset``."""
    if getattr(args, "data", None):
        path = Path(args.data)
        if not path.exists():
            raise DataFileMissing(f"{path} does not exist")
        train, test = load_csv(path, args.y_column, split_column=args.split_column)
        if getattr(args, "test_data", None):
            test, _ = load_csv(args.test_data, args.y_column, predictor_columns=list(train.column_ids))
        return train, test, None
    if getattr(args, "preset", None):
        noise = None if args.noise is None else args.noise
        train, test, manifest = generate_preset(
            args.preset, seed=args.seed, n_train=args.n_train, n_test=args.n_test,
            sigma=args.sigma, regime=noise,
        )
        return train, test, manifest
    raise ConfigError("give either --data or --preset")


def _check_split(split):
    if split is None:
        return None
    split = str(split)
    return None if split.lower() in ("", "none") else split


# --------------------------------------------------------------------------
# commands


def cmd_generate(args):
    train, test, manifest = load_data(args)
    out = Path(args.out_dir)
    save_csv(out / "data.csv", train, test if test is not None and test.n else None)
    manifest.save(out / "manifest.ini")
    write_table(
        out / "columns.csv",
        ["column", "kind", "degree", "noisy"],
        [(cid, manifest.kinds[j], manifest.degrees[j], j in set(manifest.noisy_columns))
         for j, cid in enumerate(manifest.column_ids)],
    )
    return {"n_train": train.n, "n_test": 0 if test is None else test.n, "p": train.p,
            "q": manifest.q}


def cmd_fit(args):
    train, test, _ = load_data(args)
    out = Path(args.out_dir)
    reg = regularize(
        train, degree=args.degree, r_grid=args.degree_grid, folds=args.folds, seed=args.seed,
        window=args.window, threshold=args.threshold, smooth=_smooth_flag(args.smooth),
        validation=args.validation,
    )
    save_model(reg.model, out / "model.ini")
    cols = reg.model.retained[: args.plot_columns]
    write_table(out / "fit_plot.csv", ["column", "y", "x", "x_fit"],
                fit_plot_table(reg.model, reg.train, cols))
    if reg.cv is not None:
        _write_cv(out / "cv.csv", reg.cv)
    summary = {"degree": reg.model.degree, "strategy": reg.strategy, "smoothed": reg.smoothed,
               "n_train": train.n, "cond_basis": reg.model.cond}
    if test is not None:
        pred = ir_predict(reg.model, test.X)
        summary.update(rho_y_test=_safe_rho(test.y, pred.y_hat),
                       rho_X_test=_safe_rho(test.X, pred.X_hat))
    return summary


def cmd_predict(args):
    model_path = Path(args.model)
    if not model_path.exists():
        raise DataFileMissing(f"model file {model_path} does not exist")
    model = load_model(model_path)
    train, test, _ = load_data(args)
    target = test if test is not None else train
    pred = ir_predict(model, target.X)
    out = Path(args.out_dir)
    write_table(out / "predictions.csv", ["row", "y", "y_hat"],
                [(int(i), yv, yh) for i, yv, yh in zip(target.row_ids, target.y, pred.y_hat)])
    summary = {"rows": target.n, "degree": model.degree, "set": "test" if test is not None else "train",
               "rho_y": _safe_rho(target.y, pred.y_hat)}
    Xr = target.X[:, list(model.retained)] if target.p == model.n_columns else target.X
    summary["rho_X"] = _safe_rho(Xr, pred.X_hat)
    write_table(out / "errors.csv", ["set", "rho_y", "rho_X"],
                [(summary["set"], summary["rho_y"], summary["rho_X"])])
    return summary


def _smooth_flag(value):
    return {"auto": None, "on": True, "off": False}[value]


def _write_cv(path, cv, test_errors=None):
    header = ["r", "rho_y_v", "rho_X_v", "admissible"]
    rows = []
    for k, (r, ey, ex, ok) in enumerate(cv.table()):
        row = [r, ey, ex, ok]
        if test_errors is not None:
            row += list(test_errors[k])
        rows.append(row)
    if test_errors is not None:
        header += ["rho_y_t", "rho_X_t"]
    return write_table(path, header, rows)


def _test_errors_by_degree(train, test, grid):
    rows = []
    for r in grid:
        try:
            m = ir_train(train, r, max_degree=None)
            pred = ir_predict(m, test.X)
            rows.append((rho(test.y, pred.y_hat), rho(test.X, pred.X_hat)))
        except NumericalError:
            rows.append((float("nan"), float("nan")))
    return rows


def cmd_cv(args):
    train, test, _ = load_data(args)
    smooth = _smooth_flag(args.smooth)
    if smooth is None:
        smooth = train.n >= args.threshold
    prepared = prepare_training(train, smooth=smooth, window=args.window)
    grid = args.degree_grid
    cv = cross_validate(prepared, r_grid=grid, folds=args.folds, seed=args.seed,
                        validation=args.validation)
    test_errors = None
    if test is not None and test.n:
        test_errors = _test_errors_by_degree(prepared, test, cv.r_grid)
    out = Path(args.out_dir)
    _write_cv(out / "cv.csv", cv, test_errors)
    write_table(out / "cv_folds.csv", ["fold", "r", "rho_y_v", "rho_X_v"],
                [(k, r, cv.per_fold_y[k, i], cv.per_fold_X[k, i])
                 for k in range(cv.folds) for i, r in enumerate(cv.r_grid)])
    summary = {"r_star": cv.r_star, "folds": cv.folds, "fold_seed": cv.fold_seed,
               "smoothed": smooth, "validation": args.validation,
               "rho_X_v_min": float(np.min(cv.rho_X_v))}
    if test_errors is not None:
        i = cv.r_grid.index(cv.r_star)
        yt = np.array([e[0] for e in test_errors])
        summary.update(rho_y_t_at_r_star=yt[i], rho_y_t_min=float(np.nanmin(yt)))
    return summary


def cmd_select(args):
    train, test, manifest = load_data(args)
    if test is None or not test.n:
        raise ConfigError("select needs test predictors (X_t) to compute column errors")
    reg = regularize(
        train, degree=args.degree, r_grid=args.degree_grid, folds=args.folds, seed=args.seed,
        window=args.window, threshold=args.threshold, smooth=_smooth_flag(args.smooth),
        validation=args.validation,
    )
    model = reg.model
    pre = ir_predict(model, test.X)
    rep = remove_predictors(model, reg.train, test.X, rel_tol=args.rel_tol)
    kept = ir_train(reg.train, model.degree, retained=rep.retained,
                    y_transform=model.y_transform, max_degree=None)
    post = ir_predict(kept, test.X)

    out = Path(args.out_dir)
    if reg.cv is not None:
        _write_cv(out / "cv.csv", reg.cv)
    trace_rows = []
    base = np.array(model.retained)
    score = np.where(np.isnan(rep.chi[base]), np.inf, rep.chi[base])
    for tau, count, err in rep.tau_trace:
        keep = base[score < tau] if np.isfinite(tau) else base
        try:
            mk = ir_train(reg.train, model.degree, retained=keep,
                          y_transform=model.y_transform, max_degree=None)
            err_t = rho(test.y, ir_predict(mk, test.X).y_hat)
        except NumericalError:
            err_t = float("nan")
        trace_rows.append((tau, count, err, err_t))
    write_table(out / "removal_trace.csv", ["tau", "retained", "rho_y_train", "rho_y_test"],
                trace_rows)
    retained = set(rep.retained)
    improper = set(manifest.improper_columns) if manifest is not None else set()
    header = ["column", "chi", "retained"] + (["improper"] if manifest is not None else [])
    rows = []
    for j, cid in enumerate(train.column_ids):
        row = [cid, rep.chi[j], j in retained]
        if manifest is not None:
            row.append(j in improper)
        rows.append(row)
    write_table(out / "columns.csv", header, rows)
    summary = {
        "degree": model.degree, "strategy": reg.strategy, "tau_opt": rep.tau_opt,
        "rel_tol": args.rel_tol, "retained": len(rep.retained), "removed": len(rep.removed),
        "rho_y_test_before": rho(test.y, pre.y_hat), "rho_y_test_after": rho(test.y, post.y_hat),
    }
    if manifest is not None:
        clean = set(range(train.p)) - improper
        summary.update(
            improper_retained=len(improper & retained),
            improper_total=len(improper),
            clean_retained_fraction=len(clean & retained) / max(len(clean), 1),
        )
    return summary


def sweep_rank(train, test, sizes):
    """Square-basis IR and MLR errors as the training set grows.

    For each ``n`` in ``sizes`` both models are trained on the first ``n``
    rows of ``train``. Errors are reported on the test set and on the
    remaining (unused) rows of ``train``.
    """
    rows = []
    for n in sizes:
        fit = train.take_rows(np.arange(n))
        pool = train.take_rows(np.arange(n, train.n)) if n < train.n else None
        row = {"n": n, "ir_ok": False, "cond_basis": float("nan"), "cond_A": float("nan")}
        for tag in ("test", "pool"):
            row[f"ir_y_{tag}"] = row[f"ir_X_{tag}"] = float("nan")
        try:
            ir = ir_train(fit, n, max_degree=None)
            row["cond_basis"] = ir.cond
            row["cond_A"] = condition_number(ir.A)
            for tag, d in (("test", test), ("pool", pool)):
                if d is not None:
                    p = ir_predict(ir, d.X)
                    row[f"ir_y_{tag}"] = rho(d.y, p.y_hat)
                    row[f"ir_X_{tag}"] = rho(d.X, p.X_hat)
            row["ir_ok"] = True
        except NumericalError:
            pass
        try:
            mlr = mlr_train(fit)
            for tag, d in (("test", test), ("pool", pool)):
                if d is None:
                    row[f"mlr_y_{tag}"] = row[f"mlr_X_{tag}"] = float("nan")
                    continue
                yh, Xh = mlr_predict(mlr, d.X, fit)
                row[f"mlr_y_{tag}"] = rho(d.y, yh)
                row[f"mlr_X_{tag}"] = rho(d.X, Xh)
        except NumericalError:
            for tag in ("test", "pool"):
                row[f"mlr_y_{tag}"] = row[f"mlr_X_{tag}"] = float("nan")
        rows.append(row)
    return rows


SWEEP_COLUMNS = [
    "n", "ir_ok", "cond_basis", "cond_A",
    "ir_y_pool", "ir_X_pool", "ir_y_test", "ir_X_test",
    "mlr_y_pool", "mlr_X_pool", "mlr_y_test", "mlr_X_test",
]


def cmd_sweep_rank(args):
    train, test, manifest = load_data(args)
    if test is None or not test.n:
        raise ConfigError("sweep-rank needs test data")
    hi = args.max_rank or min(train.n - 1, (manifest.q + 4) if manifest is not None else 20)
    sizes = range(2, min(hi, train.n) + 1)
    rows = sweep_rank(train, test, sizes)
    write_table(Path(args.out_dir) / "sweep.csv", SWEEP_COLUMNS,
                [[r[c] for c in SWEEP_COLUMNS] for r in rows])
    summary = {"sizes": f"2..{sizes[-1]}"}
    if manifest is not None:
        summary["q"] = manifest.q
    return summary


def equivalence_instances(count, seed, sizes=range(3, 13), p=30, n_test=10):
    """``(instance, n, seed, gap)`` for ``count`` random square-basis problems.

    Each instance has polynomial columns of degree up to at least ``n - 1``
    so that the ``n`` training rows of ``X`` are linearly independent.
    """
    rng = np.random.default_rng(seed)
    sizes = list(sizes)
    out = []
    for i in range(count):
        n = int(sizes[i % len(sizes)])
        degree = n - 1 + int(rng.integers(0, 4))
        specs = polynomial_specs(count=p, max_degree=degree)
        inst_seed = int(rng.integers(2**31))
        train, test, _ = generate_fop(specs, n, n_test, inst_seed)
        out.append((i, n, inst_seed, equivalence_gap(train, test.X)))
    return out


def cmd_equiv(args):
    rows = equivalence_instances(args.instances, args.seed)
    write_table(Path(args.out_dir) / "equiv.csv", ["instance", "n", "seed", "gap"], rows)
    gaps = np.array([r[3] for r in rows])
    return {"instances": len(rows), "max_gap": float(gaps.max())}


def cmd_reproduce_yarn(args):
    if not args.data:
        raise DataFileMissing(f"no Yarn CSV given; {YARN_EXPORT_HINT}")
    path = Path(args.data)
    if not path.exists():
        raise DataFileMissing(f"{path} not found; {YARN_EXPORT_HINT}")
    train, test = load_csv(path, args.y_column, split_column=args.split_column)
    if test is None:
        raise ConfigError("the Yarn CSV must mark test rows in the split column")
    degree = args.degree or YARN_DEGREE
    reg = regularize(train, degree=degree, threshold=args.threshold,
                     smooth=_smooth_flag(args.smooth), window=args.window)
    model = reg.model
    pre = ir_predict(model, test.X)
    rep = remove_predictors(model, reg.train, test.X, rel_tol=args.rel_tol)
    kept = ir_train(reg.train, degree, retained=rep.retained, y_transform=model.y_transform,
                    max_degree=None)
    post = ir_predict(kept, test.X)
    out = Path(args.out_dir)
    retained = set(rep.retained)
    write_table(out / "bands.csv", ["column", "chi", "retained"],
                [(cid, rep.chi[j], j in retained) for j, cid in enumerate(train.column_ids)])
    write_table(out / "removal_trace.csv", ["tau", "retained", "rho_y_train"], rep.tau_trace)
    write_table(out / "scatter.csv", ["row", "y", "y_hat_all", "y_hat_retained"],
                [(int(i), a, b, c) for i, a, b, c in zip(test.row_ids, test.y, pre.y_hat, post.y_hat)])
    write_table(out / "fit_plot.csv", ["column", "y", "x", "x_fit"],
                fit_plot_table(model, reg.train, model.retained[:: max(1, args.plot_stride)]))
    return {"degree": degree, "n_train": train.n, "n_test": test.n,
            "rho_y_test_before": rho(test.y, pre.y_hat), "rho_y_test_after": rho(test.y, post.y_hat),
            "retained": len(rep.retained), "tau_opt": rep.tau_opt}


# --------------------------------------------------------------------------
# optional plots


def render_plots(command, out_dir):
    """Render SVG figures from the CSV reports (needs matplotlib)."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise ConfigError("--render-plots needs matplotlib (pip install parcur[plots])") from None
    out = Path(out_dir)
    plt.rcParams["svg.hashsalt"] = "parcur"

    def table(name):
        with (out / name).open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        head, body = rows[0], rows[1:]
        return {h: [r[i] for r in body] for i, h in enumerate(head)}

    def num(values):
        return np.array([float(v) for v in values])

    def save(fig, name):
        fig.tight_layout()
        fig.savefig(out / name, metadata={"Date": None})
        plt.close(fig)

    if command == "sweep-rank":
        t = table("sweep.csv")
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
        for ax, var in zip(axes, ("y", "X")):
            for key, style in ((f"ir_{var}_pool", "-"), (f"ir_{var}_test", "--"),
                               (f"mlr_{var}_test", ":")):
                ax.semilogy(num(t["n"]), num(t[key]), style, label=key)
            ax.set_xlabel("n = r")
            ax.legend(fontsize=7)
        save(fig, "sweep.svg")
    elif command in ("cv", "fit", "select") and (out / "cv.csv").exists():
        t = table("cv.csv")
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
        axes[0].semilogy(num(t["r"]), num(t["rho_y_v"]), label="rho(y_v)")
        axes[1].semilogy(num(t["r"]), num(t["rho_X_v"]), label="rho(X_v)")
        if "rho_y_t" in t:
            axes[0].semilogy(num(t["r"]), num(t["rho_y_t"]), "--", label="rho(y_t)")
            axes[1].semilogy(num(t["r"]), num(t["rho_X_t"]), "--", label="rho(X_t)")
        for ax in axes:
            ax.set_xlabel("r")
            ax.legend(fontsize=7)
        save(fig, "cv.svg")
    if command in ("select", "reproduce-yarn"):
        t = table("removal_trace.csv")
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.semilogx(num(t["tau"]), num(t["rho_y_train"]), label="rho(y)")
        if "rho_y_test" in t:
            ax.semilogx(num(t["tau"]), num(t["rho_y_test"]), "--", label="rho(y_t)")
        ax.set_xlabel("tau")
        ax.legend(fontsize=7)
        save(fig, "removal.svg")


# --------------------------------------------------------------------------
# argument parsing


COMMANDS = {
    "generate": cmd_generate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "cv": cmd_cv,
    "select": cmd_select,
    "sweep-rank": cmd_sweep_rank,
    "equiv": cmd_equiv,
    "reproduce-yarn": cmd_reproduce_yarn,
}


def _add_common(p):
    p.add_argument("--config", help="INI file with a [parcur] section; flags override it")
    p.add_argument("--out-dir", default="parcur-out", help="directory for reports")
    p.add_argument("--seed", type=int, default=0, help="seed for data generation and CV folds")
    p.add_argument("--render-plots", action="store_true", help="also write SVG figures")


def _add_data(p, preset=True):
    g = p.add_argument_group("data")
    g.add_argument("--data", help="CSV file (header row, one column per variable)")
    g.add_argument("--test-data", help="separate CSV with test rows")
    g.add_argument("--y-column", default="y", help="name of the dependent variable column")
    g.add_argument("--split-column", default="split", type=_check_split,
                   help="column with train/test labels ('none' to disable)")
    if preset:
        g.add_argument("--preset", choices=sorted(PRESETS), help="synthetic experiment setup")
        g.add_argument("--noise", choices=NOISE_REGIMES, default=None,
                       help="override the preset noise regime")
        g.add_argument("--sigma", type=float, default=None, help="override the noise level")
        g.add_argument("--n-train", type=int, default=150)
        g.add_argument("--n-test", type=int, default=50)


def _add_degree(p, grid=True):
    g = p.add_argument_group("degree selection")
    g.add_argument("--degree", type=int, default=None,
                   help="fixed number of basis terms r (skips CV)")
    if grid:
        g.add_argument("--degree-grid", type=parse_degree_grid, default=parse_degree_grid("2:20"),
                       help="CV grid, e.g. 2:20 or 3,5,7")
        g.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
        g.add_argument("--validation", choices=VALIDATION_MODES, default="curve",
                       help="how held-out X is predicted during CV")
    g.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="Wiener filter window")
    g.add_argument("--threshold", type=int, default=SMOOTHING_THRESHOLD,
                   help="sample count from which smoothing and CV are used")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="parcur",
        description="Polynomial hyper-curve (IR) regression for overparameterized data.",
    )
    parser.add_argument("--version", action="version", version=f"parcur {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset and its manifest")
    _add_common(p)
    _add_data(p)

    p = sub.add_parser("fit", help="train an IR model (manual degree or CV)")
    _add_common(p)
    _add_data(p)
    _add_degree(p)
    p.add_argument("--smooth", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--plot-columns", type=int, default=20,
                   help="number of columns written to fit_plot.csv")

    p = sub.add_parser("predict", help="predict with a saved model")
    _add_common(p)
    _add_data(p)
    p.add_argument("--model", required=False, default="model.ini")

    p = sub.add_parser("cv", help="cross-validate the polynomial degree")
    _add_common(p)
    _add_data(p)
    _add_degree(p)
    p.add_argument("--smooth", choices=("auto", "on", "off"), default="off")

    p = sub.add_parser("select", help="regularize and remove improper predictors")
    _add_common(p)
    _add_data(p)
    _add_degree(p)
    p.add_argument("--smooth", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL,
                   help="tolerance for the leftmost near-minimal threshold")

    p = sub.add_parser("sweep-rank", help="errors versus training size for a square basis")
    _add_common(p)
    _add_data(p)
    p.add_argument("--max-rank", type=int, default=None)

    p = sub.add_parser("equiv", help="MLR vs square-basis IR on random instances")
    _add_common(p)
    p.add_argument("--instances", type=int, default=100)

    p = sub.add_parser("reproduce-yarn", help="run the Yarn NIR pipeline on an exported CSV")
    _add_common(p)
    _add_data(p, preset=False)
    _add_degree(p, grid=False)
    p.set_defaults(y_column="density")
    p.add_argument("--smooth", choices=("auto", "on", "off"), default="off")
    p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    p.add_argument("--plot-stride", type=int, default=1)
    return parser, sub


def _config_defaults(path, subparser):
    """Read ``[parcur]`` (and ``[<command>]``) values typed like the CLI flags."""
    path = Path(path)
    if not path.exists():
        raise DataFileMissing(f"config file {path} does not exist")
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    actions = {a.dest: a for a in subparser._actions}
    values = {}
    for section in (CONFIG_SECTION, subparser.prog.split()[-1]):
        if not cp.has_section(section):
            continue
        for key, raw in cp.items(section):
            dest = key.replace("-", "_")
            if dest in ("config", "command", "config_version"):
                continue
            if dest not in actions:
                raise ConfigError(f"{path}: unknown setting {key!r}")
            action = actions[dest]
            if raw.strip().lower() in ("", "none"):
                values[dest] = None
            elif isinstance(action, argparse._StoreTrueAction):
                values[dest] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                try:
                    values[dest] = action.type(raw)
                except (TypeError, ValueError):
                    raise ConfigError(f"{path}: bad value {raw!r} for {key}") from None
            else:
                values[dest] = raw
            if action.choices is not None and values[dest] is not None \
                    and values[dest] not in action.choices:
                raise ConfigError(f"{path}: {key} must be one of {list(action.choices)}")
    return values


def parse_args(argv=None):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        subparser = sub.choices[args.command]
        subparser.set_defaults(**_config_defaults(args.config, subparser))
        args = parser.parse_args(argv)
    return args


def config_echo(args):
    """Resolved settings in the ``--config`` file format."""
    values = {"config_version": CONFIG_VERSION, "command": args.command}
    for key in sorted(vars(args)):
        if key in ("config", "command"):
            continue
        v = getattr(args, key)
        if v is None:
            v = "none"
        elif isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        values[key.replace("_", "-")] = v
    return {CONFIG_SECTION: values}


def run(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_ini(out / "config.ini", config_echo(args))
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        summary = COMMANDS[args.command](args)
    write_ini(out / "summary.ini", {"summary": {"format": "parcur-summary", "version": 1,
                                                "command": args.command, **summary}})
    if args.render_plots:
        render_plots(args.command, out)
    write_ini(out / "meta.ini", {"meta": {
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "parcur_version": __version__,
        "numpy_version": np.__version__,
    }})
    return summary


def main(argv=None):
    try:
        args = parse_args(argv)
        summary = run(args)
    except ParcurError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, NumericalError) else 1
    except OSError as exc:
        print(f"error: IO_ERROR: {exc}", file=sys.stderr)
        return 1
    for key, value in summary.items():
        print(f"{key} = {_fmt(value)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
