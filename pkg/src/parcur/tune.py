"""Error metrics, degree-truncation regularization and predictor removal.

Hyper-parameters are tuned on disjoint parts of the data:

* the degree ``r*`` on the training ``X`` data (10-fold CV of ``rho(X_v)``),
* which predictors to drop on the test ``X`` data (column errors ``chi``),
* the removal threshold ``tau_opt`` on the training ``y`` data.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import uniform_filter1d

from .basis import column_fit_eval
from .dataset import DataSet, sort_rows
from .exceptions import (
    AllRemoved,
    ConfigError,
    ManualDegreeRequired,
    NumericalError,
    RankDeficient,
    ZeroNorm,
)
from .model import ir_predict, ir_train

SMOOTHING_THRESHOLD = 150
DEFAULT_WINDOW = 15
DEFAULT_FOLDS = 10
DEFAULT_REL_TOL = 0.05
DEFAULT_R_GRID = tuple(range(2, 21))


def rho(actual, predicted):
    """Relative error ``||actual - predicted|| / ||actual||`` (2-norm or Frobenius)."""
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape:
        raise ValueError(f"shape mismatch {actual.shape} vs {predicted.shape}")
    den = np.linalg.norm(actual)
    if den == 0.0:
        raise ZeroNorm("reference data is identically zero")
    return float(np.linalg.norm(actual - predicted) / den)


@dataclass(frozen=True)
class ErrorReport:
    rho_y: float
    rho_X: float
    context: str = "test"


def error_report(y, y_hat, X, X_hat, context="test"):
    return ErrorReport(rho(y, y_hat), rho(X, X_hat), context)


def wiener_smooth(y_sorted, window=DEFAULT_WINDOW):
    """Local adaptive (Wiener) smoothing of a sorted 1-D signal.

    Within a sliding window the output is
    ``mean + max(0, var - noise) / var * (y - mean)``, with the noise power
    estimated as the median of the local variances. Edges are reflected.
    """
    y = np.asarray(y_sorted, dtype=float)
    window = int(window)
    if window % 2 == 0 or not 3 <= window <= y.shape[0]:
        raise ConfigError(f"window must be odd with 3 <= window <= {y.shape[0]}, got {window}")
    mean = uniform_filter1d(y, window, mode="reflect")
    var = uniform_filter1d(y * y, window, mode="reflect") - mean**2
    var = np.maximum(var, 0.0)
    noise = float(np.median(var))
    gain = np.zeros_like(var)
    ok = var > 0
    gain[ok] = np.maximum(var[ok] - noise, 0.0) / var[ok]
    return mean + gain * (y - mean)


def prepare_training(d, smooth=False, window=DEFAULT_WINDOW, sort_key="y"):
    """Sort the training rows and optionally replace ``y`` by its smoothed version.

    ``sort_key`` may name a predictor column known to be monotone in ``y``.
    After smoothing, rows are re-sorted by the smoothed ``y``.
    """
    d = sort_rows(d, sort_key)
    if not smooth:
        return d
    return sort_rows(d.with_y(wiener_smooth(d.y, window)), "y")


@dataclass(eq=False)
class CvReport:
    r_grid: tuple
    rho_y_v: np.ndarray
    rho_X_v: np.ndarray
    r_star: int
    folds: int
    fold_seed: int
    fold_of_row: np.ndarray = field(repr=False, default=None)
    per_fold_X: np.ndarray = field(repr=False, default=None)
    per_fold_y: np.ndarray = field(repr=False, default=None)
    rank_deficient: tuple = ()

    def table(self):
        """Rows ``(r, rho_y_v, rho_X_v, admissible)``."""
        return [
            (r, float(ey), float(ex), r not in self.rank_deficient)
            for r, ey, ex in zip(self.r_grid, self.rho_y_v, self.rho_X_v)
        ]


def fold_assignment(n, folds, seed):
    """Fold index of every row: one seeded shuffle cut into contiguous blocks."""
    order = np.random.default_rng(seed).permutation(n)
    fold_of_row = np.empty(n, dtype=int)
    for k, block in enumerate(np.array_split(order, folds)):
        fold_of_row[block] = k
    return fold_of_row


VALIDATION_MODES = ("projection", "curve", "fit")


def validation_prediction(m, val, mode="curve"):
    """Predict held-out ``(y, X)`` with a fold model.

    ``y_v`` is always the fitted ``y`` column evaluated at the validation
    parameter, i.e. the basis reproduction of ``y`` (exact for any degree
    ``>= 2`` up to rounding). ``mode`` selects how ``X_v`` is predicted:

    ``curve``
        Predict ``y`` from ``X_v`` through the full prediction path, then
        evaluate every column polynomial at that predicted ``y``.
    ``projection``
        ``X_v A^T (A A^T)^{-1} A``, the projection onto the row space of ``A``.
    ``fit``
        Column polynomials evaluated at the known validation ``y``.
    """
    s = m.y_transform.apply(val.y, warn=False)
    y_hat = m.y_transform.invert(column_fit_eval(m.a0, s))
    if mode == "fit":
        return y_hat, column_fit_eval(m.A, s)
    pred = ir_predict(m, val.X)
    if mode == "projection":
        return y_hat, pred.X_hat
    if mode == "curve":
        s_hat = m.y_transform.apply(pred.y_hat, warn=False)
        return y_hat, column_fit_eval(m.A, s_hat)
    raise ConfigError(f"unknown validation mode {mode!r}; choose from {VALIDATION_MODES}")


def cross_validate(d_train, r_grid=DEFAULT_R_GRID, folds=DEFAULT_FOLDS, seed=0,
                   validation="curve"):
    """K-fold CV of the IR model over polynomial degrees.

    For each fold and degree the model is trained on the other folds and
    the held-out rows are predicted as described in
    :func:`validation_prediction` (``validation`` selects the mode). Errors are averaged over folds; ``r_star`` minimizes the
    mean ``rho(X_v)`` (ties go to the smaller degree). Degrees for which a
    fold model is rank deficient get infinite error.
    """
    r_grid = tuple(sorted({int(r) for r in r_grid}))
    n = d_train.n
    if not r_grid or r_grid[0] < 1:
        raise ConfigError("degree grid must contain positive integers")
    if folds < 2 or n < folds:
        raise ConfigError(f"need 2 <= folds <= n, got folds={folds}, n={n}")
    fold_of_row = fold_assignment(n, folds, seed)
    min_train = n - np.bincount(fold_of_row).max()
    if r_grid[-1] > min_train:
        raise ConfigError(f"largest degree {r_grid[-1]} exceeds smallest fold training size "
                          f"{min_train}")

    ey = np.full((folds, len(r_grid)), np.inf)
    ex = np.full((folds, len(r_grid)), np.inf)
    deficient = set()
    for k in range(folds):
        held = fold_of_row == k
        fit, val = d_train.take_rows(np.flatnonzero(~held)), d_train.take_rows(np.flatnonzero(held))
        if np.ptp(fit.y) == 0 or np.linalg.norm(val.y) == 0 or np.linalg.norm(val.X) == 0:
            raise ConfigError(f"fold {k} is degenerate")
        for i, r in enumerate(r_grid):
            try:
                m = ir_train(fit, r, max_degree=None)
                y_hat, X_hat = validation_prediction(m, val, validation)
            except NumericalError:
                deficient.add(r)
                continue
            ey[k, i] = rho(val.y, y_hat)
            ex[k, i] = rho(val.X, X_hat)
    mean_y = ey.mean(axis=0)
    mean_x = ex.mean(axis=0)
    if not np.any(np.isfinite(mean_x)):
        raise RankDeficient("every degree in the grid is rank deficient")
    r_star = r_grid[int(np.argmin(mean_x))]
    return CvReport(
        r_grid=r_grid, rho_y_v=mean_y, rho_X_v=mean_x, r_star=r_star, folds=folds,
        fold_seed=seed, fold_of_row=fold_of_row, per_fold_X=ex, per_fold_y=ey,
        rank_deficient=tuple(sorted(deficient)),
    )


@dataclass(eq=False)
class Regularization:
    model: object
    train: DataSet
    cv: CvReport = None
    smoothed: bool = False
    window: int = DEFAULT_WINDOW
    strategy: str = "auto"


def regularize(d_train, degree=None, r_grid=DEFAULT_R_GRID, folds=DEFAULT_FOLDS, seed=0,
               window=DEFAULT_WINDOW, threshold=SMOOTHING_THRESHOLD, sort_key="y",
               smooth=None, validation="curve"):
    """Sort/smooth the training data and fix the polynomial degree.

    With ``n < threshold`` the rows are only sorted and the degree must be
    chosen by hand (``degree``); inspect :func:`fit_plot_table` to choose
    it. With ``n >= threshold`` the sorted ``y`` is Wiener-smoothed, rows
    are re-sorted by it and, unless ``degree`` is given, the degree comes
    from :func:`cross_validate`.

    Raises
    ------
    ManualDegreeRequired
        ``n < threshold`` and no ``degree``.
    """
    large = d_train.n >= threshold
    if smooth is None:
        smooth = large
    if not large and degree is None:
        raise ManualDegreeRequired(
            f"n={d_train.n} < {threshold}: choose the degree by inspecting column fits"
        )
    train = prepare_training(d_train, smooth=smooth, window=window, sort_key=sort_key)
    cv = None
    if degree is None:
        cv = cross_validate(train, r_grid=r_grid, folds=folds, seed=seed, validation=validation)
        degree = cv.r_star
    model = ir_train(train, degree, max_degree=None)
    return Regularization(model=model, train=train, cv=cv, smoothed=smooth, window=window,
                          strategy="manual" if cv is None else "auto")


def fit_plot_table(model, d, columns=None):
    """Rows ``(column_id, y, x, x_fit)`` for plotting each column against its fit."""
    cols = model.retained if columns is None else columns
    s = model.y_transform.apply(d.y, warn=False)
    pos = {j: i for i, j in enumerate(model.retained)}
    rows = []
    for j in cols:
        fit = column_fit_eval(model.A[:, pos[j]], s)
        for yv, xv, fv in zip(d.y, d.X[:, j], fit):
            rows.append((d.column_ids[j], float(yv), float(xv), float(fv)))
    return rows


def column_errors(m, X_t):
    """Relative test error ``chi_j`` of every predictor column.

    Returns a length-``n_columns`` array; entries of columns the model does
    not retain, and of all-zero test columns, are NaN.
    """
    X_t = np.atleast_2d(np.asarray(X_t, dtype=float))
    pred = ir_predict(m, X_t)
    Xr = X_t[:, list(m.retained)] if X_t.shape[1] == m.n_columns else X_t
    chi = np.full(m.n_columns, np.nan)
    num = np.linalg.norm(pred.X_hat - Xr, axis=0)
    den = np.linalg.norm(Xr, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(den > 0, num / den, np.nan)
    chi[list(m.retained)] = vals
    return chi


@dataclass(eq=False)
class RemovalReport:
    chi: np.ndarray
    tau_trace: list
    tau_opt: float
    retained: tuple
    rel_tol: float = DEFAULT_REL_TOL
    skipped: list = field(default_factory=list)

    @property
    def removed(self):
        return tuple(j for j in range(len(self.chi)) if j not in set(self.retained))


def remove_predictors(m, d_train, X_t, rel_tol=DEFAULT_REL_TOL):
    """Threshold sweep over column errors to discard improper predictors.

    ``chi`` is computed once from the test predictors. For every distinct
    ``chi`` value ``tau`` (and ``inf``) the columns with ``chi < tau`` are
    kept, the model is refitted at the same degree, and the feature-removal
    error is ``rho(y, y_hat)`` on the training data with ``y_hat`` predicted
    from the training predictors. ``tau_opt`` is the smallest ``tau`` whose
    error is within ``rel_tol`` (relative) of the minimum.

    Returns
    -------
    RemovalReport
        ``tau_trace`` holds ``(tau, retained_count, rho_y_train)`` per
        threshold, with ``inf`` error where the refit was rank deficient.
    """
    if rel_tol < 0:
        raise ConfigError("rel_tol must be non-negative")
    chi = column_errors(m, X_t)
    base = np.array(m.retained)
    score = np.where(np.isnan(chi[base]), np.inf, chi[base])
    taus = list(np.unique(score[np.isfinite(score)])) + [np.inf]
    trace, skipped = [], []
    for tau in taus:
        keep = base[score < tau] if np.isfinite(tau) else base
        if keep.size == 0:
            skipped.append((float(tau), AllRemoved.code))
            continue
        try:
            mk = ir_train(d_train, m.degree, retained=keep, y_transform=m.y_transform,
                          max_degree=None)
            err = rho(d_train.y, ir_predict(mk, d_train.X).y_hat)
        except NumericalError as exc:
            skipped.append((float(tau), exc.code))
            err = np.inf
        trace.append((float(tau), int(keep.size), float(err)))
    errs = np.array([t[2] for t in trace])
    if not np.any(np.isfinite(errs)):
        raise AllRemoved("no threshold leaves a usable predictor set")
    best = errs.min()
    tau_opt = min(t[0] for t in trace if t[2] <= best * (1.0 + rel_tol))
    keep = base[score < tau_opt] if np.isfinite(tau_opt) else base
    return RemovalReport(chi=chi, tau_trace=trace, tau_opt=float(tau_opt),
                         retained=tuple(int(j) for j in keep), rel_tol=rel_tol,
                         skipped=skipped)
