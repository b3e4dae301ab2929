"""Minimum-norm MLR and inverse-regression (hyper-curve) models.

The inverse-regression (IR) model treats every predictor column as a
polynomial in the normalized dependent variable ``s``::

    X ~ V(s) A,   s = V(s) a0

Training is an OLS fit of ``[s, X]`` on the monomial basis ``V``.
Prediction recovers the basis rows of unseen samples from their predictor
values, ``V_t = argmin ||X_t - V_t A||``, and reads ``y`` off ``V_t a0``.
"""

import configparser
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .basis import MAX_DEGREE, has_duplicates, vandermonde
from .dataset import DataSet, YTransform
from .exceptions import (
    ConfigError,
    DuplicateParameter,
    ParseError,
    RankDeficient,
    ShapeError,
)
from .linalg import as_matrix, min_norm_solve, numerical_rank, ols_solve

MODEL_FORMAT = "parcur-ir-model"
MODEL_VERSION = 1


@dataclass(frozen=True, eq=False)
class MlrModel:
    beta: np.ndarray
    n: int
    p: int
    cond: float


def mlr_train(d):
    """Minimum-norm least-squares MLR fit ``beta = X^+ y``."""
    beta, info = min_norm_solve(d.X, d.y, full_output=True)
    return MlrModel(beta=beta, n=d.n, p=d.p, cond=info.cond)


def projection_coefficients(X, X_t):
    """``X_t X^T (X X^T)^{-1}``: coordinates of test rows in the training rows.

    Computed as the least-squares solution of ``X^T C^T = X_t^T``.
    """
    X = as_matrix(X, "X")
    X_t = as_matrix(X_t, "X_t")
    if X_t.shape[1] != X.shape[1]:
        raise ShapeError(f"test data has {X_t.shape[1]} columns, training has {X.shape[1]}")
    return ols_solve(X.T, X_t.T).T


def mlr_predict(m, X_t, train):
    """Predict ``y`` and the projection of ``X_t`` onto the training row space.

    Returns ``(y_hat, X_hat)`` with ``y_hat = X_t beta`` and
    ``X_hat = X_t X^T (X X^T)^{-1} X``.
    """
    X_t = np.atleast_2d(np.asarray(X_t, dtype=float))
    if X_t.shape[1] != m.p:
        raise ShapeError(f"test data has {X_t.shape[1]} columns, model expects {m.p}")
    C = projection_coefficients(train.X, X_t)
    return C @ train.y, C @ train.X


class IrPrediction(NamedTuple):
    y_hat: np.ndarray
    X_hat: np.ndarray
    V_hat: np.ndarray


@dataclass(frozen=True, eq=False)
class IrModel:
    """A trained polynomial inverse-regression model.

    ``A`` holds the monomial coefficients of the retained predictor columns
    (one column per retained predictor), ``a0`` those of the normalized
    dependent variable. ``retained`` indexes the original predictor columns.
    """

    A: np.ndarray
    a0: np.ndarray
    degree: int
    y_transform: YTransform
    retained: tuple
    column_ids: tuple = ()
    n_columns: int = None
    basis_kind: str = "monomial"
    cond: float = 1.0
    n_train: int = 0
    data_rank: int = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_columns is None:
            object.__setattr__(self, "n_columns", len(self.retained))
        if self.A.shape != (self.degree, len(self.retained)):
            raise ShapeError(
                f"A has shape {self.A.shape}, expected ({self.degree}, {len(self.retained)})"
            )

    @property
    def A_n(self):
        return np.column_stack([self.a0, self.A])

    @property
    def retained_ids(self):
        if not self.column_ids:
            return tuple(str(j) for j in self.retained)
        return tuple(self.column_ids[j] for j in self.retained)

    def check_rank(self):
        """Raise :class:`RankDeficient` unless ``A A^T`` can be nonsingular.

        ``rank(A) <= rank(X_train)``, so a training matrix of numerical rank
        below the degree makes ``A`` rank deficient whatever round-off
        leaves in its trailing singular values.
        """
        if self.data_rank is not None and self.data_rank < self.degree:
            raise RankDeficient(
                f"training predictors have numerical rank {self.data_rank} < degree "
                f"{self.degree}; lower the degree or keep more predictors",
                rank=self.data_rank, required=self.degree,
            )


def ir_train(d, r, retained=None, y_transform=None, max_degree=MAX_DEGREE):
    """Fit the degree-``r`` monomial IR model to training data ``d``.

    ``y`` is mapped to ``[-1, 1]`` (``y_transform`` fitted on ``d.y`` unless
    given) and used as the basis parameter. For ``n == r`` the basis is
    square and the fit interpolates; for ``n > r`` it is an OLS fit.

    Raises
    ------
    DuplicateParameter
        Square basis with repeated ``y`` values.
    RankDeficient
        Basis matrix of numerical rank below ``r``.
    """
    r = int(r)
    if retained is None:
        retained = tuple(range(d.p))
    else:
        retained = tuple(int(j) for j in retained)
    if not retained:
        raise ConfigError("at least one predictor must be retained")
    if r > d.n:
        raise ConfigError(f"degree r={r} exceeds the number of training samples n={d.n}")
    if y_transform is None:
        y_transform = YTransform.fit(d.y)
    s = y_transform.apply(d.y, warn=False)
    if r == d.n and has_duplicates(s):
        raise DuplicateParameter("square monomial basis needs distinct y values")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        basis = vandermonde(s, r, max_degree=max_degree)
    X = d.X[:, list(retained)]
    An, info = ols_solve(basis.V, np.column_stack([s, X]), full_output=True)
    return IrModel(
        A=An[:, 1:],
        a0=An[:, 0],
        degree=r,
        y_transform=y_transform,
        retained=retained,
        column_ids=tuple(d.column_ids),
        n_columns=d.p,
        cond=info.cond,
        n_train=d.n,
        data_rank=numerical_rank(X),
    )


def _restrict(m, X_t):
    X_t = np.atleast_2d(np.asarray(X_t, dtype=float))
    k = len(m.retained)
    if X_t.shape[1] == m.n_columns:
        return X_t[:, list(m.retained)]
    if X_t.shape[1] == k:
        return X_t
    raise ShapeError(
        f"test data has {X_t.shape[1]} columns; model expects {m.n_columns} "
        f"(all) or {k} (retained: {', '.join(m.retained_ids[:8])}"
        f"{', ...' if k > 8 else ''})"
    )


def ir_predict(m, X_t, rank_tol=None):
    """Predict ``y``, ``X`` and the basis rows for test predictors ``X_t``.

    ``X_t`` may carry all original predictor columns or only the retained
    ones. ``V_hat = X_t A^T (A A^T)^{-1}`` is obtained as a least-squares
    solve; ``y_hat = V_hat a0`` is returned in original units.

    Raises
    ------
    RankDeficient
        If ``A`` has numerical rank below the degree.
    """
    Xr = _restrict(m, X_t)
    m.check_rank()
    V_hat = ols_solve(m.A.T, Xr.T, tol=rank_tol).T
    y_norm = V_hat @ m.a0
    return IrPrediction(
        y_hat=m.y_transform.invert(y_norm), X_hat=V_hat @ m.A, V_hat=V_hat
    )


def equivalence_gap(d_train, X_t, r=None):
    """Largest discrepancy between MLR and square-basis IR predictions.

    Both models see the same normalized ``y``; predictions are compared in
    original units. Only the square case ``n == r`` is admitted.
    """
    n = d_train.n
    if r is None:
        r = n
    if r != n:
        raise ConfigError(f"equivalence holds for a square basis only (r={r}, n={n})")
    ir = ir_train(d_train, r, max_degree=None)
    s = ir.y_transform.apply(d_train.y, warn=False)
    ref = DataSet(y=s, X=d_train.X, column_ids=d_train.column_ids)
    mlr = mlr_train(ref)
    y_mlr, X_mlr = mlr_predict(mlr, X_t, ref)
    y_mlr = ir.y_transform.invert(y_mlr)
    y_ir, X_ir, _ = ir_predict(ir, X_t)
    return float(max(np.max(np.abs(y_mlr - y_ir)), np.max(np.abs(X_mlr - X_ir))))


@dataclass(frozen=True)
class IncompletenessReport:
    """MLR prediction error on test rows outside the training row space.

    With ``S_t = U S_n + S_perp`` and ``S_perp S_n^T = 0`` the ``y`` part of
    the error is ``y_perp (1 + y^T (X X^T)^{-1} y)`` and the ``X`` part is
    ``X_perp + y_perp y^T (X X^T)^{-1} X``. The ``y`` error therefore
    vanishes exactly when ``y_perp = 0``.
    """

    residual_norm: float
    y_residual_norm: float
    X_residual_norm: float
    y_quadratic_form: float
    y_perp_norm: float
    X_perp_norm: float


def incompleteness_diagnostic(d_train, S_t):
    """Prediction error of the MLR model on test rows ``S_t = [y_t, X_t]``.

    Also returns ``y^T (X X^T)^{-1} y`` and the norms of the parts of
    ``S_t`` orthogonal to the rows of ``S_n = [y, X]``.
    """
    S_t = as_matrix(S_t, "S_t")
    y_t, X_t = S_t[:, 0], S_t[:, 1:]
    mlr = mlr_train(d_train)
    y_hat, X_hat = mlr_predict(mlr, X_t, d_train)
    # X X^T = R^T R with X^T = Q R, so y^T (X X^T)^{-1} y = ||R^{-T} y||^2.
    R = scipy.linalg.qr(d_train.X.T, mode="r")[0][: d_train.n]
    z = scipy.linalg.solve_triangular(R, d_train.y, trans="T")
    S_n = d_train.S
    U = ols_solve(S_n.T, S_t.T).T
    S_perp = S_t - U @ S_n
    ey = np.linalg.norm(y_t - y_hat)
    eX = np.linalg.norm(X_t - X_hat)
    return IncompletenessReport(
        residual_norm=float(np.hypot(ey, eX)),
        y_residual_norm=float(ey),
        X_residual_norm=float(eX),
        y_quadratic_form=float(z @ z),
        y_perp_norm=float(np.linalg.norm(S_perp[:, 0])),
        X_perp_norm=float(np.linalg.norm(S_perp[:, 1:])),
    )


def _fmt(values):
    return " ".join(f"{v:.17g}" for v in np.ravel(values))


def save_model(m, path):
    """Write ``m`` as a versioned key-value text file (17 significant digits)."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["model"] = {
        "format": MODEL_FORMAT,
        "version": str(MODEL_VERSION),
        "basis_kind": m.basis_kind,
        "degree": str(m.degree),
        "y_shift": f"{m.y_transform.shift:.17g}",
        "y_scale": f"{m.y_transform.scale:.17g}",
        "n_columns": str(m.n_columns),
        "n_train": str(m.n_train),
        "cond": f"{m.cond:.17g}",
        "data_rank": "" if m.data_rank is None else str(m.data_rank),
        "retained": " ".join(str(j) for j in m.retained),
        "column_ids": "\t".join(m.column_ids),
        "a0": _fmt(m.a0),
        "A_shape": f"{m.A.shape[0]} {m.A.shape[1]}",
        "A": _fmt(m.A),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        cp.write(fh)
    return path


def load_model(path):
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(Path(path).read_text(encoding="utf-8"))
        sec = cp["model"]
        if sec["format"] != MODEL_FORMAT:
            raise ParseError(f"{path}: not a model file (format {sec['format']!r})")
        if int(sec["version"]) > MODEL_VERSION:
            raise ParseError(f"{path}: unsupported model version {sec['version']}")
        rows, cols = (int(v) for v in sec["A_shape"].split())
        A = np.array([float(v) for v in sec["A"].split()]).reshape(rows, cols)
        ids = sec.get("column_ids", "")
        return IrModel(
            A=A,
            a0=np.array([float(v) for v in sec["a0"].split()]),
            degree=int(sec["degree"]),
            y_transform=YTransform(float(sec["y_shift"]), float(sec["y_scale"])),
            retained=tuple(int(v) for v in sec["retained"].split()),
            column_ids=tuple(ids.split("\t")) if ids else (),
            n_columns=int(sec["n_columns"]),
            basis_kind=sec.get("basis_kind", "monomial"),
            cond=float(sec["cond"]),
            n_train=int(sec.get("n_train", "0")),
            data_rank=int(sec["data_rank"]) if sec.get("data_rank") else None,
        )
    except (KeyError, ValueError, configparser.Error) as exc:
        raise ParseError(f"{path}: malformed model file ({exc})") from None
