"""Training/test data model, CSV ingestion and y normalization."""

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exceptions import (
    DegenerateRange,
    ExtrapolationWarning,
    NonFinite,
    ParseError,
    SchemaError,
    ShapeError,
)

UNSORTED = "unsorted"
SORTED_BY_Y = "sorted_by_y"

EXTRAPOLATION_LIMIT = 1.2


@dataclass(frozen=True, eq=False)
class DataSet:
    """A dependent-variable vector ``y`` paired with a predictor matrix ``X``.

    ``sort_state`` is ``"unsorted"``, ``"sorted_by_y"`` or
    ``"sorted_by_column:<id>"``.
    """

    y: np.ndarray
    X: np.ndarray
    column_ids: tuple = None
    y_name: str = "y"
    sort_state: str = UNSORTED
    row_ids: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        y = np.array(self.y, dtype=float).reshape(-1)
        X = np.array(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise ShapeError(f"X must be 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ShapeError(f"y has {y.shape[0]} entries but X has {X.shape[0]} rows")
        ids = self.column_ids
        if ids is None:
            ids = tuple(f"x{j + 1}" for j in range(X.shape[1]))
        ids = tuple(str(c) for c in ids)
        if len(ids) != X.shape[1]:
            raise ShapeError(f"{len(ids)} column ids for {X.shape[1]} columns")
        if len(set(ids)) != len(ids):
            raise SchemaError("column ids must be unique")
        rows = self.row_ids
        rows = np.arange(y.shape[0]) if rows is None else np.asarray(rows, dtype=int)
        y.setflags(write=False)
        X.setflags(write=False)
        rows.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "column_ids", ids)
        object.__setattr__(self, "row_ids", rows)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def S(self):
        """The data matrix ``[y, X]``."""
        return np.column_stack([self.y, self.X])

    def take_rows(self, idx):
        idx = np.asarray(idx, dtype=int)
        return replace(
            self, y=self.y[idx], X=self.X[idx], row_ids=self.row_ids[idx], sort_state=UNSORTED
        )

    def take_columns(self, idx):
        idx = np.asarray(idx, dtype=int)
        state = self.sort_state
        if state.startswith("sorted_by_column:") and state.split(":", 1)[1] not in {
            self.column_ids[j] for j in idx
        }:
            state = UNSORTED
        return replace(
            self, X=self.X[:, idx], column_ids=tuple(self.column_ids[j] for j in idx),
            sort_state=state,
        )

    def with_y(self, y):
        return replace(self, y=y, sort_state=UNSORTED)

    def column_index(self, key):
        if isinstance(key, (int, np.integer)):
            if not 0 <= key < self.p:
                raise SchemaError(f"column index {key} out of range 0..{self.p - 1}")
            return int(key)
        try:
            return self.column_ids.index(str(key))
        except ValueError:
            raise SchemaError(f"no predictor column named {key!r}") from None

    def equals(self, other):
        return (
            np.array_equal(self.y, other.y)
            and np.array_equal(self.X, other.X)
            and self.column_ids == other.column_ids
            and self.y_name == other.y_name
        )


def sort_rows(d, key="y"):
    """Stable row sort of ``d`` by ``y`` or by a predictor column.

    ``key`` is ``"y"`` or a predictor column (index or id). Every column
    travels with the same permutation; ties keep their input order.
    """
    if isinstance(key, str) and key == "y":
        order = np.argsort(d.y, kind="stable")
        state = SORTED_BY_Y
    else:
        j = d.column_index(key)
        order = np.argsort(d.X[:, j], kind="stable")
        state = f"sorted_by_column:{d.column_ids[j]}"
    return replace(d.take_rows(order), sort_state=state)


@dataclass(frozen=True)
class YTransform:
    """Affine map sending ``[shift, shift + scale]`` onto ``[-1, 1]``."""

    shift: float
    scale: float

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DegenerateRange(f"scale must be positive and finite, got {self.scale}")

    @classmethod
    def fit(cls, y):
        y = np.asarray(y, dtype=float)
        lo, hi = float(np.min(y)), float(np.max(y))
        if not hi > lo:
            raise DegenerateRange("all y values are equal; cannot normalize")
        return cls(shift=lo, scale=hi - lo)

    def apply(self, y, warn=True):
        u = 2.0 * (np.asarray(y, dtype=float) - self.shift) / self.scale - 1.0
        if warn and np.any(np.abs(u) > EXTRAPOLATION_LIMIT):
            warnings.warn(
                f"normalized y reaches {np.max(np.abs(u)):.3g}, beyond +/-{EXTRAPOLATION_LIMIT}",
                ExtrapolationWarning,
                stacklevel=2,
            )
        return u

    def invert(self, u):
        return (np.asarray(u, dtype=float) + 1.0) * (self.scale / 2.0) + self.shift


def fit_y_transform(y_train):
    return YTransform.fit(y_train)


def _parse_float(text, row, column):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"cannot parse {text!r} as a number", row=row, column=column) from None
    if not math.isfinite(v):
        raise NonFinite(f"non-finite value {text!r}", row=row, column=column)
    return v


def load_csv(path, y_column, predictor_columns=None, split_column=None):
    """Read a header-first CSV into a training set and optional test set.

    Parameters
    ----------
    path : str or Path
    y_column : str
        Name of the dependent-variable column.
    predictor_columns : list of str, optional
        Defaults to every column other than ``y_column`` and ``split_column``.
    split_column : str, optional
        Column holding ``train``/``test`` labels. When given, rows labelled
        ``test`` form the returned test set.

    Returns
    -------
    train : DataSet
    test : DataSet or None
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path} is empty") from None
        body = list(reader)

    if len(set(header)) != len(header):
        raise SchemaError(f"{path}: duplicate column names in header")
    missing = [c for c in [y_column, split_column] if c is not None and c not in header]
    if predictor_columns is not None:
        missing += [c for c in predictor_columns if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")
    if predictor_columns is None:
        predictor_columns = [c for c in header if c not in (y_column, split_column)]
    if not predictor_columns:
        raise SchemaError(f"{path}: at least one predictor column is required")

    yi = header.index(y_column)
    xi = [header.index(c) for c in predictor_columns]
    si = header.index(split_column) if split_column is not None else None

    ys, Xs, is_test = [], [], []
    for lineno, cells in enumerate(body, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(
                f"expected {len(header)} cells, found {len(cells)}", row=lineno
            )
        ys.append(_parse_float(cells[yi], lineno, y_column))
        Xs.append([_parse_float(cells[i], lineno, header[i]) for i in xi])
        if si is not None:
            label = cells[si].strip().lower()
            if label not in ("train", "test"):
                raise ParseError(
                    f"split label must be 'train' or 'test', got {cells[si]!r}",
                    row=lineno, column=split_column,
                )
            is_test.append(label == "test")
        else:
            is_test.append(False)
    if not ys:
        raise ParseError(f"{path} has no data rows")

    y = np.array(ys)
    X = np.array(Xs, dtype=float).reshape(len(ys), len(xi))
    mask = np.array(is_test)
    ids = tuple(predictor_columns)
    train = DataSet(y=y[~mask], X=X[~mask], column_ids=ids, y_name=y_column,
                    row_ids=np.flatnonzero(~mask))
    test = None
    if mask.any():
        test = DataSet(y=y[mask], X=X[mask], column_ids=ids, y_name=y_column,
                       row_ids=np.flatnonzero(mask))
    return train, test


def save_csv(path, train, test=None, split_column="split"):
    """Write ``train`` (and ``test``) so that :func:`load_csv` reads them back exactly.

    Floats are written with ``repr`` which round-trips bit for bit.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [train.y_name, *train.column_ids]
    if test is not None:
        if test.column_ids != train.column_ids:
            raise SchemaError("train and test column ids differ")
        header.append(split_column)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for d, label in [(train, "train"), (test, "test")]:
            if d is None:
                continue
            for yv, row in zip(d.y, d.X):
                cells = [repr(float(yv)), *(repr(float(v)) for v in row)]
                if test is not None:
                    cells.append(label)
                w.writerow(cells)
    return path
