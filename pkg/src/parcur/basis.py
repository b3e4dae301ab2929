"""Monomial (Vandermonde) bases for column functions of a scalar parameter."""

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ConditioningWarning, DataError, DuplicateParameterWarning
from .linalg import condition_number

MAX_DEGREE = 15
CONDITIONING_WARN_DEGREE = 12
DUPLICATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class BasisMatrix:
    """Sampled monomials ``V[i, k] = s_i**k`` for ``k = 0 .. degree-1``."""

    V: np.ndarray
    parameter_values: np.ndarray
    degree: int
    kind: str = "monomial"

    @property
    def cond(self):
        return condition_number(self.V)


def has_duplicates(s, tol=DUPLICATE_TOL):
    s = np.sort(np.asarray(s, dtype=float))
    return bool(np.any(np.diff(s) <= tol))


def vandermonde(s, r, max_degree=MAX_DEGREE):
    """Build the ``n x r`` monomial basis matrix for parameter values ``s``.

    Column ``k`` is ``s**k``; the second column is ``s`` itself. A
    :class:`DuplicateParameterWarning` is emitted when two parameter values
    coincide to within 1e-12, and a :class:`ConditioningWarning` for
    ``r > 12``.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    n = s.shape[0]
    r = int(r)
    if not np.all(np.isfinite(s)):
        raise DataError("parameter values must be finite")
    if not 1 <= r <= n:
        raise DataError(f"basis size r={r} must satisfy 1 <= r <= n={n}")
    if max_degree is not None and r > max_degree:
        raise DataError(f"basis size r={r} exceeds the admitted maximum {max_degree}")
    if r > CONDITIONING_WARN_DEGREE:
        warnings.warn(f"monomial basis with r={r} is poorly conditioned",
                      ConditioningWarning, stacklevel=2)
    if has_duplicates(s):
        warnings.warn("parameter values are not distinct", DuplicateParameterWarning,
                      stacklevel=2)
    V = np.empty((n, r))
    V[:, 0] = 1.0
    for k in range(1, r):
        V[:, k] = V[:, k - 1] * s
    if r > 1:
        V[:, 1] = s
    V.setflags(write=False)
    return BasisMatrix(V=V, parameter_values=s, degree=r)


def column_fit_eval(a, s):
    """Evaluate ``a[0] + a[1] s + ... + a[r-1] s**(r-1)`` by Horner's rule.

    ``a`` may be a vector (one column function) or an ``r x k`` matrix whose
    columns are evaluated together, giving an ``len(s) x k`` result.
    """
    a = np.asarray(a, dtype=float)
    s = np.asarray(s, dtype=float)
    if a.ndim == 1:
        out = np.full(s.shape, a[-1])
        for c in a[-2::-1]:
            out = out * s + c
        return out
    out = np.broadcast_to(a[-1], (s.shape[0], a.shape[1])).copy()
    for c in a[-2::-1]:
        out = out * s[:, None] + c
    return out
