"""Dense least-squares solvers built on orthogonal factorizations.

Both solvers reproduce the textbook normal-equation formulas

    min-norm:  beta = X^T (X X^T)^{-1} y
    OLS:       C    = (V^T V)^{-1} V^T B

but never form ``X X^T`` or ``V^T V``; a thin QR factorization is used
instead, and the rank/condition diagnostics come from the singular values.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DataError, RankDeficient

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SolveInfo:
    """Diagnostics attached to a least-squares solve."""

    rank: int
    cond: float
    tol: float
    shape: tuple


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float array (copying only if needed)."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DataError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DataError(f"{name} contains NaN or Inf entries")
    return M


def default_tol(shape):
    """Relative singular-value cutoff ``max(rows, cols) * eps``."""
    return max(shape) * EPS


def singular_values(M):
    return np.linalg.svd(as_matrix(M), compute_uv=False)


def numerical_rank(M, tol=None):
    """Count singular values larger than ``tol`` times the largest one.

    Parameters
    ----------
    M : array_like, shape (m, n)
    tol : float, optional
        Relative tolerance; defaults to ``max(m, n) * eps``.
    """
    M = as_matrix(M)
    if tol is None:
        tol = default_tol(M.shape)
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def condition_number(M):
    """Ratio of extreme singular values (``inf`` when singular)."""
    s = singular_values(M)
    if s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


def _diagnose(M, tol, required, what):
    s = np.linalg.svd(M, compute_uv=False)
    if tol is None:
        tol = default_tol(M.shape)
    rank = 0 if s[0] == 0.0 else int(np.count_nonzero(s > tol * s[0]))
    cond = np.inf if s[-1] == 0.0 else float(s[0] / s[-1])
    info = SolveInfo(rank=rank, cond=cond, tol=tol, shape=M.shape)
    if rank < required:
        raise RankDeficient(
            f"{what}: numerical rank {rank} < {required} "
            f"(shape {M.shape}, cond {cond:.3g}, tol {tol:.3g})",
            rank=rank,
            required=required,
        )
    return info


def min_norm_solve(X, y, tol=None, full_output=False):
    """Minimum-norm solution of the underdetermined system ``X beta = y``.

    Parameters
    ----------
    X : array_like, shape (n, p), n <= p
        Must have full row rank.
    y : array_like, shape (n,) or (n, k)
        One or several right-hand sides.
    tol : float, optional
        Relative singular-value tolerance for the rank check.
    full_output : bool
        Also return a :class:`SolveInfo`.

    Returns
    -------
    beta : ndarray, shape (p,) or (p, k)
    info : SolveInfo
        Only if ``full_output`` is true.

    Raises
    ------
    RankDeficient
        If ``n > p`` or the numerical rank of ``X`` is below ``n``.
    """
    X = as_matrix(X, "X")
    y = np.asarray(y, dtype=float)
    vector = y.ndim == 1
    Y = as_matrix(y, "y")
    n, p = X.shape
    if Y.shape[0] != n:
        raise DataError(f"X has {n} rows but y has {Y.shape[0]}")
    if n > p:
        raise RankDeficient(
            f"min_norm_solve needs n <= p, got {n} x {p}", rank=min(n, p), required=n
        )
    info = _diagnose(X, tol, n, "min_norm_solve")
    # X^T = Q R  =>  X = R^T Q^T, beta = Q R^{-T} y lies in the row space of X.
    Q, R = scipy.linalg.qr(X.T, mode="economic")
    z = scipy.linalg.solve_triangular(R, Y, trans="T")
    beta = Q @ z
    if vector:
        beta = beta[:, 0]
    return (beta, info) if full_output else beta


def ols_solve(V, B, tol=None, full_output=False):
    """Ordinary least-squares coefficients ``argmin_C ||V C - B||_F``.

    Parameters
    ----------
    V : array_like, shape (n, r), n >= r
        Must have full column rank.
    B : array_like, shape (n,) or (n, k)

    Returns
    -------
    C : ndarray, shape (r,) or (r, k)
    info : SolveInfo
        Only if ``full_output`` is true.
    """
    V = as_matrix(V, "V")
    B = np.asarray(B, dtype=float)
    vector = B.ndim == 1
    Bm = as_matrix(B, "B")
    n, r = V.shape
    if Bm.shape[0] != n:
        raise DataError(f"V has {n} rows but B has {Bm.shape[0]}")
    if n < r:
        raise RankDeficient(
            f"ols_solve needs n >= r, got {n} x {r}", rank=min(n, r), required=r
        )
    info = _diagnose(V, tol, r, "ols_solve")
    Q, R = scipy.linalg.qr(V, mode="economic")
    C = scipy.linalg.solve_triangular(R, Q.T @ Bm)
    if vector:
        C = C[:, 0]
    return (C, info) if full_output else C
