"""Independent reference implementations used only by the tests.

Nothing here imports the package; the routines are deliberately simple and
slow so that they share no code path with the solvers under test.
"""

import math

import numpy as np


def jacobi_svd(M, sweeps=60, tol=1e-15):
    """One-sided Jacobi SVD.

    Orthogonalizes the columns of ``M`` (or of ``M^T`` for wide input) by
    plane rotations. Returns ``U, s, Vt`` with ``M = U diag(s) Vt``.
    """
    M = np.array(M, dtype=float)
    wide = M.shape[0] < M.shape[1]
    A = M.T.copy() if wide else M.copy()
    m, n = A.shape
    V = np.eye(n)
    for _ in range(sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                a = float(A[:, i] @ A[:, i])
                b = float(A[:, j] @ A[:, j])
                c = float(A[:, i] @ A[:, j])
                if abs(c) <= tol * math.sqrt(a * b) or c == 0.0:
                    continue
                rotated = True
                zeta = (b - a) / (2.0 * c)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                Ai, Aj = A[:, i].copy(), A[:, j].copy()
                A[:, i], A[:, j] = cs * Ai - sn * Aj, sn * Ai + cs * Aj
                Vi, Vj = V[:, i].copy(), V[:, j].copy()
                V[:, i], V[:, j] = cs * Vi - sn * Vj, sn * Vi + cs * Vj
        if not rotated:
            break
    s = np.sqrt(np.sum(A * A, axis=0))
    order = np.argsort(-s)
    s, A, V = s[order], A[:, order], V[:, order]
    U = np.zeros_like(A)
    nz = s > 0
    U[:, nz] = A[:, nz] / s[nz]
    if wide:
        return V, s, U.T
    return U, s, V.T


def jacobi_pinv(M, rtol=None):
    """Moore-Penrose pseudoinverse from :func:`jacobi_svd`."""
    M = np.asarray(M, dtype=float)
    U, s, Vt = jacobi_svd(M)
    if rtol is None:
        rtol = max(M.shape) * np.finfo(float).eps
    keep = s > rtol * (s[0] if s.size else 0.0)
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def power_sum(a, s):
    """Naive ``sum_k a_k s**k``."""
    s = np.asarray(s, dtype=float)
    return sum(float(c) * s**k for k, c in enumerate(a))


def vandermonde_rows(s, r):
    return np.array([[float(v) ** k for k in range(r)] for v in s])


def relative(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b))
