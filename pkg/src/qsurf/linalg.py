"""Dense matrix kernels: economy QR, column-pivoted QR, numerical rank and
transposed-triangular solves.

All routines operate on 2-D float arrays and are thin, checked wrappers
around LAPACK (Householder QR, SVD, LU with partial pivoting).
"""

import warnings

import numpy as np
import scipy.linalg as sla

EPS = np.finfo(float).eps


class IllConditionedWarning(UserWarning):
    """Triangular factor is close to singular relative to its own scale."""


def _as_matrix(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def qr_economy(A):
    """Householder QR of a tall matrix, ``A = Q @ R`` with Q of shape (m, n)."""
    A = _as_matrix(A)
    m, n = A.shape
    if m < n:
        raise ValueError(f"qr_economy needs rows >= cols, got {m}x{n}")
    Q, R = np.linalg.qr(A, mode="reduced")
    return Q, R


def qr_pivoted(A):
    """Column-pivoted Householder QR.

    Returns ``Q`` (m, k), ``R`` (k, n) and ``perm`` with ``A[:, perm] = Q @ R``,
    k = min(m, n). Pivoting is the classical max-column-norm rule, so
    ``|R[0,0]| >= |R[1,1]| >= ...``.
    """
    A = _as_matrix(A)
    Q, R, perm = sla.qr(A, mode="economic", pivoting=True)
    return Q, R, perm


def _threshold(shape, smax, rtol):
    if rtol is None:
        rtol = max(shape) * EPS
    elif not 0.0 < rtol < 1.0:
        raise ValueError("rtol must lie in (0, 1)")
    return rtol * smax


def numerical_rank(A, rtol=None):
    """Number of singular values strictly above ``rtol * sigma_max``.

    The default ``rtol`` is ``max(m, n) * eps``.
    """
    A = _as_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > _threshold(A.shape, s[0], rtol)))


def pivoted_qr_rank(A, rtol=None):
    """Rank estimate from the diagonal of a column-pivoted R factor.

    Uses the same threshold convention as :func:`numerical_rank`; kept as an
    independent estimate to cross-check it.
    """
    A = _as_matrix(A)
    R = sla.qr(A, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0.0:
        return 0
    return int(np.count_nonzero(d > _threshold(A.shape, d[0], rtol)))


def solve_transposed_triangular(R, B, pivoting=True):
    """Solve ``R.T @ X = B`` for upper-triangular ``R``.

    With ``pivoting=True`` the system is solved by Gaussian elimination with
    row pivoting on ``R.T`` (LU with partial pivoting); otherwise by plain
    forward substitution. ``R`` is never inverted explicitly.
    """
    R = _as_matrix(R, "R")
    B = np.asarray(B, dtype=float)
    vector = B.ndim == 1
    B = _as_matrix(B, "B")
    n = R.shape[0]
    if R.shape != (n, n):
        raise ValueError(f"R must be square, got {R.shape}")
    if B.shape[0] != n:
        raise ValueError(f"B has {B.shape[0]} rows, expected {n}")

    d = np.abs(np.diag(R))
    if d.min() == 0.0:
        raise np.linalg.LinAlgError("triangular factor is exactly singular")
    if d.min() < 1e3 * EPS * d.max():
        warnings.warn(
            f"triangular factor nearly singular (min/max |diag| = {d.min() / d.max():.2e})",
            IllConditionedWarning,
            stacklevel=2,
        )

    if pivoting:
        lu, piv = sla.lu_factor(R.T, check_finite=False)
        if np.any(np.diag(lu) == 0.0):
            raise np.linalg.LinAlgError("zero pivot in elimination")
        X = sla.lu_solve((lu, piv), B, check_finite=False)
    else:
        X = sla.solve_triangular(R, B, trans="T", lower=False, check_finite=False)
    return X[:, 0] if vector else X
