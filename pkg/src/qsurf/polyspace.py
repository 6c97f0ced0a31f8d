"""Total-degree trivariate Chebyshev bases and basis selection on point sets.

On an algebraic surface the restriction of ``P_n^3`` collapses (e.g. to
``(n+1)**2`` on the sphere), so the full Chebyshev-Vandermonde matrix is rank
deficient. :func:`select_basis` detects the numerical dimension ``N`` and
picks ``N`` independent columns by column-pivoted QR.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .linalg import EPS, numerical_rank, qr_pivoted


def full_dim(n):
    return comb(n + 3, 3)


def graded_lex_indices(n):
    """Multi-indices ``(a1, a2, a3)`` with ``|a| <= n``.

    Ordered by total degree, then lexicographically with ``a1`` most
    significant, ascending.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    out = []
    for d in range(n + 1):
        for a1 in range(d + 1):
            for a2 in range(d - a1 + 1):
                out.append((a1, a2, d - a1 - a2))
    return np.array(out, dtype=int).reshape(-1, 3)


@dataclass(frozen=True)
class Box3:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"degenerate box {self}")

    def to_unit(self, P):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        return (2 * P - hi - lo) / (hi - lo)


def fit_box(points):
    """Componentwise bounding box of ``points``; flat directions are inflated."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise ValueError("cannot fit a box to no points")
    lo, hi = P.min(axis=0), P.max(axis=0)
    scale = max(float(np.max(hi - lo)), float(np.max(np.abs(P)))) or 1.0
    pad = max(1e-12 * scale, 1e-300)
    flat = hi - lo < 1e-12 * scale
    lo = np.where(flat, lo - pad, lo)
    hi = np.where(flat, hi + pad, hi)
    return Box3(tuple(lo.tolist()), tuple(hi.tolist()))


def chebyshev_table(t, n):
    """``T_k(t)`` for k = 0..n via the three-term recurrence; shape (len(t), n+1)."""
    T = np.empty((len(t), n + 1))
    T[:, 0] = 1.0
    if n >= 1:
        T[:, 1] = t
    for k in range(1, n):
        T[:, k + 1] = 2 * t * T[:, k] - T[:, k - 1]
    return T


def chebvand(points, n, box, slack=1e-12):
    """Chebyshev-Vandermonde matrix of total degree ``n`` on ``box``.

    Entry ``(i, j)`` is ``T_a1(s1(x_i)) T_a2(s2(y_i)) T_a3(s3(z_i))`` with the
    affine maps ``s_k`` sending the box onto ``[-1, 1]^3`` and columns in
    graded-lex order.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    X = box.to_unit(P)
    if np.any(np.abs(X) > 1 + slack):
        raise ValueError("points lie outside the Chebyshev box")
    X = np.clip(X, -1.0, 1.0)
    alpha = graded_lex_indices(n)
    Tx, Ty, Tz = (chebyshev_table(X[:, k], n) for k in range(3))
    return Tx[:, alpha[:, 0]] * Ty[:, alpha[:, 1]] * Tz[:, alpha[:, 2]]


@dataclass
class PolyBasis:
    degree: int
    box: Box3
    selected: np.ndarray  # column indices into the graded-lex basis, pivot order
    diagnostics: list = field(default_factory=list)

    @property
    def N(self):
        return len(self.selected)

    @property
    def full_dim(self):
        return full_dim(self.degree)

    def vandermonde(self, points, slack=1e-12):
        return chebvand(points, self.degree, self.box, slack)[:, self.selected]


def select_basis(points, n, rtol=None, verify=True):
    """Select a basis of ``P_n^3`` restricted to ``points``.

    The rank and the column permutation come from the principal square block
    (first ``V`` rows) of the Chebyshev-Vandermonde matrix ``C``, or from all
    of ``C`` when there are fewer than ``V`` points.

    Returns ``(basis, V_M)`` with ``V_M = C[:, basis.selected]``.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if len(P) < 1:
        raise ValueError("need at least one point")
    box = fit_box(P)
    C = chebvand(P, n, box)
    V = C.shape[1]
    CV = C[:V] if len(C) >= V else C
    N = numerical_rank(CV, rtol)
    if N == 0:
        raise ValueError("Chebyshev-Vandermonde matrix has rank zero")
    _, _, perm = qr_pivoted(CV)
    basis = PolyBasis(n, box, perm[:N].copy())
    VM = C[:, basis.selected]

    if verify and len(C) > V:
        # rank of V_M from its triangular factor; threshold as for the square block
        R = np.linalg.qr(VM, mode="r")
        full_rank = numerical_rank(R, rtol if rtol is not None else max(CV.shape) * EPS)
        if full_rank < N:
            basis.diagnostics.append(f"rank of V_M is {full_rank} < {N}; basis truncated")
            basis.selected = basis.selected[:full_rank]
            VM = VM[:, :full_rank]
    return basis, VM
