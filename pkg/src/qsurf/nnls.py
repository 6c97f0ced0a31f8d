"""Lawson-Hanson active-set solver for ``min ||B u - d||_2`` subject to ``u >= 0``."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

# step-length guard on the interpolation parameter in the inner loop
FEAS_TOL = 1e-14


@dataclass
class NnlsResult:
    u: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    residual_trace: list = field(default_factory=list)

    @property
    def support(self):
        return np.flatnonzero(self.u > 0)


def _passive_lstsq(B, d, idx):
    Q, R = np.linalg.qr(B[:, idx], mode="reduced")
    return sla.solve_triangular(R, Q.T @ d, check_finite=False)


def lawson_hanson(B, d, max_outer=None, kkt_tol=1e-12):
    """Lawson-Hanson NNLS.

    The passive-set least-squares subproblem is re-solved from scratch by QR
    at each step. Termination is on the dual condition
    ``max w_i <= kkt_tol * ||B^T d||_inf`` over the active (zero) set, with
    ``w = B^T (d - B u)``.

    Parameters
    ----------
    B : (p, q) array
    d : (p,) array
    max_outer : int, optional
        Outer iteration cap, default ``10 * q``. When hit, the current
        iterate is returned with ``converged=False``.
    kkt_tol : float
        Relative dual tolerance.
    """
    B = np.asarray(B, dtype=float)
    d = np.asarray(d, dtype=float)
    if B.ndim != 2 or d.ndim != 1 or B.shape[0] != len(d):
        raise ValueError(f"shape mismatch: B {B.shape}, d {d.shape}")
    if B.shape[1] < 1:
        raise ValueError("B needs at least one column")
    if not (np.all(np.isfinite(B)) and np.all(np.isfinite(d))):
        raise ValueError("non-finite input to NNLS")
    p, q = B.shape
    if max_outer is None:
        max_outer = 10 * q

    u = np.zeros(q)
    passive = np.zeros(q, dtype=bool)
    # columns whose entry step failed (numerically dependent); reset on every accepted step
    blocked = np.zeros(q, dtype=bool)
    r = d.copy()
    w = B.T @ r
    tol = kkt_tol * float(np.max(np.abs(w))) if w.size else 0.0
    trace = [float(np.linalg.norm(r))]
    converged = False
    it = 0

    while it < max_outer:
        cand = ~passive & ~blocked
        if not cand.any() or passive.sum() >= p:
            converged = not cand.any() or np.max(w[~passive]) <= tol
            break
        wc = np.where(cand, w, -np.inf)
        j = int(np.argmax(wc))
        if wc[j] <= tol:
            converged = True
            break
        it += 1
        passive[j] = True
        idx = np.flatnonzero(passive)
        z = _passive_lstsq(B, d, idx)

        if z[np.searchsorted(idx, j)] <= 0:
            # new column does not help numerically; leave it out and try the next
            passive[j] = False
            blocked[j] = True
            continue

        while np.any(z <= 0):
            x = u[idx]
            neg = np.flatnonzero(z <= 0)
            ratios = x[neg] / (x[neg] - z[neg])
            k = int(np.argmin(ratios))
            x = x + ratios[k] * (z - x)
            drop = x <= FEAS_TOL * max(1.0, float(np.max(np.abs(x))))
            drop[neg[k]] = True
            x[drop] = 0.0
            u[idx] = x
            passive[idx[drop]] = False
            idx = np.flatnonzero(passive)
            if idx.size == 0:
                z = np.zeros(0)
                break
            z = _passive_lstsq(B, d, idx)

        u[:] = 0.0
        u[idx] = z
        blocked[:] = False
        r = d - B @ u
        w = B.T @ r
        trace.append(float(np.linalg.norm(r)))

    return NnlsResult(u, float(np.linalg.norm(d - B @ u)), it, converged, trace)


def nnls_solve(B, d, max_outer=None, kkt_tol=1e-12, solver=None):
    """NNLS entry point; ``solver`` may substitute another implementation with
    the same signature as :func:`lawson_hanson`."""
    return (solver or lawson_hanson)(B, d, max_outer=max_outer, kkt_tol=kkt_tol)
