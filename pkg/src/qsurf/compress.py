"""QMC functional, moments, and compression of the QMC rule to a few positive-weight nodes.

The bottom-up loop solves NNLS moment-matching problems on increasing
prefixes ``X_m`` of the QMC sequence, working in the discrete orthogonal basis
given by ``V_m = Q_m R_m``, and stops once the relative moment residual
drops below ``eps``. The Caratheodory-style baseline solves a single NNLS
problem on all ``M`` points.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import qr_economy, solve_transposed_triangular
from .nnls import nnls_solve


@dataclass(frozen=True)
class CompressParams:
    eps: float = 1e-10
    theta: float = 2.0
    tau: float = 10.0
    m_init_factor: float = 2.0

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.theta <= 1 or self.tau <= 1:
            raise ValueError("theta and tau must exceed 1")
        if self.m_init_factor < 1:
            raise ValueError("m_init_factor must be >= 1")


@dataclass
class MomentVector:
    lam: np.ndarray
    sigma_J: float

    @property
    def N(self):
        return len(self.lam)


@dataclass
class CompressedRule:
    nodes: np.ndarray  # (nu, 3)
    weights: np.ndarray  # (nu,)
    indices: np.ndarray  # positions of the nodes in the sample
    degree: int
    sigma_J: float
    residual: float
    converged: bool
    trace: list = field(default_factory=list)
    basis: Optional[object] = None

    @property
    def nu(self):
        return len(self.weights)

    def to_dict(self):
        return {
            "degree": self.degree,
            "nu": self.nu,
            "sigma_J": self.sigma_J,
            "residual": self.residual,
            "converged": self.converged,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
            "trace": [{"m": t["m"], "momtype": t["momtype"], "residual": t["residual"]} for t in self.trace],
        }


def qmc_moments(V_M, sigma_J):
    """Moments ``V_M^T e`` of the QMC functional, ``e = sigma_J / M``."""
    V_M = np.asarray(V_M, dtype=float)
    if V_M.ndim != 2 or len(V_M) < 1:
        raise ValueError("V_M must be a non-empty matrix")
    if sigma_J <= 0:
        raise ValueError("sigma_J must be positive")
    return MomentVector(V_M.sum(axis=0) * (sigma_J / len(V_M)), float(sigma_J))


def qmc_integrate(sample, f):
    """Equal-weight QMC sum ``sigma_J / M * sum f(P_i)``; ``f`` takes an (M, 3) array."""
    vals = np.asarray(f(sample.points), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is non-finite at a sample point")
    return sample.sigma_J * float(np.mean(vals))


def evaluate_rule(rule, f):
    if rule.nu == 0:
        raise ValueError("empty rule")
    vals = np.asarray(f(rule.nodes), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is non-finite at a node")
    return float(rule.weights @ vals)


def _moments_of(moments):
    return moments if isinstance(moments, MomentVector) else MomentVector(np.asarray(moments, float), float("nan"))


def _extract(u, points, row_offset=0):
    idx = np.flatnonzero(u > 0)
    return points[idx], u[idx], idx + row_offset


def bottom_up_compress(sample, V_M, moments, params=None, basis=None, solver=None):
    """Compress the QMC rule on ``sample`` to at most ``N`` positive-weight nodes.

    Parameters
    ----------
    sample : SampleSet
        Supplies the points ``X_M`` (rows of ``V_M``) and ``sigma_J``.
    V_M : (M, N) array
        Selected-basis Vandermonde matrix with full column rank.
    moments : MomentVector
        QMC moments ``V_M^T e``.
    params : CompressParams
    basis : PolyBasis, optional
        Attached to the rule so residuals can be recomputed at the nodes.
    solver : callable, optional
        Alternative NNLS implementation.

    Returns
    -------
    CompressedRule
        On non-convergence the best iterate found, with ``converged=False``.
    """
    params = params or CompressParams()
    moments = _moments_of(moments)
    V_M = np.asarray(V_M, dtype=float)
    M, N = V_M.shape
    lam = moments.lam
    if len(lam) != N:
        raise ValueError("moment vector does not match V_M")
    if N > M:
        raise ValueError("more basis functions than points")
    lam_norm = float(np.linalg.norm(lam))
    if lam_norm == 0:
        raise ValueError("zero moment vector")
    e = np.full(M, sample.sigma_J / M)

    m = min(math.ceil(params.m_init_factor * N), M)
    momtype = 0
    prev = None
    trace = []
    best = None
    converged = False

    while True:
        t0 = time.perf_counter()
        Vm = V_M[:m]
        Q, R = qr_economy(Vm)
        t_AM = 0.0
        if momtype == 0:
            q = solve_transposed_triangular(R, lam)
            A = Q
        else:
            t1 = time.perf_counter()
            A_M = solve_transposed_triangular(R, V_M.T).T
            t_AM = time.perf_counter() - t1
            q = A_M.T @ e
            A = A_M[:m]
        sol = nnls_solve(A.T, q, solver=solver)
        u = sol.u
        res = float(np.linalg.norm(Vm.T @ u - lam)) / lam_norm
        elapsed = time.perf_counter() - t0
        trace.append(
            {"m": m, "momtype": momtype, "residual": res, "nnls_converged": sol.converged,
             "seconds": elapsed, "A_M_seconds": t_AM}
        )
        if best is None or res < best[0]:
            best = (res, u, m)

        if res <= params.eps:
            converged = True
            break
        if prev is not None and m < M and prev / res < params.tau:
            if momtype == 0:
                momtype = 1
            else:
                m = M
            continue
        nxt = math.ceil(params.theta * m)
        if nxt <= M:
            prev, m = res, nxt
        elif m < M:
            prev, m = res, M
        else:
            break

    res, u, m_best = (res, u, m) if converged else best
    nodes, weights, idx = _extract(u, sample.points[:m_best])
    return CompressedRule(nodes, weights, idx, basis.degree if basis is not None else -1,
                          sample.sigma_J, res, converged, trace, basis)


def caratheodory_compress(sample, V_M, moments, basis=None, solver=None, max_outer=None, eps=1e-10):
    """One NNLS moment-matching solve on all ``M`` points (full-matrix baseline).

    Uses the same orthogonalization: ``V_M = Q R``, NNLS on ``Q^T`` with the
    modified moments ``R^{-T} lambda``.
    """
    moments = _moments_of(moments)
    V_M = np.asarray(V_M, dtype=float)
    lam = moments.lam
    t0 = time.perf_counter()
    Q, R = qr_economy(V_M)
    q = solve_transposed_triangular(R, lam)
    sol = nnls_solve(Q.T, q, max_outer=max_outer, solver=solver)
    res = float(np.linalg.norm(V_M.T @ sol.u - lam) / np.linalg.norm(lam))
    trace = [{"m": len(V_M), "momtype": 0, "residual": res, "nnls_converged": sol.converged,
              "seconds": time.perf_counter() - t0, "A_M_seconds": 0.0}]
    nodes, weights, idx = _extract(sol.u, sample.points)
    return CompressedRule(nodes, weights, idx, basis.degree if basis is not None else -1,
                          sample.sigma_J, res, res <= eps, trace, basis)


def moment_residual(rule, moments):
    """Relative moment residual recomputed from the nodes via the attached basis."""
    if rule.basis is None:
        raise ValueError("rule carries no basis")
    lam = _moments_of(moments).lam
    Vn = rule.basis.vandermonde(rule.nodes)
    return float(np.linalg.norm(Vn.T @ rule.weights - lam) / np.linalg.norm(lam))


def compress(sample, degree, params=None, method="bottom_up"):
    """Basis selection, moments and compression in one call; returns ``(rule, basis, moments)``."""
    from .polyspace import select_basis

    basis, V_M = select_basis(sample.points, degree)
    moments = qmc_moments(V_M, sample.sigma_J)
    if method == "bottom_up":
        rule = bottom_up_compress(sample, V_M, moments, params, basis=basis)
    elif method == "caratheodory":
        rule = caratheodory_compress(sample, V_M, moments, basis=basis)
    else:
        raise ValueError(f"unknown method {method!r}")
    return rule, basis, moments
