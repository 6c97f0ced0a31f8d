from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsurf.nnls import lawson_hanson, nnls_solve


def enumerate_nnls(B, d):
    """Brute-force NNLS optimum over all supports of size <= rows."""
    p, q = B.shape
    best = np.linalg.norm(d)
    for k in range(1, min(p, q) + 1):
        for S in combinations(range(q), k):
            cols = B[:, S]
            x, *_ = np.linalg.lstsq(cols, d, rcond=None)
            if np.all(x >= 0):
                best = min(best, np.linalg.norm(cols @ x - d))
    return best


def test_clips_negative_component():
    r = nnls_solve(np.eye(2), np.array([1.0, -1.0]))
    assert np.allclose(r.u, [1, 0])
    assert r.residual_norm == pytest.approx(1.0)
    assert r.converged


def test_feasible_unconstrained_optimum():
    d = np.array([0.3, 0.0, 2.0])
    r = nnls_solve(np.eye(3), d)
    assert np.allclose(r.u, d)
    assert r.residual_norm <= 1e-15
    assert list(r.support) == [0, 2]


def test_exact_sparse_representation_matches_enumeration(rng):
    for _ in range(20):
        B = rng.standard_normal((4, 8))
        u0 = np.zeros(8)
        u0[rng.choice(8, 3, replace=False)] = rng.uniform(0.5, 2, 3)
        d = B @ u0
        r = nnls_solve(B, d)
        assert r.residual_norm <= 1e-10 * np.linalg.norm(d)
        assert abs(r.residual_norm - enumerate_nnls(B, d)) <= 1e-8


def test_oracle_equivalence_200_instances(rng):
    for _ in range(200):
        p, q = int(rng.integers(1, 6)), int(rng.integers(1, 11))
        B = rng.standard_normal((p, q))
        d = rng.standard_normal(p)
        r = nnls_solve(B, d)
        opt = enumerate_nnls(B, d)
        assert abs(r.residual_norm - opt) <= 1e-8 * np.linalg.norm(d)
        assert len(r.support) <= min(p, q)
        assert np.all(r.u >= 0)
        assert r.converged


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_invariants(p, q, seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((p, q))
    d = rng.standard_normal(p)
    r = lawson_hanson(B, d)
    assert np.all(r.u >= 0)
    assert len(r.support) <= min(p, q)
    assert r.residual_norm == pytest.approx(np.linalg.norm(B @ r.u - d), rel=1e-12, abs=1e-15)
    tr = np.array(r.residual_trace)
    assert np.all(tr[1:] <= tr[:-1] * (1 + 1e-10) + 1e-14)
    # dual feasibility on the zero set
    w = B.T @ (d - B @ r.u)
    zero = r.u == 0
    if zero.any():
        assert np.max(w[zero]) <= 1e-9 * max(np.max(np.abs(B.T @ d)), 1e-300)


def test_moment_matching_shape_problem(rng):
    # wide orthonormal-row system like the compression subproblem
    Q, _ = np.linalg.qr(rng.standard_normal((200, 30)))
    u0 = np.zeros(200)
    u0[rng.choice(200, 30, replace=False)] = rng.uniform(0.1, 1, 30)
    d = Q.T @ u0
    r = nnls_solve(Q.T, d)
    assert r.residual_norm <= 1e-12 * np.linalg.norm(d)
    assert len(r.support) <= 30


def test_max_outer_returns_not_converged(rng):
    B = rng.standard_normal((10, 30))
    d = B @ rng.uniform(0, 1, 30)
    r = nnls_solve(B, d, max_outer=2)
    assert not r.converged
    assert r.iterations == 2
    assert np.all(r.u >= 0)


def test_bad_input():
    with pytest.raises(ValueError):
        nnls_solve(np.eye(2), np.ones(3))
    with pytest.raises(ValueError):
        nnls_solve(np.array([[np.inf, 0.0]]), np.ones(1))


def test_pluggable_solver():
    calls = []

    def fake(B, d, max_outer=None, kkt_tol=1e-12):
        calls.append(B.shape)
        return lawson_hanson(B, d, max_outer, kkt_tol)

    nnls_solve(np.eye(2), np.ones(2), solver=fake)
    assert calls == [(2, 2)]
