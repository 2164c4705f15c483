import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catspec.tridiag import (TridiagonalHamiltonian, bisect_eigenvalues, full_spectrum_reference,
                             solve_lowest, sturm_count, twisted_vector)


def random_tridiag(rng, n, persym=False):
    d = rng.normal(size=n)
    e = rng.normal(size=n - 1)
    if persym:
        d = 0.5 * (d + d[::-1])
        e = 0.5 * (e + e[::-1])
    return TridiagonalHamiltonian(d, e)


def test_sturm_count_matches_dense():
    rng = np.random.default_rng(1)
    h = random_tridiag(rng, 12)
    w = np.linalg.eigvalsh(h.dense())
    e2 = list(h.offdiag ** 2)
    for x in (-5.0, 0.0, 0.3, 5.0):
        assert sturm_count(list(h.diag), e2, x, 1e-300) == int(np.sum(w < x))


@pytest.mark.parametrize("persym", [False, True])
@pytest.mark.parametrize("n", [1, 2, 3, 7, 40])
def test_lowest_against_lapack(n, persym):
    rng = np.random.default_rng(n + 100 * persym)
    h = random_tridiag(rng, n, persym) if n > 1 else TridiagonalHamiltonian([0.7], [])
    k = min(4, n)
    res = solve_lowest(h, k)
    ref = full_spectrum_reference(h)[:k] if n > 1 else np.array([0.7])
    np.testing.assert_allclose(res.values, ref, atol=1e-12)
    for val, vec in zip(res.values, res.vectors):
        assert np.linalg.norm(h.matvec(vec) - val * vec) < 1e-10
        assert abs(np.linalg.norm(vec) - 1) < 1e-12
    np.testing.assert_allclose(res.vectors @ res.vectors.T, np.eye(k), atol=1e-10)


def test_bisection_pure_ladder():
    # U = 0 ladder: -lambda (N - 2k)
    n = 50
    m = np.arange(n)
    e = -np.sqrt((m + 1) * (n - m))
    vals = bisect_eigenvalues(np.zeros(n + 1), e, range(5))
    np.testing.assert_allclose(vals, [-50, -48, -46, -44, -42], atol=1e-12)


def test_twisted_vector_tail_is_relative_accurate():
    # a well potential whose ground state decays by many orders of magnitude
    n = 200
    d = 0.05 * np.arange(n + 1) ** 2
    e = -np.ones(n)
    h = TridiagonalHamiltonian(d, e)
    val = solve_lowest(h, 1).values[0]
    v = twisted_vector(d, e, val)
    # backward recurrence of the eigen-equation is stable toward the centre
    x = v.values
    i = 60
    pred = ((d[i] - val) * x[i] + e[i] * x[i + 1]) / -e[i - 1]
    assert v.logabs[i] < -150
    assert math.isclose(pred, x[i - 1], rel_tol=1e-8)


def test_persymmetric_parity_and_gaps():
    n = 60
    m = np.arange(n + 1)
    d = 0.5 * (m * (m - 1) + (n - m) * (n - m - 1)) + 3.0 * m * (n - m)
    d = d / n
    e = -0.6 * np.sqrt((m[:-1] + 1) * (n - m[:-1]))
    res = solve_lowest(TridiagonalHamiltonian(d, e), 4)
    assert list(res.parities) == [1, -1, 1, -1]
    assert np.all(res.gaps > 0)
    for vec, par in zip(res.vectors, res.parities):
        np.testing.assert_allclose(vec[::-1], par * vec, atol=1e-12)


def test_deep_splitting_against_high_precision():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 80
    n = 60
    u0, u1, lam = 1.0 / n, 3.0 / n, 0.55
    m = np.arange(n + 1, dtype=np.int64)
    d = 0.5 * u0 * (m * (m - 1) + (n - m) * (n - m - 1)).astype(float) + u1 * (m * (n - m)).astype(float)
    e = -lam * np.sqrt(((m[:-1] + 1) * (n - m[:-1])).astype(float))
    res = solve_lowest(TridiagonalHamiltonian(d, e), 2, want_vectors=False)

    dm = [mpmath.mpf(float(x)) for x in d]
    em2 = [mpmath.mpf(float(x)) ** 2 for x in e]

    def count(x):
        q, c = dm[0] - x, 0
        c += q < 0
        for i in range(1, len(dm)):
            q = dm[i] - x - em2[i - 1] / q
            c += q < 0
        return c

    def eig(j):
        lo, hi = mpmath.mpf(-100), mpmath.mpf(100)
        for _ in range(400):
            mid = (lo + hi) / 2
            if count(mid) > j:
                hi = mid
            else:
                lo = mid
        return (lo + hi) / 2

    split = eig(1) - eig(0)
    assert float(split) < 1e-6 * float(eig(2) - eig(0))
    assert res.gaps[0] == pytest.approx(float(split), rel=1e-6)


def test_diagonal_matrix_general_path():
    h = TridiagonalHamiltonian([3.0, 1.0, 2.0], [0.0, 0.0])
    res = solve_lowest(h, 3)
    np.testing.assert_allclose(res.values, [1, 2, 3])
    np.testing.assert_allclose(np.abs(res.vectors), np.eye(3)[[1, 2, 0]])


def test_k_out_of_range():
    with pytest.raises(ValueError):
        solve_lowest(TridiagonalHamiltonian([1.0, 2.0], [0.5]), 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=25), st.data())
def test_lowest_matches_dense_property(diag, data):
    off = data.draw(st.lists(st.floats(-5, 5), min_size=len(diag) - 1, max_size=len(diag) - 1))
    h = TridiagonalHamiltonian(diag, off)
    k = min(3, len(diag))
    res = solve_lowest(h, k)
    ref = np.linalg.eigvalsh(h.dense())[:k]
    scale = max(1.0, np.abs(h.dense()).max())
    np.testing.assert_allclose(res.values, ref, atol=1e-11 * scale)
    for val, vec in zip(res.values, res.vectors):
        assert np.linalg.norm(h.matvec(vec) - val * vec) < 1e-8 * scale
