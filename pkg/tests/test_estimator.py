import itertools
import math

import numpy as np
import pytest

from bipartite_spectra.estimator import (
    correlator_scaling,
    finite_n_m2,
    hutchinson_moments,
    monte_carlo,
    sum_of_squares_m2,
    trace_moments,
)
from bipartite_spectra.recursion import compute_moments
from bipartite_spectra.sampler import EnsembleParams, SparseSymmetricMatrix, sample_matrix
from bipartite_spectra.weights import WeightModel, even_moments

RAD = WeightModel.rademacher()


def exact_finite_n_moment(N, p, n1, k, X_even):
    """E (1/N) Tr A^k by summing over every closed walk of k steps on N vertices."""
    def X(n):
        return 0.0 if n % 2 else X_even[n // 2 - 1]

    q = p / N
    total = 0.0
    for seq in itertools.product(range(N), repeat=k):
        w = seq + (seq[0],)
        if any((a < n1) == (b < n1) for a, b in zip(w, w[1:])):
            continue
        mult = {}
        for a, b in zip(w, w[1:]):
            e = (min(a, b), max(a, b))
            mult[e] = mult.get(e, 0) + 1
        term = q ** len(mult)
        for n in mult.values():
            term *= X(n)
        total += term
    return total / N


def test_zero_matrix():
    A = SparseSymmetricMatrix(5, np.zeros(0, int), np.zeros(0, int), np.zeros(0))
    assert np.all(trace_moments(A, 6).values == 0)


def test_against_dense_matrix_power():
    rng = np.random.default_rng(0)
    for N in (3, 17, 64):
        G = rng.normal(size=(N, N)) * (rng.random((N, N)) < 0.2)
        S = np.triu(G, 1)
        S = S + S.T + np.diag(rng.normal(size=N))
        got = trace_moments(S, 8).values
        ref = [np.trace(np.linalg.matrix_power(S, k)) / N for k in range(1, 9)]
        np.testing.assert_allclose(got, ref, rtol=1e-10, atol=1e-12)


def test_m2_sum_of_squares_and_odd_zero():
    P = EnsembleParams(700, 4, 0.3, WeightModel.gaussian(1), seed=3)
    for r in range(3):
        A = sample_matrix(P, r)
        s = trace_moments(A, 7)
        assert s[2] == pytest.approx(sum_of_squares_m2(A), rel=1e-12)
        assert s[1] == 0 and s[3] == 0 and s[5] == 0 and s[7] == 0


def test_block_size_does_not_matter(monkeypatch):
    import bipartite_spectra.estimator as est

    A = sample_matrix(EnsembleParams(600, 3, 0.5, WeightModel.gaussian(1), seed=1))
    a = trace_moments(A, 6).values
    monkeypatch.setattr(est, "CHUNK", 37)
    b = trace_moments(A, 6).values
    assert np.array_equal(a, b)


@pytest.mark.parametrize("k", [2, 4, 6])
def test_tiny_N_against_exact_expectation(k):
    N, p, alpha = 6, 2.0, 0.5
    w = WeightModel.gaussian(1)
    ref = exact_finite_n_moment(N, p, 3, k, even_moments(w, 3))
    rep = monte_carlo(EnsembleParams(N, p, alpha, w, seed=77), 6, 4000)
    assert abs(rep.mean[k - 1] - ref) <= 5 * rep.stderr[k - 1]


def test_m2_finite_n_expectation():
    P = EnsembleParams(2000, 4, 0.3, RAD, seed=5)
    rep = monte_carlo(P, 2, 200)
    ref = finite_n_m2(P, 1)
    assert ref == pytest.approx(1.68)
    assert abs(rep.mean[1] - ref) <= 4 * rep.stderr[1]


def test_monte_carlo_deterministic_and_thread_invariant():
    P = EnsembleParams(400, 3, 0.4, WeightModel.gaussian(1), seed=8)
    a = monte_carlo(P, 6, 6)
    b = monte_carlo(P, 6, 6, threads=3)
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.samples[:, 4], np.zeros(6))


def test_monte_carlo_needs_two_replicas():
    with pytest.raises(ValueError):
        monte_carlo(EnsembleParams(100, 2, 0.5, RAD), 2, 1)


def test_correlator_symmetric():
    rep = monte_carlo(EnsembleParams(300, 3, 0.3, RAD, seed=1), 4, 30)
    assert rep.covariance(2, 4) == rep.covariance(4, 2)
    assert rep.correlator(4, 2).covariance == rep.correlator(2, 4).covariance


def test_correlator_se_shrinks_with_replicas():
    P = EnsembleParams(500, 4, 0.3, RAD, seed=31)
    small = monte_carlo(P, 2, 200).correlator(2, 2).stderr
    large = monte_carlo(P, 2, 400).correlator(2, 2).stderr
    assert 1.15 < small / large < 1.75


def test_scaling_odd_points_dropped():
    res = correlator_scaling(EnsembleParams(100, 2, 0.5, RAD, seed=2), 1, 1, [100, 200, 800], 5, n_boot=10)
    assert res.used == [False, False, False]
    assert math.isnan(res.slope)
    assert res.decay == "undetermined"


def test_scaling_rejects_short_lists():
    with pytest.raises(ValueError):
        correlator_scaling(EnsembleParams(100, 2, 0.5, RAD), 2, 2, [100, 200, 400], 5)


def test_hutchinson_unbiased():
    A = sample_matrix(EnsembleParams(800, 4, 0.3, RAD, seed=12))
    exact = trace_moments(A, 4)
    est = hutchinson_moments(A, 4, 200, np.random.default_rng(0))
    for k in (2, 4):
        assert abs(est[k] - exact[k]) <= 5 * est.stderr[k - 1]


@pytest.mark.slow
def test_bias_shrinks_with_N():
    p, alpha = 4.0, 0.3
    m = compute_moments(p, alpha, [1.0] * 4, 4)
    prev = None
    for N in (500, 1000, 2000, 4000):
        rep = monte_carlo(EnsembleParams(N, p, alpha, RAD, seed=99), 8, 60)
        cur = [(abs(rep.mean[2 * k - 1] - m[2 * k]), rep.stderr[2 * k - 1]) for k in range(1, 5)]
        if prev is not None:
            for (d0, s0), (d1, s1) in zip(prev, cur):
                assert d1 <= d0 + 2 * (s0 + s1)
        prev = cur
