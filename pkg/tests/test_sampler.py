import io
import math

import numpy as np
import pytest

from bipartite_spectra.sampler import (
    DegeneratePartsError,
    EnsembleParams,
    SparseSymmetricMatrix,
    _geometric_skip,
    edge_density_report,
    part_size,
    row_stream,
    sample_matrix,
)
from bipartite_spectra.weights import NotSamplableError, WeightModel

RAD = WeightModel.rademacher()


def test_part_size_reads_decimal():
    assert part_size(2000, 0.3) == 600
    assert part_size(10, 0.05) == 0
    assert part_size(7, 0.5) == 3


def test_full_density_when_p_equals_N():
    P = EnsembleParams(20, 20, 0.3, RAD, seed=1)
    A = sample_matrix(P)
    assert A.nnz_pairs == 6 * 14


def test_degenerate_parts():
    with pytest.raises(DegeneratePartsError):
        sample_matrix(EnsembleParams(10, 2, 0.05, RAD))


def test_p_above_N_rejected():
    with pytest.raises(ValueError, match="p must"):
        EnsembleParams(10, 11, 0.5, RAD)


def test_custom_weights_not_samplable():
    with pytest.raises(NotSamplableError):
        sample_matrix(EnsembleParams(10, 2, 0.5, WeightModel.custom([1, 1])))


def test_support_is_bipartite_and_symmetric():
    P = EnsembleParams(300, 5, 0.4, WeightModel.gaussian(1), seed=9)
    A = sample_matrix(P, 3)
    n1 = P.n1
    assert np.all(A.rows < n1) and np.all(A.cols >= n1)
    assert np.all(A.rows < A.cols)
    D = A.to_dense()
    assert np.array_equal(D, D.T)
    assert np.all(np.diag(D) == 0)
    assert np.all(D[:n1, :n1] == 0) and np.all(D[n1:, n1:] == 0)
    assert len(set(zip(A.rows.tolist(), A.cols.tolist()))) == A.nnz_pairs


def test_deterministic_per_replica():
    P = EnsembleParams(500, 3, 0.3, WeightModel.gaussian(2), seed=42)
    a, b = sample_matrix(P, 7), sample_matrix(P, 7)
    assert np.array_equal(a.rows, b.rows) and np.array_equal(a.values, b.values)
    c = sample_matrix(P, 8)
    assert not (len(a.values) == len(c.values) and np.array_equal(a.values, c.values))


def test_rows_independent_of_other_rows():
    key_a = row_stream(5, 2, 10).random(4)
    key_b = row_stream(5, 2, 10).random(4)
    assert np.array_equal(key_a, key_b)
    assert not np.array_equal(key_a, row_stream(5, 2, 11).random(4))
    assert not np.array_equal(key_a, row_stream(5, 3, 10).random(4))
    assert not np.array_equal(key_a, row_stream(6, 2, 10).random(4))


def test_geometric_skip_is_bernoulli():
    rng = np.random.default_rng(0)
    n, q, reps = 50, 0.1, 20000
    hits = np.zeros(n)
    for _ in range(reps):
        idx = _geometric_skip(rng, n, q)
        assert np.all(np.diff(idx) > 0)
        hits[idx] += 1
    freq = hits / reps
    se = math.sqrt(q * (1 - q) / reps)
    assert np.all(np.abs(freq - q) <= 5 * se)


def test_mean_pair_count():
    P = EnsembleParams(2000, 4, 0.3, RAD, seed=2024)
    counts = np.array([sample_matrix(P, r).nnz_pairs for r in range(200)])
    q = 4 / 2000
    mean = 600 * 1400 * q
    assert mean == pytest.approx(1680)
    se = math.sqrt(600 * 1400 * q * (1 - q) / 200)
    assert abs(counts.mean() - mean) <= 4 * se


def test_density_report_full():
    rep = edge_density_report(EnsembleParams(12, 12, 0.5, RAD), 5)
    assert rep.variance == 0 and rep.mean == 36


def test_density_report_binomial_variance():
    R = 400
    rep = edge_density_report(EnsembleParams(400, 3, 0.25, RAD, seed=11), R)
    rel_se = math.sqrt(2 / (R - 1))
    assert abs(rep.variance / rep.expected_variance - 1) <= 5 * rel_se
    assert abs(rep.mean_z) <= 5


def test_density_report_deterministic():
    P = EnsembleParams(300, 2, 0.5, RAD, seed=3)
    assert edge_density_report(P, 10) == edge_density_report(P, 10)


def test_weight_second_moment():
    P = EnsembleParams(3000, 6, 0.5, WeightModel.gaussian(1.5), seed=4)
    vals = np.concatenate([sample_matrix(P, r).values for r in range(10)])
    se = (vals**2).std(ddof=1) / math.sqrt(len(vals))
    assert abs((vals**2).mean() - 2.25) <= 5 * se


def test_dump_format_and_load():
    A = sample_matrix(EnsembleParams(30, 6, 0.5, WeightModel.gaussian(1), seed=5))
    buf = io.StringIO()
    A.dump(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == f"30 {A.nnz_pairs}"
    pairs = [tuple(map(int, ln.split()[:2])) for ln in lines[1:]]
    assert pairs == sorted(pairs)
    assert all(1 <= i < j <= 30 for i, j in pairs)
    B = SparseSymmetricMatrix.load(io.StringIO(buf.getvalue()))
    assert np.array_equal(A.to_dense(), B.to_dense())
