"""Finite-N samples of the weighted bipartite sparse adjacency matrix.

Vertices 0..n1-1 form the first part, n1 = floor(alpha N); the rest form the
second.  Every cross pair is an edge independently with probability p/N and
carries an independent weight.  Same-part pairs and the diagonal are zero.

Randomness: each first-part row draws from its own Philox stream whose key
comes from the seed and whose counter starts at (replica, row).  Any row of
any replica can therefore be regenerated alone, and the output does not
depend on how replicas are scheduled across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np
import scipy.sparse as sp

from .weights import NotSamplableError, WeightModel, sample_weights


class DegeneratePartsError(ValueError):
    pass


def part_size(N: int, alpha) -> int:
    """floor(alpha N), reading float alpha as the decimal it was written as."""
    a = Fraction(repr(alpha)) if isinstance(alpha, float) else Fraction(alpha)
    return math.floor(a * N)


@dataclass(frozen=True)
class EnsembleParams:
    N: int
    p: float
    alpha: float
    weights: WeightModel
    seed: int = 0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if not 0 < self.p <= self.N:
            raise ValueError(f"p must lie in (0, N], got p={self.p}, N={self.N}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def n1(self) -> int:
        return part_size(self.N, self.alpha)

    @property
    def n2(self) -> int:
        return self.N - self.n1

    def with_N(self, N: int) -> "EnsembleParams":
        return EnsembleParams(N, self.p, self.alpha, self.weights, self.seed)


@dataclass(frozen=True)
class SparseSymmetricMatrix:
    """Upper-triangle coordinate list (0-based, rows < cols) of a symmetric matrix."""

    N: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray

    @property
    def nnz_pairs(self) -> int:
        return len(self.values)

    def to_csr(self) -> sp.csr_matrix:
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        v = np.concatenate([self.values, self.values])
        return sp.csr_matrix((v, (r, c)), shape=(self.N, self.N))

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()

    def dump(self, fh: TextIO) -> None:
        """Write "N nnz" then one "i j value" line per pair, 1-based, ordered by (i, j)."""
        order = np.lexsort((self.cols, self.rows))
        fh.write(f"{self.N} {self.nnz_pairs}\n")
        for t in order:
            fh.write(f"{self.rows[t] + 1} {self.cols[t] + 1} {float(self.values[t])!r}\n")

    @classmethod
    def load(cls, fh: TextIO) -> "SparseSymmetricMatrix":
        N, nnz = (int(x) for x in fh.readline().split())
        rows, cols, vals = [], [], []
        for _ in range(nnz):
            i, j, v = fh.readline().split()
            rows.append(int(i) - 1)
            cols.append(int(j) - 1)
            vals.append(float(v))
        return cls(N, np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals))


def _seed_key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)


def row_stream(seed: int, replica: int, row: int, key=None) -> np.random.Generator:
    if key is None:
        key = _seed_key(seed)
    counter = np.array([0, 0, row, replica], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def _geometric_skip(rng: np.random.Generator, n: int, q: float) -> np.ndarray:
    """Indices in [0, n) kept independently with probability q, by geometric gaps."""
    if q >= 1.0:
        return np.arange(n, dtype=np.int64)
    mean = n * q
    batch = int(mean + 6.0 * math.sqrt(mean) + 8)
    chunks = []
    last = -1
    while True:
        pos = last + np.cumsum(rng.geometric(q, size=batch))
        inside = pos[pos < n]
        chunks.append(inside)
        if len(inside) < len(pos):
            break
        last = int(pos[-1])
    return np.concatenate(chunks)


def sample_matrix(params: EnsembleParams, replica: int = 0) -> SparseSymmetricMatrix:
    """Draw one realization; deterministic in (params, replica)."""
    if not params.weights.samplable:
        raise NotSamplableError("custom moment models cannot be sampled")
    n1, n2, N = params.n1, params.n2, params.N
    if n1 < 1 or n2 < 1:
        raise DegeneratePartsError(
            f"floor(alpha N) = {n1} leaves a part empty (N={N}, alpha={params.alpha})"
        )
    q = params.p / N
    key = _seed_key(params.seed)
    rows, cols, vals = [], [], []
    for i in range(n1):
        rng = row_stream(params.seed, replica, i, key)
        js = _geometric_skip(rng, n2, q)
        if len(js):
            rows.append(np.full(len(js), i, dtype=np.int64))
            cols.append(js + n1)
            vals.append(sample_weights(params.weights, rng, len(js)))
    if rows:
        return SparseSymmetricMatrix(N, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))
    empty = np.zeros(0, dtype=np.int64)
    return SparseSymmetricMatrix(N, empty, empty.copy(), np.zeros(0))


@dataclass(frozen=True)
class DensityReport:
    replicas: int
    mean: float
    variance: float
    expected_mean: float
    expected_variance: float

    @property
    def mean_z(self) -> float:
        """Standardized deviation of the mean pair count from the binomial mean."""
        if self.expected_variance == 0:
            return 0.0 if self.mean == self.expected_mean else math.inf
        return (self.mean - self.expected_mean) / math.sqrt(self.expected_variance / self.replicas)


def edge_density_report(params: EnsembleParams, replicas: int) -> DensityReport:
    counts = np.array([sample_matrix(params, r).nnz_pairs for r in range(replicas)], dtype=float)
    q = params.p / params.N
    pairs = params.n1 * params.n2
    var = float(counts.var(ddof=1)) if replicas > 1 else 0.0
    return DensityReport(replicas, float(counts.mean()), var, pairs * q, pairs * q * (1 - q))
