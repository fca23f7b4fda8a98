"""Empirical spectral moments (1/N) Tr A^k and their Monte Carlo statistics."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .sampler import EnsembleParams, SparseSymmetricMatrix, sample_matrix

CHUNK = 256


@dataclass(frozen=True)
class MomentSample:
    replica: int
    values: np.ndarray  # values[k-1] = M_k
    stderr: np.ndarray | None = None  # only for the randomized estimator

    def __getitem__(self, k: int) -> float:
        return float(self.values[k - 1])


def _as_csr(A) -> sp.csr_matrix:
    if isinstance(A, SparseSymmetricMatrix):
        return A.to_csr()
    if sp.issparse(A):
        return sp.csr_matrix(A)
    return sp.csr_matrix(np.asarray(A, dtype=float))


def trace_moments(A, k_max: int, replica: int = 0) -> MomentSample:
    """M_k = (1/N) sum_i (A^k)_ii for k = 1..k_max, exactly up to rounding.

    Each basis vector is pushed through A k_max times (in column blocks) and
    the returned coordinate is collected; sums use math.fsum so the result
    does not depend on block size.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    csr = _as_csr(A)
    N = csr.shape[0]
    diag_terms = [[] for _ in range(k_max)]
    for start in range(0, N, CHUNK):
        stop = min(start + CHUNK, N)
        idx = np.arange(start, stop)
        V = np.zeros((N, stop - start))
        V[idx, idx - start] = 1.0
        for k in range(k_max):
            V = csr @ V
            diag_terms[k].append(V[idx, idx - start])
    vals = np.array([math.fsum(np.concatenate(d)) / N for d in diag_terms]) + 0.0
    return MomentSample(replica, vals)


def hutchinson_moments(A, k_max: int, probes: int, rng: np.random.Generator, replica: int = 0) -> MomentSample:
    """Randomized estimate of M_k from Rademacher probes z: mean of z^T A^k z / N.

    Reports the standard error across probes.  Odd moments are not exactly
    zero here; use ``trace_moments`` when that matters.
    """
    csr = _as_csr(A)
    N = csr.shape[0]
    Z = 2.0 * rng.integers(0, 2, size=(N, probes)) - 1.0
    V = Z
    est = np.empty((k_max, probes))
    for k in range(k_max):
        V = csr @ V
        est[k] = np.einsum("ij,ij->j", Z, V) / N
    se = est.std(axis=1, ddof=1) / math.sqrt(probes) if probes > 1 else np.full(k_max, np.nan)
    return MomentSample(replica, est.mean(axis=1), se)


def sum_of_squares_m2(A: SparseSymmetricMatrix) -> float:
    """(2/N) sum over stored pairs of value^2, i.e. M_2 without any mat-vec."""
    return 2.0 * math.fsum(A.values**2) / A.N


@dataclass
class MomentReport:
    params: EnsembleParams
    k_max: int
    samples: np.ndarray  # shape (replicas, k_max)
    mean: np.ndarray = field(init=False)
    variance: np.ndarray = field(init=False)
    stderr: np.ndarray = field(init=False)

    def __post_init__(self):
        R = self.samples.shape[0]
        self.mean = self.samples.mean(axis=0)
        self.variance = self.samples.var(axis=0, ddof=1)
        self.stderr = np.sqrt(self.variance / R)

    @property
    def replicas(self) -> int:
        return self.samples.shape[0]

    def covariance(self, k: int, m: int) -> float:
        """Unbiased sample covariance of (M_k, M_m) across replicas."""
        x = self.samples[:, k - 1]
        y = self.samples[:, m - 1]
        R = len(x)
        return float(np.dot(x - x.mean(), y - y.mean()) / (R - 1))

    def correlator(self, k: int, m: int) -> "CorrelatorEstimate":
        x = self.samples[:, k - 1] - self.samples[:, k - 1].mean()
        y = self.samples[:, m - 1] - self.samples[:, m - 1].mean()
        R = len(x)
        prod = x * y
        se = float(prod.std(ddof=1) / math.sqrt(R)) if R > 1 else math.nan
        return CorrelatorEstimate(min(k, m), max(k, m), self.covariance(k, m), se, self.params.N)


@dataclass(frozen=True)
class CorrelatorEstimate:
    k: int
    m: int
    covariance: float
    stderr: float
    N: int


def _replica(params: EnsembleParams, k_max: int, r: int, hutchinson_probes: int | None) -> np.ndarray:
    A = sample_matrix(params, r)
    if hutchinson_probes:
        rng = np.random.Generator(np.random.Philox(key=np.random.SeedSequence([params.seed, r]).generate_state(2, dtype=np.uint64)))
        return hutchinson_moments(A, k_max, hutchinson_probes, rng, r).values
    return trace_moments(A, k_max, r).values


def monte_carlo(
    params: EnsembleParams,
    k_max: int,
    replicas: int,
    threads: int = 1,
    hutchinson_probes: int | None = None,
) -> MomentReport:
    """Sample ``replicas`` matrices and collect M_1..M_k_max for each.

    Replica r uses stream index r, so the report is identical for any
    thread count.
    """
    if replicas < 2:
        raise ValueError("need at least 2 replicas")
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(lambda r: _replica(params, k_max, r, hutchinson_probes), range(replicas)))
    else:
        rows = [_replica(params, k_max, r, hutchinson_probes) for r in range(replicas)]
    return MomentReport(params, k_max, np.vstack(rows))


@dataclass
class ScalingResult:
    k: int
    m: int
    N: list
    covariance: list
    stderr: list
    used: list  # False where the covariance was not positive and the point was dropped
    slope: float
    intercept: float
    slope_stderr: float
    slope_ci: tuple
    decay: str  # "faster than 1/N", "consistent with 1/N", "slower than 1/N" or "undetermined"

    @property
    def faster_than_inverse_N(self) -> bool:
        return self.decay == "faster than 1/N"

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "points": [
                {"N": n, "covariance": c, "stderr": s, "used": u}
                for n, c, s, u in zip(self.N, self.covariance, self.stderr, self.used)
            ],
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_stderr": self.slope_stderr,
            "slope_ci95": list(self.slope_ci),
            "decay": self.decay,
            "faster_than_inverse_N": self.faster_than_inverse_N,
        }


def _fit(logN, logC):
    if len(logN) < 2:
        return math.nan, math.nan
    slope, intercept = np.polyfit(logN, logC, 1)
    return float(slope), float(intercept)


def correlator_scaling(
    base: EnsembleParams,
    k: int,
    m: int,
    N_list,
    replicas: int,
    n_boot: int = 1000,
    threads: int = 1,
) -> ScalingResult:
    """Least-squares slope of log C_{k,m}(N) against log N, with bootstrap error bars.

    Points with a non-positive covariance estimate are dropped.  The
    bootstrap resamples replicas independently at each N.
    """
    N_list = sorted(N_list)
    if len(N_list) < 3 or N_list[-1] < 8 * N_list[0]:
        raise ValueError("N_list needs at least 3 sizes spanning a factor of 8")
    k_max = max(k, m)
    cols = []
    covs, ses, used = [], [], []
    for N in N_list:
        rep = monte_carlo(base.with_N(N), k_max, replicas, threads)
        est = rep.correlator(k, m)
        x = rep.samples[:, k - 1]
        y = rep.samples[:, m - 1]
        cols.append((x, y))
        covs.append(est.covariance)
        ses.append(est.stderr)
        used.append(est.covariance > 0)
    logN = np.log([n for n, u in zip(N_list, used) if u])
    logC = np.log([c for c, u in zip(covs, used) if u])
    slope, intercept = _fit(logN, logC)

    boot = []
    if len(logN) >= 2:
        rng = np.random.Generator(np.random.Philox(key=np.random.SeedSequence([base.seed, k, m]).generate_state(2, dtype=np.uint64)))
        R = replicas
        for _ in range(n_boot):
            lc = []
            ln = []
            for N, (x, y), u in zip(N_list, cols, used):
                if not u:
                    continue
                idx = rng.integers(0, R, size=R)
                xs, ys = x[idx], y[idx]
                c = np.dot(xs - xs.mean(), ys - ys.mean()) / (R - 1)
                if c > 0:
                    lc.append(math.log(c))
                    ln.append(math.log(N))
            if len(ln) >= 2:
                boot.append(_fit(np.array(ln), np.array(lc))[0])
    if boot:
        boot = np.array(boot)
        slope_se = float(boot.std(ddof=1))
        ci = (float(np.percentile(boot, 2.5)), float(np.percentile(boot, 97.5)))
    else:
        slope_se = math.nan
        ci = (math.nan, math.nan)
    if math.isnan(ci[0]):
        decay = "undetermined"
    elif ci[1] < -1.0:
        decay = "faster than 1/N"
    elif ci[0] > -1.0:
        decay = "slower than 1/N"
    else:
        decay = "consistent with 1/N"
    return ScalingResult(k, m, list(N_list), covs, ses, used, slope, intercept, slope_se, ci, decay)


def finite_n_m2(params: EnsembleParams, X2) -> float:
    """Exact E M_2 at finite N: 2 n1 n2 (p/N) X_2 / N."""
    return 2.0 * params.n1 * params.n2 * (params.p / params.N) * float(X2) / params.N
