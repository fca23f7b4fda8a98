"""Limiting spectral moments of sparse weighted bipartite graphs.

The moments are assembled from two tables ``S1[l][r]`` and ``S2[l][r]``:
the total weight of essential walks of half-length ``l`` with ``r``
departures from the root, rooted in the first or second part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass(frozen=True)
class ModelParams:
    p: float | Fraction
    alpha: float | Fraction
    K: int

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError(f"p must be positive, got {self.p}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")


@dataclass(frozen=True)
class RecursionTables:
    S1: tuple
    S2: tuple
    binomials: tuple
    K: int

    def s1(self, l: int, r: int):
        return _get(self.S1, l, r)

    def s2(self, l: int, r: int):
        return _get(self.S2, l, r)


def _get(table, l, r):
    if l < 0 or r < 0 or r > l:
        return 0
    return table[l][r]


def pascal(n: int, one=1) -> list:
    """Rows 0..n of Pascal's triangle, built by addition only."""
    rows = [[one]]
    for i in range(1, n + 1):
        prev = rows[-1]
        rows.append([one] + [prev[j - 1] + prev[j] for j in range(1, i)] + [one])
    return rows


def build_tables(p, alpha, moments: Sequence, K: int, *, _allow_degenerate=False) -> RecursionTables:
    """Fill S1 and S2 for 0 <= r <= l <= K.

    ``moments`` is [X_2, ..., X_2K].  The arithmetic type follows the inputs:
    pass Fractions throughout for an exact table.  Every reference on the
    right-hand side has first index l-u-f < l or u < l, so filling by
    increasing l is safe.
    """
    if len(moments) < K:
        raise ValueError(f"need {K} even moments, got {len(moments)}")
    if not _allow_degenerate:
        ModelParams(p, alpha, K)
    exact = isinstance(alpha, Fraction) or isinstance(p, Fraction)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    binom = pascal(2 * K, one)

    def C(n, k):
        return binom[n][k]

    S1 = [[one * alpha]]
    S2 = [[one - alpha]]
    X = [None] + list(moments)
    # below1[f][u] = sum_v C(f+v-1, f-1) S1(u, v), filled as each row u completes
    below1 = [[] for _ in range(K + 1)]
    below2 = [[] for _ in range(K + 1)]

    def close_row(u):
        for f in range(1, K + 1):
            below1[f].append(sum((C(f + v - 1, f - 1) * S1[u][v] for v in range(u + 1)), zero))
            below2[f].append(sum((C(f + v - 1, f - 1) * S2[u][v] for v in range(u + 1)), zero))

    close_row(0)
    for l in range(1, K + 1):
        row1 = [zero] * (l + 1)
        row2 = [zero] * (l + 1)
        for r in range(1, l + 1):
            acc1 = zero
            acc2 = zero
            for f in range(1, r + 1):
                in1 = zero
                in2 = zero
                for u in range(0, l - r + 1):
                    rest = l - u - f
                    if rest < r - f:
                        continue
                    in1 += S1[rest][r - f] * below2[f][u]
                    in2 += S2[rest][r - f] * below1[f][u]
                c = C(r - 1, f - 1) * X[f]
                acc1 += c * in1
                acc2 += c * in2
            row1[r] = p * acc1
            row2[r] = p * acc2
        S1.append(row1)
        S2.append(row2)
        close_row(l)

    return RecursionTables(
        tuple(tuple(r) for r in S1),
        tuple(tuple(r) for r in S2),
        tuple(tuple(r) for r in binom),
        K,
    )


def limiting_moment(tables: RecursionTables, s: int):
    """m_s: zero for odd s, sum_i S1(k,i) + S2(k,i) for s = 2k."""
    if s < 0 or s > 2 * tables.K:
        raise ValueError(f"s={s} outside 0..{2 * tables.K}")
    if s % 2:
        return type(tables.S1[0][0])(0)
    k = s // 2
    return sum(tables.S1[k]) + sum(tables.S2[k])


def limiting_moments(tables: RecursionTables) -> list:
    """[m_0, m_1, ..., m_2K]."""
    return [limiting_moment(tables, s) for s in range(2 * tables.K + 1)]


def compute_moments(p, alpha, moments: Sequence, K: int) -> list:
    return limiting_moments(build_tables(p, alpha, moments, K))


@dataclass(frozen=True)
class CarlemanReport:
    partial_sums: list
    truncated: bool
    note: str = "finite partial sums cannot establish divergence"


def carleman_report(m: Sequence) -> CarlemanReport:
    """Partial sums of m_2k^(-1/2k) for k = 1..K.

    Stops at the first vanishing even moment and flags the truncation.
    """
    sums = []
    total = 0.0
    for k in range(1, (len(m) - 1) // 2 + 1):
        val = float(m[2 * k])
        if val <= 0:
            return CarlemanReport(sums, True)
        total += val ** (-1.0 / (2 * k))
        sums.append(total)
    return CarlemanReport(sums, False)


def growth_ratios(m: Sequence) -> list:
    """m_2k^(1/2k) / k for k = 1..K, the quantity bounded under the growth condition."""
    return [float(m[2 * k]) ** (1.0 / (2 * k)) / k for k in range(1, (len(m) - 1) // 2 + 1)]


def hankel_min_eigenvalue(m: Sequence, scaled: bool = False) -> float:
    """Smallest eigenvalue of the Hankel matrix (m[i+j]) divided by its trace.

    ``scaled=True`` first applies the diagonal congruence D H D with
    D = diag(H)^(-1/2), which preserves the inertia but makes the test
    sensitive to the small directions drowned out by m_2K.
    """
    import numpy as np

    K = (len(m) - 1) // 2
    H = np.array([[float(m[i + j]) for j in range(K + 1)] for i in range(K + 1)])
    if scaled:
        d = 1.0 / np.sqrt(np.diag(H))
        H = H * d[:, None] * d[None, :]
    return float(np.linalg.eigvalsh(H).min() / np.trace(H))


def hankel_is_psd_exact(m: Sequence) -> bool:
    """Exact positive-semidefiniteness test of (m[i+j]) by rational LDL^T.

    Meant for Fraction input.  A zero pivot with a nonzero remaining column
    means the matrix is indefinite.
    """
    K = (len(m) - 1) // 2
    A = [[Fraction(m[i + j]) for j in range(K + 1)] for i in range(K + 1)]
    n = K + 1
    for i in range(n):
        piv = A[i][i]
        if piv < 0:
            return False
        if piv == 0:
            if any(A[i][j] != 0 for j in range(i + 1, n)):
                return False
            continue
        for j in range(i + 1, n):
            fac = A[j][i] / piv
            for c in range(i, n):
                A[j][c] -= fac * A[i][c]
    return True


def p_polynomial(k: int, alpha, moments: Sequence) -> list:
    """Coefficients of m_2k as a polynomial in p (index j is the p^j coefficient).

    Recovered by exact interpolation at p = 1..k+1; every table entry is a
    polynomial in p of degree at most l.
    """
    pts = [Fraction(j) for j in range(1, k + 2)]
    vals = [compute_moments(x, Fraction(alpha), [Fraction(v) for v in moments], k)[2 * k] for x in pts]
    return _interpolate(pts, vals)


def _interpolate(xs, ys):
    # Newton divided differences, then expansion to monomial coefficients
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        new = [Fraction(0)] * n
        for d in range(n - 1):
            new[d + 1] += poly[d]
        for d in range(n):
            new[d] -= xs[i] * poly[d]
        new[0] += coef[i]
        poly = new
    return poly


__all__ = [
    "ModelParams",
    "RecursionTables",
    "CarlemanReport",
    "build_tables",
    "limiting_moment",
    "limiting_moments",
    "compute_moments",
    "carleman_report",
    "growth_ratios",
    "hankel_min_eigenvalue",
    "hankel_is_psd_exact",
    "p_polynomial",
    "pascal",
]
