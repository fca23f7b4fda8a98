"""Brute-force ground truth by enumerating essential walks.

An essential walk is a closed walk, labelled minimally (root is 1, each new
vertex takes the next free label), whose underlying simple graph is a tree.
Summing the part-weighted contributions of all essential walks of length
2k gives the limiting moment m_2k without using the recursion at all.

The module also implements the two splittings that underlie the recursion:

* ``decompose`` / ``gather``: cut at the first edge (1, 2) into the walk on
  the subtree through that edge, the walk on the rest, and a 0/1 code
  recording which side each root departure goes to.
* ``second_split`` / ``second_join``: for walks with a single root edge,
  peel that edge off, leaving the walk rooted at vertex 2 plus a code over
  the departures from vertex 2.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

DEFAULT_CAP = 7

Walk = tuple


class EnumerationCapError(ValueError):
    pass


class WalkContractError(ValueError):
    pass


def enumerate_essential_walks(k: int, cap: int = DEFAULT_CAP) -> Iterator[Walk]:
    """Yield every essential walk of length 2k once, in lexicographic order.

    ``k = 0`` yields the single-vertex walk ``(1,)``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > cap:
        raise EnumerationCapError(
            f"k={k} exceeds the enumeration cap {cap}; "
            f"{estimate_count(k):,} walks would be generated "
            "(pass a larger cap to override)"
        )
    if k == 0:
        yield (1,)
        return

    n_steps = 2 * k
    path = [1]
    parent = {1: 0}
    depth = {1: 0}
    children: dict[int, list[int]] = {1: []}

    def rec(cur: int, used: int, step: int):
        remaining = n_steps - step
        if remaining == 0:
            if cur == 1:
                yield tuple(path)
            return
        # each option keeps the skeleton a tree: move to a neighbour or grow a leaf
        options = []
        if parent[cur]:
            options.append(parent[cur])
        options.extend(children[cur])
        options.sort()
        for nxt in options:
            if depth[nxt] <= remaining - 1:
                path.append(nxt)
                yield from rec(nxt, used, step + 1)
                path.pop()
        new = used + 1
        # a new leaf costs at least two more steps (out and back) beyond the way home
        if depth[cur] + 1 <= remaining - 1 and new - 1 < k + 1:
            parent[new] = cur
            depth[new] = depth[cur] + 1
            children[new] = []
            children[cur].append(new)
            path.append(new)
            yield from rec(new, new, step + 1)
            path.pop()
            children[cur].pop()
            del parent[new], depth[new], children[new]

    yield from rec(1, 1, 0)


@lru_cache(maxsize=None)
def estimate_count(k: int) -> int:
    """Number of essential walks of length 2k, without enumerating them.

    Uses the unweighted first-edge/second-split counting identity, so it is
    exact, but it is only used to size refusals.
    """
    S = [[1]]
    below = {}

    def b(f, u):
        if (f, u) not in below:
            below[f, u] = sum(math.comb(f + v - 1, f - 1) * S[u][v] for v in range(u + 1))
        return below[f, u]

    for l in range(1, k + 1):
        row = [0] * (l + 1)
        for r in range(1, l + 1):
            row[r] = sum(
                math.comb(r - 1, f - 1) * S[l - u - f][r - f] * b(f, u)
                for f in range(1, r + 1)
                for u in range(l - r + 1)
                if l - u - f >= r - f
            )
        S.append(row)
    return sum(S[k])


@lru_cache(maxsize=None)
def essential_walks(k: int, cap: int = DEFAULT_CAP) -> tuple:
    """Cached tuple of all essential walks of length 2k."""
    return tuple(enumerate_essential_walks(k, cap))


def minimize(seq: Sequence) -> Walk:
    """Relabel vertices in order of first appearance, starting at 1."""
    labels: dict = {}
    out = []
    for x in seq:
        if x not in labels:
            labels[x] = len(labels) + 1
        out.append(labels[x])
    return tuple(out)


def is_minimal(w: Sequence) -> bool:
    return tuple(w) == minimize(w)


def edge_multiplicities(w: Sequence) -> Counter:
    """n_w(e): traversals of each undirected edge, keyed by sorted pair."""
    return Counter((min(a, b), max(a, b)) for a, b in zip(w, w[1:]))


def is_essential(w: Sequence) -> bool:
    w = tuple(w)
    if len(w) == 1:
        return w == (1,)
    if w[0] != w[-1] or not is_minimal(w):
        return False
    if any(a == b for a, b in zip(w, w[1:])):
        return False
    edges = edge_multiplicities(w)
    return len(set(w)) == len(edges) + 1


def parity(w: Sequence) -> dict:
    """Distance-from-root parity of each vertex of a tree-skeleton walk.

    Raises if two adjacent vertices get the same parity.
    """
    par = {w[0]: 0}
    for a, b in zip(w, w[1:]):
        if b not in par:
            par[b] = 1 - par[a]
        elif par[b] == par[a]:
            raise WalkContractError(f"walk {w} has an odd cycle")
    return par


@dataclass(frozen=True)
class Skeleton:
    vertices: frozenset
    multiplicities: dict
    parity: dict

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.multiplicities)

    @property
    def beta(self) -> int:
        """Number of vertices at even distance from the root."""
        return sum(1 for v in self.vertices if self.parity[v] == 0)

    def is_tree(self) -> bool:
        return self.n_vertices == self.n_edges + 1


def skeleton(w: Sequence) -> Skeleton:
    return Skeleton(frozenset(w), dict(edge_multiplicities(w)), parity(w))


def contribution(w: Sequence, p, alpha, moments: Sequence):
    """Return (theta1, theta2) for an essential walk.

    theta1 weights the root in the first part: alpha^beta (1-alpha)^(|V|-beta)
    times p X_n(e) over the edges.  theta2 swaps alpha and 1-alpha.
    """
    sk = skeleton(w)
    if not sk.is_tree():
        raise WalkContractError(f"skeleton of {tuple(w)} is not a tree")
    edge_factor = 1
    for n in sk.multiplicities.values():
        if n % 2:
            raise WalkContractError(f"edge traversed an odd number of times ({n}) in {tuple(w)}")
        f = n // 2
        if f > len(moments):
            raise ValueError(f"walk needs X_{n} but only {len(moments)} even moments given")
        edge_factor = edge_factor * p * moments[f - 1]
    b = sk.beta
    rest = sk.n_vertices - b
    one = 1 if isinstance(alpha, Fraction) else 1.0
    theta1 = alpha**b * (one - alpha) ** rest * edge_factor
    theta2 = (one - alpha) ** b * alpha**rest * edge_factor
    return theta1, theta2


def walk_signature(w: Sequence) -> tuple:
    """(beta, |V|, sorted half-multiplicities): everything a contribution depends on."""
    sk = skeleton(w)
    return sk.beta, sk.n_vertices, tuple(sorted(n // 2 for n in sk.multiplicities.values()))


@lru_cache(maxsize=None)
def signature_counts(k: int, cap: int = DEFAULT_CAP) -> tuple:
    return tuple(sorted(Counter(walk_signature(w) for w in essential_walks(k, cap)).items()))


def oracle_moment(k: int, p, alpha, moments: Sequence, cap: int = DEFAULT_CAP):
    """m_2k as the sum of theta1 + theta2 over all essential walks of length 2k.

    Walks sharing a signature have equal contributions, so the sum is taken
    over signature classes with multiplicities; the order is fixed, so float
    results are reproducible.
    """
    if k == 0:
        return alpha + (1 - alpha)
    one = Fraction(1) if isinstance(alpha, Fraction) else 1.0
    total = 0 * one
    for (b, nv, halves), count in signature_counts(k, cap):
        edge_factor = one
        for f in halves:
            edge_factor = edge_factor * p * moments[f - 1]
        rest = nv - b
        total += count * (alpha**b * (one - alpha) ** rest + (one - alpha) ** b * alpha**rest) * edge_factor
    return total


def oracle_moment_direct(k: int, p, alpha, moments: Sequence, cap: int = DEFAULT_CAP):
    """Same as ``oracle_moment`` but summing walk by walk."""
    total = 0
    for w in essential_walks(k, cap):
        t1, t2 = contribution(w, p, alpha, moments)
        total = total + t1 + t2
    return total


# -- walk parameters -------------------------------------------------------


def half_length(w: Sequence) -> int:
    return (len(w) - 1) // 2


def root_departures(w: Sequence) -> int:
    """r: number of steps leaving the root."""
    root = w[0]
    return sum(1 for a in w[:-1] if a == root)


def root_degree(w: Sequence) -> int:
    root = w[0]
    return len({b for a, b in zip(w, w[1:]) if a == root})


def first_edge_params(w: Sequence) -> tuple:
    """(l, r, u, f) of a nonempty essential walk."""
    d = decompose(w)
    return half_length(w), len(d.code), half_length(d.left) - sum(d.code), sum(d.code)


# -- first-edge decomposition ----------------------------------------------


@dataclass(frozen=True)
class WalkDecomposition:
    left: Walk
    right: Walk
    code: tuple


def _component_through_first_edge(w: Sequence) -> set:
    root, nu = w[0], w[1]
    adj: dict = {}
    for a, b in zip(w, w[1:]):
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    seen = {nu}
    stack = [nu]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y != root and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def decompose(w: Sequence) -> WalkDecomposition:
    """Split an essential walk at its first edge.

    Steps inside the subtree through the first edge (with that edge) go to
    ``left``, all other steps to ``right``; both are re-minimized.  ``code``
    has one symbol per root departure, 1 iff it goes to vertex 2.
    """
    w = tuple(w)
    if len(w) < 3:
        raise WalkContractError("cannot decompose a walk of length zero")
    root = w[0]
    side = _component_through_first_edge(w)
    left = [root]
    right = [root]
    code = []
    for a, b in zip(w, w[1:]):
        if a == root:
            code.append(1 if b == w[1] else 0)
        if a in side or b in side:
            left.append(b)
        else:
            right.append(b)
    return WalkDecomposition(minimize(left), minimize(right), tuple(code))


def _excursions(w: Sequence) -> list:
    """Split a closed walk into excursions from its root (each without the leading root)."""
    root = w[0]
    out = []
    cur: list = []
    for x in w[1:]:
        cur.append(x)
        if x == root:
            out.append(cur)
            cur = []
    return out


def gather(left: Sequence, right: Sequence, code: Sequence) -> Walk:
    """Inverse of ``decompose``: interleave root excursions of the two parts per ``code``."""
    left, right, code = tuple(left), tuple(right), tuple(code)
    if not code or code[0] != 1 or any(c not in (0, 1) for c in code):
        raise WalkContractError(f"code {code} must be a 0/1 sequence starting with 1")
    if root_degree(left) != 1:
        raise WalkContractError("left part must have exactly one edge at the root")
    lex = _excursions(left)
    rex = _excursions(right)
    if sum(code) != len(lex):
        raise WalkContractError(
            f"code has {sum(code)} ones but left part has {len(lex)} root departures"
        )
    if len(code) - sum(code) != len(rex):
        raise WalkContractError(
            f"code has {len(code) - sum(code)} zeros but right part has {len(rex)} root departures"
        )
    # tag vertices by side so labels cannot collide; the root is shared
    root = ("root",)
    tag_l = {left[0]: root}
    tag_r = {right[0]: root}
    out = [root]
    li = ri = 0
    for c in code:
        if c:
            out.extend(tag_l.get(x, ("L", x)) for x in lex[li])
            li += 1
        else:
            out.extend(tag_r.get(x, ("R", x)) for x in rex[ri])
            ri += 1
    return minimize(out)


# -- second split (single root edge) ---------------------------------------


def second_split(w: Sequence) -> tuple:
    """Peel the root edge off a walk whose skeleton has one edge at the root.

    Returns ``(inner, code2)``: ``inner`` is the re-minimized walk formed by
    the steps below vertex 2, rooted there; ``code2`` has one symbol per
    departure from vertex 2, 1 iff it goes back to the root.  The last
    symbol is always 1.
    """
    w = tuple(w)
    if len(w) < 3:
        raise WalkContractError("cannot split a walk of length zero")
    if root_degree(w) != 1:
        raise WalkContractError(f"{w} has more than one edge at the root")
    root, nu = w[0], w[1]
    inner = [nu]
    code2 = []
    for a, b in zip(w, w[1:]):
        if a == nu:
            code2.append(1 if b == root else 0)
        if a != root and b != root:
            inner.append(b)
    return minimize(inner), tuple(code2)


def second_join(inner: Sequence, code2: Sequence) -> Walk:
    """Inverse of ``second_split``."""
    inner, code2 = tuple(inner), tuple(code2)
    if not code2 or code2[-1] != 1 or any(c not in (0, 1) for c in code2):
        raise WalkContractError(f"code {code2} must be a 0/1 sequence ending with 1")
    ex = _excursions(inner)
    if len(code2) - sum(code2) != len(ex):
        raise WalkContractError(
            f"code has {len(code2) - sum(code2)} zeros but inner walk has {len(ex)} root departures"
        )
    # inner root becomes vertex 2, the rest shift up by one
    out = [1, 2]
    ei = 0
    for i, c in enumerate(code2):
        if c:
            out.append(1)
            if i < len(code2) - 1:
                out.append(2)
        else:
            out.extend(x + 1 for x in ex[ei])
            ei += 1
    return minimize(out)


def codes(length: int, ones: int, first_one: bool = False, last_one: bool = False) -> Iterator[tuple]:
    """All 0/1 sequences of ``length`` with ``ones`` ones, optionally pinned at an end."""
    from itertools import combinations

    for pos in combinations(range(length), ones):
        if first_one and (not pos or pos[0] != 0):
            continue
        if last_one and (not pos or pos[-1] != length - 1):
            continue
        s = [0] * length
        for i in pos:
            s[i] = 1
        yield tuple(s)
