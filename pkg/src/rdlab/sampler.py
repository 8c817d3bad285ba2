"""Samplers for d-regular digraph adjacency matrices.

A d-regular digraph on n vertices is encoded by its n x n 0-1 adjacency
matrix with every row and column summing to d.  The main sampler is a
directed-switch Markov chain whose stationary distribution is uniform over
all such matrices; a rejection sampler based on sums of d random
permutation matrices is offered for small d (contiguous to uniform, not
uniform).  Exact counting of the state space is available at tiny sizes as
an oracle for uniformity tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from io import StringIO

import numpy as np
from numba import njit

from ._rng import generator

__all__ = [
    "RegularDigraph",
    "SwitchChain",
    "PermutationSum",
    "default_burn_in",
    "sample_rrd",
    "sample_bernoulli",
    "count_regular_matrices",
    "canfield_mckay_log_prob",
    "to_edge_list",
    "from_edge_list",
]


@dataclass
class RegularDigraph:
    """Adjacency matrix of a d-regular digraph on n vertices."""

    n: int
    d: int
    adjacency: np.ndarray

    def validate(self) -> None:
        a = self.adjacency
        if a.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {a.shape} != ({self.n}, {self.n})")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if not (a.sum(axis=0) == self.d).all() or not (a.sum(axis=1) == self.d).all():
            raise ValueError(f"row/column sums are not all {self.d}")


@dataclass(frozen=True)
class SwitchChain:
    """Directed double-edge-switch chain; burn_in_steps=None uses the default."""

    burn_in_steps: int | None = None

    def __post_init__(self):
        if self.burn_in_steps is not None and self.burn_in_steps < 0:
            raise ValueError("burn_in_steps must be >= 0")


@dataclass(frozen=True)
class PermutationSum:
    """Sum of d uniform permutations, rejecting on support collisions."""

    max_rejections: int = 1000

    def __post_init__(self):
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")


SamplerMethod = SwitchChain | PermutationSum


def default_burn_in(n: int, d: int) -> int:
    """Conservative coupon-collector-scale heuristic: 20*n*d*ceil(ln(n*d))."""
    return 20 * n * d * math.ceil(math.log(n * d))


@njit(cache=True)
def _run_switch_chain(adj, rows, cols, steps, seed):  # pragma: no cover - jitted
    # Counter-based splitmix64 stream; one output supplies both edge
    # indices (the modulo bias is ~ne/2^32, statistically negligible).
    state = np.uint64(seed)
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    mask32 = np.uint64(0xFFFFFFFF)
    ne = np.uint64(rows.shape[0])
    for _ in range(steps):
        state += gamma
        z = state
        z = (z ^ (z >> np.uint64(30))) * m1
        z = (z ^ (z >> np.uint64(27))) * m2
        z = z ^ (z >> np.uint64(31))
        e1 = np.int64((z & mask32) % ne)
        e2 = np.int64((z >> np.uint64(32)) % ne)
        a, b = rows[e1], cols[e1]
        c, e = rows[e2], cols[e2]
        # lazy chain: a rejected proposal still counts as a step
        if a == c or b == e:
            continue
        if adj[a, e] != 0 or adj[c, b] != 0:
            continue
        adj[a, b] = 0
        adj[c, e] = 0
        adj[a, e] = 1
        adj[c, b] = 1
        cols[e1] = e
        cols[e2] = b


def _circulant_start(n: int, d: int) -> np.ndarray:
    """Circulant element of the state space: ones on offsets 1..d."""
    adj = np.zeros((n, n), dtype=np.uint8)
    idx = np.arange(n)
    for k in range(1, d + 1):
        adj[idx, (idx + k) % n] = 1
    return adj


def sample_rrd(
    n: int, d: int, method: SamplerMethod | None = None, seed: int = 0
) -> RegularDigraph:
    """Sample a d-regular digraph adjacency matrix.

    SwitchChain targets the uniform distribution on the set of valid
    matrices; PermutationSum conditions d independent uniform permutation
    matrices on pairwise disjoint supports and raises RuntimeError if the
    rejection budget runs out.
    """
    if not (1 <= d <= n - 1):
        raise ValueError(f"need 1 <= d <= n-1, got n={n}, d={d}")
    if method is None:
        method = SwitchChain()

    if isinstance(method, SwitchChain):
        adj = _circulant_start(n, d)
        rows, cols = np.nonzero(adj)
        rows = rows.astype(np.int64)
        cols = cols.astype(np.int64)
        steps = method.burn_in_steps
        if steps is None:
            steps = default_burn_in(n, d)
        _run_switch_chain(adj, rows, cols, steps, np.uint64(seed % (2**64)))
        g = RegularDigraph(n, d, adj)
        g.validate()
        return g

    if isinstance(method, PermutationSum):
        rng = generator(seed)
        for _ in range(method.max_rejections):
            adj = np.zeros((n, n), dtype=np.uint8)
            ok = True
            for _k in range(d):
                perm = rng.permutation(n)
                if adj[np.arange(n), perm].any():
                    ok = False
                    break
                adj[np.arange(n), perm] = 1
            if ok:
                g = RegularDigraph(n, d, adj)
                g.validate()
                return g
        raise RuntimeError(
            f"PermutationSum exhausted {method.max_rejections} rejections "
            f"at n={n}, d={d}"
        )

    raise TypeError(f"unknown sampler method {method!r}")


def sample_bernoulli(n: int, p: float, seed: int = 0) -> np.ndarray:
    """n x n matrix of independent Bernoulli(p) indicators."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = generator(seed)
    return (rng.random((n, n)) < p).astype(np.uint8)


_MAX_EXACT_N = 8


def count_regular_matrices(n: int, d: int) -> int:
    """Exact number of n x n 0-1 matrices with all row and column sums d.

    Column-by-column dynamic program over the multiset of residual row
    sums; exponential, so restricted to n <= 8.
    """
    if n > _MAX_EXACT_N:
        raise ValueError(f"exact counting limited to n <= {_MAX_EXACT_N}")
    if not (1 <= d <= n - 1):
        raise ValueError(f"need 1 <= d <= n-1, got n={n}, d={d}")
    return _count_dp(n, d)


@lru_cache(maxsize=None)
def _count_dp(n: int, d: int) -> int:
    # profile[r] = number of rows still needing r more ones, r = 0..d
    start = tuple([0] * d + [n])

    @lru_cache(maxsize=None)
    def rec(cols_left: int, profile: tuple[int, ...]) -> int:
        if cols_left == 0:
            return 1
        if sum(r * c for r, c in enumerate(profile)) != d * cols_left:
            return 0
        total = 0
        # choose k_r rows out of the c_r rows with residual r (r >= 1),
        # with sum_r k_r = d, to receive a one in this column
        def choose(r: int, remaining: int, ways: int, prof: list[int]) -> None:
            nonlocal total
            if remaining == 0:
                total += ways * rec(cols_left - 1, tuple(prof))
                return
            if r == 0:
                return
            c_r = profile[r]
            for k in range(min(c_r, remaining) + 1):
                prof[r] -= k
                prof[r - 1] += k
                choose(r - 1, remaining - k, ways * math.comb(c_r, k), prof)
                prof[r] += k
                prof[r - 1] -= k

        choose(d, d, 1, list(profile))
        return total

    return rec(n, start)


def canfield_mckay_log_prob(n: int, d: int) -> float:
    """Leading term of log P(an iid Bernoulli(d/n) matrix is d-regular).

    Equals 0.5*log(2*pi*d*(n-d)) - n*log(2*pi*d*(n-d)/n); symmetric under
    d <-> n-d.  Asymptotic: at desk scale it is an order-of-magnitude
    guide only.
    """
    if not (1 <= d <= n - 1):
        raise ValueError(f"need 1 <= d <= n-1, got n={n}, d={d}")
    q = 2.0 * math.pi * d * (n - d)
    return 0.5 * math.log(q) - n * math.log(q / n)


def to_edge_list(g: RegularDigraph) -> str:
    """Serialize to the sparse edge-list text format: 'n d' header, then
    one '<i> <j>' line per edge, 0-indexed, lexicographically sorted."""
    out = StringIO()
    out.write(f"{g.n} {g.d}\n")
    rows, cols = np.nonzero(g.adjacency)
    for i, j in zip(rows.tolist(), cols.tolist()):
        out.write(f"{i} {j}\n")
    return out.getvalue()


def from_edge_list(text: str) -> RegularDigraph:
    """Parse the edge-list text format and validate regularity."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty edge-list input")
    n, d = map(int, lines[0].split())
    adj = np.zeros((n, n), dtype=np.uint8)
    for ln in lines[1:]:
        i, j = map(int, ln.split())
        adj[i, j] = 1
    g = RegularDigraph(n, d, adj)
    g.validate()
    return g
