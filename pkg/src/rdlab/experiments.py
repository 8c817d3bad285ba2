"""Experiment drivers for singular-value estimates and geometric identities.

Covers row-distance identities, the deterministic intermediate-singular-
value lower bound, smallest-singular-value tail curves, the local Wegner
profile, distance-to-random-subspace concentration, and concentration of
linear eigenvalue statistics of the block linearization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._rng import generator, trial_seed
from .sampler import SamplerMethod, sample_bernoulli, sample_rrd
from .spectral import singular_values
from .weights import WeightLaw, assemble_shifted, sample_weights

__all__ = [
    "RowDistanceResult",
    "row_distances",
    "distance_lower_bound_check",
    "TailCurve",
    "ssv_tail_trial",
    "ssv_tail_curve",
    "WegnerProfile",
    "wegner_ratios",
    "wegner_trial",
    "wegner_profile",
    "dist_subspace_experiment",
    "PiecewiseLinear",
    "linstat_trial",
    "linstat_concentration",
]

_RANK_RTOL = 1e-10


@dataclass
class RowDistanceResult:
    distances: np.ndarray
    i2m_lhs: float | None  # sum of s_i(M')^-2
    i2m_rhs: float | None  # sum of dist^-2
    full_rank: bool


def row_distances(M: np.ndarray, keep: int | None = None) -> RowDistanceResult:
    """Distances from each of the first `keep` rows to the span of the
    other kept rows, via orthogonal projection residuals.

    When the kept rows have full row rank, also reports both sides of the
    inverse second moment identity sum s_i^-2 = sum dist_i^-2.
    """
    M = np.asarray(M, dtype=np.complex128)
    mp = M.shape[0] if keep is None else keep
    if not (1 <= mp <= M.shape[0]):
        raise ValueError(f"keep must lie in [1, {M.shape[0]}]")
    Mp = M[:mp]
    dists = np.empty(mp)
    for i in range(mp):
        others = np.delete(Mp, i, axis=0)
        r = Mp[i]
        if others.size:
            q = scipy.linalg.orth(others.T)
            r = r - q @ (q.conj().T @ r)
        dists[i] = np.linalg.norm(r)

    s = singular_values(Mp)
    full_rank = bool(s[-1] > _RANK_RTOL * max(s[0], 1.0))
    if full_rank and (dists > 0).all():
        lhs = float((s**-2.0).sum())
        rhs = float((dists**-2.0).sum())
    else:
        lhs = rhs = None
    return RowDistanceResult(dists, lhs, rhs, full_rank)


def distance_lower_bound_check(M: np.ndarray, k: int) -> bool:
    """Deterministic bound s_{n-k}(M) >= sqrt(k/(2n)) * min_i dist(R_i, R_{-i})
    with the minimum over the first m = n - ceil(k/2) rows."""
    M = np.asarray(M)
    n = M.shape[0]
    if not (0 <= k <= n - 1):
        raise ValueError(f"need 0 <= k <= n-1, got k={k}")
    if k == 0:
        return True
    m = n - math.ceil(k / 2)
    dmin = row_distances(M, keep=m).distances.min()
    s = singular_values(M)
    lhs = s[n - k - 1]  # s_{n-k} in descending 1-based order
    rhs = math.sqrt(k / (2.0 * n)) * dmin
    return bool(lhs >= rhs * (1.0 - 1e-12))


@dataclass
class TailCurve:
    grid: np.ndarray
    probs: np.ndarray
    n: int
    trials: int
    seed: int


def ssv_tail_trial(
    n: int,
    p: float,
    z: complex,
    law: WeightLaw,
    sampler: SamplerMethod | None,
    seed: int,
) -> float:
    """Smallest singular value of Y - z*sqrt(n*p)*I for one fresh (A, X)."""
    d = int(n * p)
    A = sample_rrd(n, d, sampler, seed)
    X = sample_weights(n, law, trial_seed(seed, 1))
    Y = A.adjacency * X
    M = Y - z * math.sqrt(n * p) * np.eye(n)
    return float(singular_values(M)[-1])


def ssv_tail_curve(
    smallest: np.ndarray, t_grid: np.ndarray, n: int, trials: int, seed: int
) -> TailCurve:
    """Empirical tail curve P(s_n <= t * n^{-1/2}) from per-trial minima."""
    smallest = np.asarray(smallest, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    probs = np.array(
        [(smallest <= t / math.sqrt(n)).mean() for t in t_grid]
    )
    return TailCurve(t_grid, probs, n, trials, seed)


@dataclass
class WegnerProfile:
    indices: np.ndarray
    ratios: np.ndarray  # min over trials of n * s_{n-i} / i
    alpha: float
    a1: float


def wegner_window(n: int, alpha: float, a1: float) -> np.ndarray:
    lo = math.ceil(n**alpha)
    hi = math.floor(a1 * n)
    if lo > hi:
        raise ValueError(f"empty Wegner window [{lo}, {hi}]")
    return np.arange(lo, hi + 1)


def wegner_ratios(svals: np.ndarray, n: int, alpha: float, a1: float) -> np.ndarray:
    """Ratios n * s_{n-i} / i over the index window [ceil(n^alpha), floor(a1*n)]."""
    idx = wegner_window(n, alpha, a1)
    s = np.asarray(svals, dtype=float)
    return n * s[n - idx - 1] / idx


def wegner_trial(
    n: int,
    p: float,
    z: complex,
    law: WeightLaw,
    sampler: SamplerMethod | None,
    alpha: float,
    a1: float,
    seed: int,
) -> np.ndarray:
    d = int(n * p)
    A = sample_rrd(n, d, sampler, seed)
    X = sample_weights(n, law, trial_seed(seed, 1))
    M = assemble_shifted(A, X, p, z)
    return wegner_ratios(singular_values(M.entries), n, alpha, a1)


def wegner_profile(
    per_trial_ratios: list[np.ndarray], n: int, alpha: float, a1: float
) -> WegnerProfile:
    """Aggregate trial ratio vectors by taking the minimum per index."""
    ratios = np.min(np.stack(per_trial_ratios), axis=0)
    return WegnerProfile(wegner_window(n, alpha, a1), ratios, alpha, a1)


def dist_subspace_experiment(
    n: int, k: int, trials: int, seed: int = 0
) -> dict[str, float]:
    """Squared distance of iid standard Gaussian rows to one fixed uniform
    random subspace of codimension k; the mean should sit at k."""
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got k={k}")
    rng = generator(seed)
    if k == n:
        basis = np.zeros((n, 0))
    else:
        frame = rng.standard_normal((n, n - k))
        basis, _ = np.linalg.qr(frame)
    sq = np.empty(trials)
    for t in range(trials):
        r = rng.standard_normal(n)
        proj = basis.T @ r
        sq[t] = r @ r - proj @ proj
    return {"mean_sq": float(sq.mean()), "var": float(sq.var())}


@dataclass(frozen=True)
class PiecewiseLinear:
    """Compactly supported piecewise-linear test function given by sorted
    knots and their values; zero outside the knot range."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.knots) != len(self.values) or len(self.knots) < 2:
            raise ValueError("need matching knots/values with at least 2 points")
        if list(self.knots) != sorted(self.knots):
            raise ValueError("knots must be sorted")
        if self.values[0] != 0.0 or self.values[-1] != 0.0:
            raise ValueError("test function must vanish at the boundary knots")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.interp(x, self.knots, self.values, left=0.0, right=0.0)


def linstat_trial(
    n: int, p: float, z: complex, law: WeightLaw, f: PiecewiseLinear, seed: int
) -> float:
    """One sample of the linear statistic mu_{H(z)}(f) for the Bernoulli
    comparison model: mean of f over the symmetrized singular values of
    (1/sqrt(np)) * B∘X - z*I."""
    B = sample_bernoulli(n, p, seed)
    X = sample_weights(n, law, trial_seed(seed, 1))
    M = assemble_shifted(B, X, p, z)
    s = singular_values(M.entries)
    sym = np.concatenate([s, -s])
    return float(f(sym).mean())


def linstat_concentration(
    ns: list[int],
    p: float,
    z: complex,
    law: WeightLaw,
    f: PiecewiseLinear,
    trials: int,
    seed: int = 0,
) -> dict[int, float]:
    """Sample variance of the linear statistic across trials at each n."""
    out: dict[int, float] = {}
    for ni, n in enumerate(ns):
        vals = np.array(
            [
                linstat_trial(n, p, z, law, f, trial_seed(seed, ni * trials + t))
                for t in range(trials)
            ]
        )
        out[n] = float(vals.var(ddof=1))
    return out
