"""Broad-connectivity and discrepancy checks on nonnegative profiles.

All checks work on the thresholded matrix that keeps entries >= h_cut.
The exact verifier scans every column subset; the randomized verifier
settles the small- and large-subset regimes deterministically and samples
the middle regime, so it can falsify but never certify.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import generator

__all__ = [
    "BroadConnectivityParams",
    "CompressibilityParams",
    "GraphPrimitives",
    "graph_primitives",
    "Exact",
    "Randomized",
    "Verdict",
    "verify_broad",
    "discrepancy_search",
    "is_compressible",
]

_EXACT_LIMIT = 20


@dataclass(frozen=True)
class BroadConnectivityParams:
    h_cut: float
    delta: float
    nu: float

    def __post_init__(self):
        if not (0.0 < self.h_cut <= 1.0):
            raise ValueError("h_cut must lie in (0, 1]")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if not (0.0 < self.nu < 1.0):
            raise ValueError("nu must lie in (0, 1)")


@dataclass(frozen=True)
class CompressibilityParams:
    theta: float
    rho: float

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0) or not (0.0 < self.rho < 1.0):
            raise ValueError("theta and rho must lie in (0, 1)")


class GraphPrimitives:
    """Accessors on the bipartite graph of the thresholded profile."""

    def __init__(self, sigma: np.ndarray, h_cut: float):
        sigma = np.asarray(sigma, dtype=float)
        if (sigma < 0).any():
            raise ValueError("profile entries must be nonnegative")
        self.shape = sigma.shape
        self.mask = sigma >= h_cut

    def neighborhood(self, i: int) -> np.ndarray:
        """Columns adjacent to row i."""
        self._check(i, self.shape[0])
        return np.nonzero(self.mask[i])[0]

    def co_neighborhood(self, j: int) -> np.ndarray:
        """Rows adjacent to column j."""
        self._check(j, self.shape[1])
        return np.nonzero(self.mask[:, j])[0]

    def broad_neighbors(self, I, delta: float) -> np.ndarray:
        """Columns j whose co-neighborhood covers at least delta*|I| of the
        row set I."""
        I = self._index_set(I, self.shape[0])
        counts = self.mask[I].sum(axis=0)
        return np.nonzero(counts >= delta * len(I))[0]

    def edge_count(self, I, J) -> int:
        """Number of pairs (i, j) in I x J with a thresholded edge."""
        I = self._index_set(I, self.shape[0])
        J = self._index_set(J, self.shape[1])
        return int(self.mask[np.ix_(I, J)].sum())

    def transpose(self) -> "GraphPrimitives":
        out = GraphPrimitives.__new__(GraphPrimitives)
        out.shape = (self.shape[1], self.shape[0])
        out.mask = self.mask.T
        return out

    @staticmethod
    def _check(i: int, bound: int) -> None:
        if not (0 <= i < bound):
            raise IndexError(f"index {i} out of range [0, {bound})")

    @staticmethod
    def _index_set(I, bound: int) -> np.ndarray:
        I = np.asarray(list(I), dtype=int)
        if I.size and (I.min() < 0 or I.max() >= bound):
            raise IndexError(f"index set out of range [0, {bound})")
        return I


def graph_primitives(sigma: np.ndarray, h_cut: float) -> GraphPrimitives:
    return GraphPrimitives(sigma, h_cut)


@dataclass(frozen=True)
class Exact:
    pass


@dataclass(frozen=True)
class Randomized:
    trials: int = 1000
    seed: int = 0


@dataclass
class Verdict:
    kind: str  # "holds" | "violated" | "not_falsified"
    condition: int | None = None  # which of conditions 1..3 failed
    witness: list | None = None  # failing row/column set
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.kind,
                "condition": self.condition,
                "witness_sets": self.witness,
                **self.detail,
            },
            sort_keys=True,
        )


def _condition3_holds(mask: np.ndarray, J: np.ndarray, delta: float, nu: float) -> bool:
    """Literal condition (3) for one column subset J: the rows meeting at
    least delta*|J| of J must number at least min(n, (1+nu)*|J|)."""
    n = mask.shape[0]
    counts = mask[:, J].sum(axis=1)
    broad = int((counts >= delta * len(J)).sum())
    return broad >= min(n, (1.0 + nu) * len(J))


def verify_broad(
    sigma: np.ndarray,
    params: BroadConnectivityParams,
    mode: Exact | Randomized | None = None,
) -> Verdict:
    """Check whether the profile is (h_cut, delta, nu)-broadly connected.

    Conditions (1) and (2) (dense rows/columns) are always checked
    exactly.  Condition (3) is scanned over all column subsets in Exact
    mode (m <= 20); in Randomized mode the small and large subset sizes
    are settled by deterministic degree bounds and the middle sizes are
    sampled, so the outcome is Holds / ViolatedWitness / NotFalsified.
    Every returned witness re-validates under graph_primitives.
    """
    if mode is None:
        mode = Randomized()
    gp = GraphPrimitives(sigma, params.h_cut)
    mask = gp.mask
    n, m = mask.shape
    delta, nu = params.delta, params.nu

    row_deg = mask.sum(axis=1)
    col_deg = mask.sum(axis=0)
    bad_rows = np.nonzero(row_deg < delta * m)[0]
    if bad_rows.size:
        return Verdict("violated", condition=1, witness=[int(bad_rows[0])])
    bad_cols = np.nonzero(col_deg < delta * n)[0]
    if bad_cols.size:
        return Verdict("violated", condition=2, witness=[int(bad_cols[0])])

    if isinstance(mode, Exact):
        if m > _EXACT_LIMIT:
            raise ValueError(f"Exact mode limited to m <= {_EXACT_LIMIT}")
        for bits in range(1, 1 << m):
            J = np.nonzero([(bits >> j) & 1 for j in range(m)])[0]
            if not _condition3_holds(mask, J, delta, nu):
                return Verdict("violated", condition=3, witness=J.tolist())
        return Verdict("holds")

    # Randomized mode: singletons are cheap, do them all
    for j in range(m):
        if not _condition3_holds(mask, np.array([j]), delta, nu):
            return Verdict("violated", condition=3, witness=[j])

    # Deterministic regimes.  Every row meets any J in at least
    # rowdeg - (m - |J|) columns, so for large J all n rows are broad
    # neighbors; for small J, summing column degrees over J shows more
    # than min(coldeg) - delta*n rows are broad neighbors.
    c_min = float(col_deg.min())
    r_min = float(row_deg.min())
    small_max = int(math.floor((c_min - delta * n) / (1.0 + nu)))
    large_min = int(math.ceil(m - r_min + delta * m))
    lo = max(2, small_max + 1)
    hi = min(m, large_min - 1)

    rng = generator(mode.seed)
    checked = 0
    if lo <= hi:
        for _ in range(mode.trials):
            size = int(rng.integers(lo, hi + 1))
            J = rng.choice(m, size=size, replace=False)
            checked += 1
            if not _condition3_holds(mask, J, delta, nu):
                return Verdict(
                    "violated", condition=3, witness=sorted(int(j) for j in J)
                )
    return Verdict(
        "not_falsified",
        detail={
            "sampled_subsets": checked,
            "middle_regime": [lo, hi],
            "trials": mode.trials,
            "seed": mode.seed,
        },
    )


def discrepancy_search(
    A: np.ndarray, p: float, eps0: float, trials: int = 1000, seed: int = 0
) -> Verdict:
    """Search for index sets I, J with |I|, |J| >= eps0*n spanning fewer
    than p/2 * |I|*|J| edges.

    Random restarts plus a greedy descent that repeatedly keeps the rows
    and columns with the fewest incident edges.  A returned witness is
    exact; absence of a witness only reports NotFalsified.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if eps0 * n < 1:
        raise ValueError("eps0 * n must be at least 1")
    k = math.ceil(eps0 * n)
    rng = generator(seed)

    def violated(I, J):
        e = A[np.ix_(I, J)].sum()
        return e < 0.5 * p * len(I) * len(J)

    def greedy(I, J, rounds=4):
        for _ in range(rounds):
            row_counts = A[:, J].sum(axis=1)
            I = np.argsort(row_counts, kind="stable")[:k]
            col_counts = A[I].sum(axis=0)
            J = np.argsort(col_counts, kind="stable")[:k]
        return I, J

    for t in range(trials):
        I = rng.choice(n, size=k, replace=False)
        J = rng.choice(n, size=k, replace=False)
        if violated(I, J):
            return Verdict(
                "violated", witness=[sorted(I.tolist()), sorted(J.tolist())]
            )
        if t % 10 == 0:  # greedy descent on a subset of restarts
            I, J = greedy(I, J)
            if violated(I, J):
                return Verdict(
                    "violated", witness=[sorted(I.tolist()), sorted(J.tolist())]
                )
    return Verdict("not_falsified", detail={"trials": trials, "seed": seed})


def is_compressible(v: np.ndarray, params: CompressibilityParams) -> bool:
    """Whether the unit vector v lies within distance rho of a vector
    supported on its floor(theta*m) largest-magnitude coordinates (the
    nearest sparse vector keeps exactly those coordinates)."""
    v = np.asarray(v).ravel()
    m = v.size
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"input must be a unit vector, got norm {nrm}")
    keep = int(math.floor(params.theta * m))
    if keep >= m:
        return True
    mags = np.sort(np.abs(v))
    tail = np.linalg.norm(mags[: m - keep])
    return bool(tail <= params.rho)
