"""Dense spectra, empirical measures, log-potentials, and reference laws.

Eigenvalues come from the LAPACK Hessenberg + shifted-QR path via
scipy.linalg.eigvals and are checked against the trace identities; the
reference laws are the uniform law on the unit disk and the fixed-degree
radial law supported on |w| <= sqrt(d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "EmpiricalMeasure",
    "ReferenceLaw",
    "CIRCULAR",
    "oriented_km",
    "eigenvalues",
    "singular_values",
    "empirical_log_potential",
    "truncated_log",
    "truncated_log_potential",
    "reference_potential",
    "reference_radial_cdf",
    "reference_radial_density",
    "radial_ks",
    "radial_histogram",
]

NEG_INFINITY = float("-inf")


@dataclass
class EmpiricalMeasure:
    """Uniformly weighted finite point set on the complex plane or on the
    nonnegative reals."""

    atoms: np.ndarray

    def __post_init__(self):
        self.atoms = np.asarray(self.atoms).ravel()

    def __len__(self) -> int:
        return self.atoms.size

    def radii(self) -> np.ndarray:
        return np.abs(self.atoms)


@dataclass(frozen=True)
class ReferenceLaw:
    """Radial reference law: the unit-disk uniform law, or the fixed-degree
    law with planar density d^2(d-1) / (pi (d^2-r^2)^2) on r <= sqrt(d)."""

    kind: str  # "circular" | "oriented_km"
    d: int | None = None

    def __post_init__(self):
        if self.kind not in ("circular", "oriented_km"):
            raise ValueError(f"unknown reference law {self.kind!r}")
        if self.kind == "oriented_km" and (self.d is None or self.d < 3):
            raise ValueError("oriented_km requires integer d >= 3")

    @property
    def support_radius(self) -> float:
        return 1.0 if self.kind == "circular" else math.sqrt(self.d)


CIRCULAR = ReferenceLaw("circular")


def oriented_km(d: int) -> ReferenceLaw:
    return ReferenceLaw("oriented_km", d)


def eigenvalues(M: np.ndarray) -> np.ndarray:
    """Eigenvalue multiset of a square matrix.

    Verifies sum(lam) = tr(M) and sum(lam^2) = tr(M^2) to
    1e-8 * (1 + ||M||_F^2) absolute; LAPACK convergence failures
    propagate as LinAlgError.
    """
    M = np.asarray(M)
    if not np.isfinite(M).all():
        raise ValueError("matrix has non-finite entries")
    lam = scipy.linalg.eigvals(M)
    tol = 1e-8 * (1.0 + np.linalg.norm(M) ** 2)
    tr1 = np.trace(M)
    tr2 = np.sum(M * M.T)  # tr(M^2) without forming M @ M
    if abs(lam.sum() - tr1) > tol or abs((lam**2).sum() - tr2) > tol:
        raise ArithmeticError("eigenvalue trace identities violated beyond tolerance")
    return lam


def singular_values(M: np.ndarray) -> np.ndarray:
    """Descending singular values; checked against the Frobenius norm."""
    M = np.asarray(M)
    if not np.isfinite(M).all():
        raise ValueError("matrix has non-finite entries")
    s = np.linalg.svd(M, compute_uv=False)
    fro2 = np.linalg.norm(M) ** 2
    if fro2 > 0 and abs((s**2).sum() - fro2) > 1e-10 * fro2:
        raise ArithmeticError("singular values violate the Frobenius identity")
    return s


def empirical_log_potential(svals: np.ndarray) -> float:
    """(1/n) * sum(log s_i); -inf if any singular value is exactly zero."""
    s = np.asarray(svals, dtype=float)
    if (s < 0).any():
        raise ValueError("singular values must be nonnegative")
    if (s == 0).any():
        return NEG_INFINITY
    return float(np.mean(np.log(s)))


def truncated_log(s: np.ndarray, delta: float, c0: float) -> np.ndarray:
    """Compactly supported truncation of log: zero below delta/2 and above
    2*c0, equal to log on [delta, c0], linear in between."""
    if not (0.0 < delta < c0):
        raise ValueError("need 0 < delta < c0")
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    rise = (s > delta / 2) & (s < delta)
    out[rise] = math.log(delta) * (s[rise] - delta / 2) / (delta / 2)
    mid = (s >= delta) & (s <= c0)
    out[mid] = np.log(s[mid])
    fall = (s > c0) & (s < 2 * c0)
    out[fall] = math.log(c0) * (2 * c0 - s[fall]) / c0
    return out


def truncated_log_potential(
    svals: np.ndarray, delta: float = 1e-3, c0: float | None = None
) -> float:
    """Mean of the truncated log over the singular values; c0 defaults to
    the observed largest singular value."""
    s = np.asarray(svals, dtype=float)
    if c0 is None:
        c0 = max(float(s.max()), 2 * delta)
    return float(np.mean(truncated_log(s, delta, c0)))


def reference_potential(z: complex) -> float:
    """Log-potential of the unit-disk uniform law: log|z| outside the
    disk, -(1-|z|^2)/2 inside."""
    r = abs(z)
    if r > 1.0:
        return math.log(r)
    return -0.5 * (1.0 - r * r)


def reference_radial_cdf(law: ReferenceLaw, r) -> np.ndarray | float:
    """Probability mass of the reference law within radius r."""
    scalar = np.isscalar(r) or np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if (r < 0).any():
        raise ValueError("radius must be nonnegative")
    if law.kind == "circular":
        out = np.minimum(r * r, 1.0)
    else:
        d = float(law.d)
        inside = r < math.sqrt(d)
        out = np.ones_like(r)
        rr = r[inside]
        out[inside] = (d - 1.0) * rr * rr / (d * d - rr * rr)
    return float(out[0]) if scalar else out


def reference_radial_density(law: ReferenceLaw, r) -> np.ndarray | float:
    """Planar density of the reference law as a function of radius."""
    scalar = np.isscalar(r) or np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if law.kind == "circular":
        out = np.where(r <= 1.0, 1.0 / math.pi, 0.0)
    else:
        d = float(law.d)
        out = np.where(
            r <= math.sqrt(d),
            d * d * (d - 1.0) / (math.pi * (d * d - r * r) ** 2),
            0.0,
        )
    return float(out[0]) if scalar else out


def radial_ks(measure: EmpiricalMeasure, law: ReferenceLaw) -> float:
    """Kolmogorov-Smirnov distance between the empirical radial CDF of the
    atoms and the reference radial CDF."""
    if len(measure) == 0:
        raise ValueError("empty measure")
    r = np.sort(measure.radii())
    n = r.size
    f = np.asarray(reference_radial_cdf(law, r))
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max(), 0.0))


def radial_histogram(measure: EmpiricalMeasure, bins: int) -> list[tuple[float, float]]:
    """Radial histogram normalized to estimate the planar density: each
    bin count is divided by N * bin_width * 2*pi*r_mid."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if len(measure) == 0:
        raise ValueError("empty measure")
    r = measure.radii()
    counts, edges = np.histogram(r, bins=bins, range=(0.0, float(r.max()) or 1.0))
    width = edges[1] - edges[0]
    mids = 0.5 * (edges[:-1] + edges[1:])
    dens = counts / (len(measure) * width * 2.0 * math.pi * mids)
    return list(zip(mids.tolist(), dens.tolist()))
