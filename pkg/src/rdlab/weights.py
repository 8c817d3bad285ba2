"""Weight laws and assembly of the shifted weighted matrix.

Builds dense complex matrices of the form A ∘ X / sqrt(n*p) - z*I from a
0-1 support matrix A and an iid weight matrix X, plus the 2n x 2n
Hermitian block linearization whose spectrum is the symmetrized singular
value set.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from ._rng import generator
from .sampler import RegularDigraph

__all__ = [
    "WeightLaw",
    "REAL_GAUSSIAN",
    "COMPLEX_GAUSSIAN",
    "RADEMACHER",
    "standardized_student_t",
    "WeightedMatrix",
    "sample_weights",
    "assemble_shifted",
    "hermitize",
    "SpreadResult",
    "spread_check",
    "spread_kappa_from_moment",
    "save_complex_matrix",
    "load_complex_matrix",
]

_LAW_KINDS = ("real_gaussian", "complex_gaussian", "rademacher", "student_t")


@dataclass(frozen=True)
class WeightLaw:
    """Entry distribution for the weight matrix; mean 0, variance 1."""

    kind: str
    dof: float | None = None

    def __post_init__(self):
        if self.kind not in _LAW_KINDS:
            raise ValueError(f"unknown weight law {self.kind!r}")
        if self.kind == "student_t":
            if self.dof is None or not self.dof > 4:
                raise ValueError("student_t requires dof > 4")
        elif self.dof is not None:
            raise ValueError(f"{self.kind} takes no dof parameter")

    @property
    def is_complex(self) -> bool:
        return self.kind == "complex_gaussian"


REAL_GAUSSIAN = WeightLaw("real_gaussian")
COMPLEX_GAUSSIAN = WeightLaw("complex_gaussian")
RADEMACHER = WeightLaw("rademacher")


def standardized_student_t(dof: float) -> WeightLaw:
    """Student-t rescaled to unit variance; needs dof > 4 so that the
    (4+eta)-th moment is finite for some eta > 0."""
    return WeightLaw("student_t", dof)


def sample_weights(n: int, law: WeightLaw, seed: int = 0) -> np.ndarray:
    """n x n matrix of iid draws from the law, as complex128."""
    rng = generator(seed)
    if law.kind == "real_gaussian":
        w = rng.standard_normal((n, n))
    elif law.kind == "complex_gaussian":
        # (g1 + i*g2)/sqrt(2), so E|xi|^2 = 1
        w = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    elif law.kind == "rademacher":
        w = rng.integers(0, 2, size=(n, n)) * 2.0 - 1.0
    else:  # student_t
        scale = math.sqrt(law.dof / (law.dof - 2.0))
        w = rng.standard_t(law.dof, size=(n, n)) / scale
    return np.ascontiguousarray(w.astype(np.complex128))


@dataclass
class WeightedMatrix:
    """Dense complex matrix A ∘ X / sqrt(n*p) - z*I."""

    entries: np.ndarray
    n: int
    p: float
    z: complex


def assemble_shifted(
    A: RegularDigraph | np.ndarray, X: np.ndarray, p: float, z: complex
) -> WeightedMatrix:
    """Entry (i,j) = A(i,j)*X(i,j)/sqrt(n*p) - z*[i==j]."""
    a = A.adjacency if isinstance(A, RegularDigraph) else np.asarray(A)
    if a.shape != X.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"shape mismatch: A {a.shape}, X {X.shape}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    n = a.shape[0]
    m = a * X / math.sqrt(n * p)
    m = m.astype(np.complex128)
    m[np.diag_indices(n)] -= z
    return WeightedMatrix(m, n, p, complex(z))


def hermitize(M: WeightedMatrix | np.ndarray) -> np.ndarray:
    """2n x 2n Hermitian block matrix [[0, M], [M*, 0]]; its eigenvalues
    are the singular values of M together with their negatives."""
    m = M.entries if isinstance(M, WeightedMatrix) else np.asarray(M)
    n = m.shape[0]
    h = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    h[:n, n:] = m
    h[n:, :n] = m.conj().T
    return h


@dataclass(frozen=True)
class SpreadResult:
    passed: bool
    truncated_variance: float
    std_error: float


def spread_check(
    law: WeightLaw, kappa: float, mc_draws: int = 200_000, seed: int = 0
) -> SpreadResult:
    """Check the truncated-variance lower bound Var[xi*1(|xi| <= kappa)] >= 1/kappa.

    Closed forms for the Gaussian and Rademacher laws (std_error 0);
    Monte Carlo with reported standard error for Student-t.
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if law.kind == "rademacher":
        var = 1.0 if kappa >= 1 else 0.0
        se = 0.0
    elif law.kind == "real_gaussian":
        var = (2.0 * norm.cdf(kappa) - 1.0) - 2.0 * kappa * norm.pdf(kappa)
        se = 0.0
    elif law.kind == "complex_gaussian":
        # |xi|^2 ~ Exp(1): E[|xi|^2 1(|xi|^2 <= k^2)] = 1 - (1+k^2) e^{-k^2}
        k2 = kappa * kappa
        var = 1.0 - (1.0 + k2) * math.exp(-k2)
        se = 0.0
    else:
        rng = generator(seed)
        scale = math.sqrt(law.dof / (law.dof - 2.0))
        xs = rng.standard_t(law.dof, size=mc_draws) / scale
        t = xs * (np.abs(xs) <= kappa)
        var = float(np.var(t))
        # delta-method error bar on the sample variance
        c = (t - t.mean()) ** 2
        se = float(np.std(c) / math.sqrt(mc_draws))
    return SpreadResult(var >= 1.0 / kappa, var, se)


def spread_kappa_from_moment(p: float, mu_p: float) -> float:
    """Sufficient kappa for a centered unit-variance law with finite p-th
    moment mu_p (p > 2): kappa = 3*(3*mu_p^p)^(1/(p-2))."""
    if p <= 2:
        raise ValueError("requires p > 2")
    return 3.0 * (3.0 * mu_p**p) ** (1.0 / (p - 2.0))


_MAGIC = b"RDLABCM1"


def save_complex_matrix(path, M: np.ndarray) -> None:
    """Binary format: 8-byte magic, n and m as 8-byte little-endian ints,
    then row-major float64 interleaved (re, im) pairs."""
    m = np.ascontiguousarray(np.asarray(M, dtype=np.complex128))
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<qq", m.shape[0], m.shape[1]))
        inter = np.empty((m.shape[0], m.shape[1], 2), dtype="<f8")
        inter[..., 0] = m.real
        inter[..., 1] = m.imag
        f.write(inter.tobytes())


def load_complex_matrix(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        n, m = struct.unpack("<qq", f.read(16))
        raw = np.frombuffer(f.read(), dtype="<f8").reshape(n, m, 2)
    return (raw[..., 0] + 1j * raw[..., 1]).astype(np.complex128)
