"""Bipartite system bookkeeping: dimensions, initial states, reductions.

A pure state on an ``N x M`` bipartite space is stored as its ``N x M``
coefficient matrix ``A`` (``rho = A A^dagger`` after tracing out the
second factor). Initial states are diagonal in the Schmidt bases, so a
state is specified by its Schmidt weights alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BipartiteDims",
    "SchmidtState",
    "product_state",
    "two_schmidt_state",
    "linear_schmidt_state",
    "custom_schmidt_state",
    "reduced_density",
    "purity",
    "FormFactors",
    "form_factors",
]

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class BipartiteDims:
    """Subsystem dimension ``n`` and environment dimension ``m >= n``."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("subsystem dimension must be >= 2")
        if self.m < self.n:
            raise ValueError("environment dimension must satisfy m >= n")

    @property
    def kappa(self) -> float:
        return self.m / self.n

    @property
    def total(self) -> int:
        """Dimension of the full Hilbert space, n*m."""
        return self.n * self.m

    @property
    def sigma2(self) -> float:
        """Variance unit 1/n used by the Wishart surrogates."""
        return 1.0 / self.n


@dataclass(frozen=True)
class SchmidtState:
    """Initial state with the given Schmidt weights on the diagonal."""

    weights: tuple
    label: str = "custom"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if (w < 0).any():
            raise ValueError("Schmidt weights must be nonnegative")
        if abs(w.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"Schmidt weights must sum to 1 (got {w.sum()!r})")

    def matrix(self, dims: BipartiteDims) -> np.ndarray:
        """Coefficient matrix A(0): A_jj = sqrt(weight_j), zero elsewhere."""
        w = np.asarray(self.weights, dtype=float)
        if w.size > dims.n:
            raise ValueError("more Schmidt weights than subsystem dimensions")
        a = np.zeros((dims.n, dims.m), dtype=np.complex128)
        a[np.arange(w.size), np.arange(w.size)] = np.sqrt(w)
        return a


def product_state() -> SchmidtState:
    """Single Schmidt coefficient: |0>|0>."""
    return SchmidtState((1.0,), label="product")


def two_schmidt_state(p: float) -> SchmidtState:
    """Two nonzero Schmidt weights (1-p, p)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    return SchmidtState((1.0 - p, p), label=f"two-schmidt:{p:g}")


def linear_schmidt_state(dims: BipartiteDims) -> SchmidtState:
    """All n weights nonzero, growing linearly: w_j = 2j / (n (n+1))."""
    j = np.arange(1, dims.n + 1, dtype=float)
    w = 2.0 * j / (dims.n * (dims.n + 1))
    return SchmidtState(tuple(w), label="linear")


def custom_schmidt_state(weights) -> SchmidtState:
    return SchmidtState(tuple(float(w) for w in weights))


def reduced_density(a: np.ndarray) -> np.ndarray:
    """rho = A A^dagger for a normalized coefficient matrix."""
    a = np.asarray(a)
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"coefficient matrix is not normalized (|A|_F = {norm!r})")
    return a @ a.conj().T


def purity(rho: np.ndarray) -> float:
    """tr(rho^2), in [1/n, 1] for a trace-one PSD matrix."""
    rho = np.asarray(rho)
    return float(np.vdot(rho, rho).real)


@dataclass(frozen=True)
class FormFactors:
    """Per-realization spectral sums of the evolution phases.

    ``f``  is the normalized trace sum of ``exp(-i E_j t)``,
    ``f2`` the same at doubled time, and
    ``v = conj(f^2) f2 + f^2 conj(f2)`` (real by construction).
    """

    f: complex
    f2: complex
    v: float

    @property
    def f_abs2(self) -> float:
        return abs(self.f) ** 2

    @property
    def f_abs4(self) -> float:
        return abs(self.f) ** 4

    @property
    def f2_abs2(self) -> float:
        return abs(self.f2) ** 2


def form_factors(energies: np.ndarray, t: float) -> FormFactors:
    """Spectral form factors of an energy spectrum at time ``t``."""
    e = np.asarray(energies, dtype=float)
    if not np.isfinite(e).all():
        raise ValueError("energies must be finite")
    f = np.exp(-1j * e * t).mean()
    f2 = np.exp(-2j * e * t).mean()
    v = 2.0 * (np.conj(f * f) * f2).real
    return FormFactors(f=complex(f), f2=complex(f2), v=float(v))
