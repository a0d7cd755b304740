"""Noncentral correlated Wishart surrogates for the evolved subsystem.

The reduced density matrix at time t is statistically modeled by
``W = Z Z^dagger`` with ``Z = Y + sqrt(xi) X`` and ``X`` a complex
Ginibre matrix of entry variance ``1/(n m)``. Three parameter choices
are provided: the moment-matched noncentral correlated ensemble, its
uncorrelated large-size reduction, and a centered ensemble pushing the
whole mean into the correlation matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bipartite import BipartiteDims, reduced_density
from .linalg import as_generator, eigh, hermitize, psd_sqrt, sample_ginibre
from .theory import mean_reduced_density

__all__ = [
    "WishartParams",
    "matched_params",
    "uncorrelated_params",
    "centered_params",
    "sample",
    "sample_eigenvalues",
]


@dataclass
class WishartParams:
    """Offset matrix, row correlation matrix, and trace policy.

    ``sqrt_xi`` is precomputed so repeated sampling costs one Ginibre
    draw and two matrix products per member.
    """

    y: np.ndarray
    xi: np.ndarray
    dims: BipartiteDims
    fixed_trace: bool = False
    sqrt_xi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.complex128)
        if self.y.shape != (self.dims.n, self.dims.m):
            raise ValueError("offset matrix must be n x m")
        self.xi = np.asarray(self.xi, dtype=np.complex128)
        if self.xi.shape != (self.dims.n, self.dims.n):
            raise ValueError("correlation matrix must be n x n")
        self.sqrt_xi = psd_sqrt(self.xi)

    @property
    def sigma2(self) -> float:
        return self.dims.sigma2


def matched_params(a0: np.ndarray, g: float, h2: float, dims: BipartiteDims,
                   fixed_trace: bool = False) -> WishartParams:
    """Moment-matched noncentral correlated parameters.

    Offset ``Y = g A(0)``; correlations fixed by matching the ensemble
    mean to the eigenvector-averaged density matrix at ``|f|^2 = h2``:
    ``sigma^2 xi = <rho> - g^2 rho0``, symmetrized and PSD-clamped.
    """
    a0 = np.asarray(a0, dtype=np.complex128)
    rho0 = reduced_density(a0)
    sxi = mean_reduced_density(rho0, h2, dims) - g * g * rho0
    xi = hermitize(sxi) / dims.sigma2
    # psd_sqrt in WishartParams enforces the clamp policy and raises on
    # genuinely negative spectra
    return WishartParams(y=g * a0, xi=xi, dims=dims, fixed_trace=fixed_trace)


def uncorrelated_params(a0: np.ndarray, g: float, h2: float, dims: BipartiteDims,
                        fixed_trace: bool = False) -> WishartParams:
    """Large-size reduction: ``Y = g A(0)``, ``xi = (1 - h2) * identity``."""
    if not 0.0 <= h2 <= 1.0:
        raise ValueError("h2 must lie in [0, 1]")
    a0 = np.asarray(a0, dtype=np.complex128)
    xi = (1.0 - h2) * np.eye(dims.n)
    return WishartParams(y=g * a0, xi=xi, dims=dims, fixed_trace=fixed_trace)


def centered_params(rho0: np.ndarray, h2: float, dims: BipartiteDims,
                    fixed_trace: bool = False) -> WishartParams:
    """Centered ensemble: ``Y = 0``, ``sigma^2 xi`` equal to the full mean."""
    xi = mean_reduced_density(rho0, h2, dims) / dims.sigma2
    y = np.zeros((dims.n, dims.m))
    return WishartParams(y=y, xi=hermitize(xi), dims=dims, fixed_trace=fixed_trace)


def sample(params: WishartParams, rng) -> np.ndarray:
    """One member ``W = Z Z^dagger``; PSD and Hermitian by construction."""
    gen = as_generator(rng)
    x = sample_ginibre(params.dims.n, params.dims.m, 1.0 / params.dims.total, gen)
    z = params.y + params.sqrt_xi @ x
    w = z @ z.conj().T
    w = hermitize(w)
    if params.fixed_trace:
        w = w / np.trace(w).real
    return w


def sample_eigenvalues(params: WishartParams, samples: int, rng) -> np.ndarray:
    """Sorted (descending) eigenvalues of ``samples`` members, stacked."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    gen = as_generator(rng)
    out = np.empty((samples, params.dims.n))
    for k in range(samples):
        out[k] = np.linalg.eigvalsh(sample(params, gen))[::-1]
    return out
