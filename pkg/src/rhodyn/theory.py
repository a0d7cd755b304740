"""Closed-form predictions for subsystem spectra under random evolution.

Everything here is a pure function of the bipartite dimensions and the
spectral decay factor ``g(t) = J1(2t)/t`` (the large-size average of the
per-realization form factor for the Gaussian unitary ensemble):

* the exact eigenvector-averaged density matrix and purity at finite size,
* its three-leading-order large-size expansion,
* the isolated top eigenvalue of the correlated Wishart surrogate, its
  separation threshold and its variance,
* the rescaled Marchenko-Pastur bulk and the self-consistent resolvent
  solver it derives from,
* the times at which evolved states become random to a given accuracy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .bipartite import BipartiteDims, FormFactors
from .linalg import check_hermitian
from .special import bessel_j1

__all__ = [
    "gue_form_factor",
    "random_state_purity",
    "mean_reduced_density",
    "purity_exact",
    "purity_long_time",
    "purity_asymptotic",
    "SpikeEstimate",
    "top_eigenvalue_mean",
    "top_eigenvalue_variance",
    "BulkDensity",
    "bulk_density",
    "ResolventDensity",
    "resolvent_density",
    "ConvergenceTimes",
    "convergence_times",
]


def gue_form_factor(t):
    """Large-size GUE average of the form factor: ``J1(2t)/t``, with g(0)=1.

    The squared value doubles as the leading-order average of ``|f|^2``;
    subleading 1/(n m) corrections are dropped throughout the package.
    """
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if (arr < 0).any():
        raise ValueError("time must be nonnegative")
    out = np.empty_like(arr)
    tiny = arr < 1e-6
    # series limit through t^4; below 1e-6 this is exact to machine precision
    out[tiny] = 1.0 - 0.5 * arr[tiny] ** 2 + arr[tiny] ** 4 / 12.0
    big = ~tiny
    out[big] = bessel_j1(2.0 * arr[big]) / arr[big]
    return float(out[0]) if scalar else out


def random_state_purity(dims: BipartiteDims) -> float:
    """Average purity of random pure states, (n + m) / (1 + n m)."""
    return (dims.n + dims.m) / (1.0 + dims.total)


def mean_reduced_density(rho0: np.ndarray, f_abs2: float, dims: BipartiteDims) -> np.ndarray:
    """Eigenvector-averaged density matrix at fixed ``|f|^2``.

    A convex-like combination of the initial matrix and the identity:
    coherences scale by ``(nm^2 f_abs2 ... )`` exactly, and the trace is
    exactly one for trace-one input.
    """
    if not 0.0 <= f_abs2 <= 1.0:
        raise ValueError("f_abs2 must lie in [0, 1]")
    rho0 = check_hermitian(np.asarray(rho0, dtype=np.complex128))
    if rho0.shape[0] != dims.n:
        raise ValueError("rho0 dimension does not match dims.n")
    nm = dims.total
    coh = (nm**2 * f_abs2 - 1.0) / (nm**2 - 1.0)
    unit = dims.n * dims.m**2 * (1.0 - f_abs2) / (nm**2 - 1.0)
    return coh * rho0 + unit * np.eye(dims.n)


def purity_exact(ff: FormFactors, dims: BipartiteDims) -> float:
    """Exact eigenvector-averaged purity for a product initial state.

    Valid at any size and any spectrum; the only inputs are the
    per-realization form factors. At t = 0 this is identically 1.
    """
    n, m, nm = dims.n, dims.m, dims.total
    i_r = random_state_purity(dims)
    b = (n - 1.0) * (m - 1.0) / ((nm + 3.0) * (nm + 1.0) * (nm - 1.0))
    osc = nm**2 * ff.f_abs4 + nm * ff.v + ff.f2_abs2 - 4.0 * ff.f_abs2
    return i_r + b * osc


def purity_long_time(dims: BipartiteDims) -> float:
    """Infinite-time average of the exact purity (generic spectrum).

    Strictly above the random-state value: evolution never reaches
    perfectly random states at finite size.
    """
    n, m, nm = dims.n, dims.m, dims.total
    return random_state_purity(dims) + 2.0 * (n - 1.0) * (m - 1.0) / (nm * (nm + 3.0) * (nm + 1.0))


def purity_asymptotic(g: float, g2: float, dims: BipartiteDims) -> float:
    """First three leading orders of the purity for a GUE Hamiltonian.

    ``g`` and ``g2`` are the decay factors at t and 2t.
    """
    nm = dims.total
    g4 = g**4
    return g4 + (1.0 - g4) * (dims.n + dims.m) / nm + 2.0 * (g * g * g2 - g4) / nm


@dataclass(frozen=True)
class SpikeEstimate:
    """Mean of the isolated top eigenvalue, when it is separated.

    ``mean`` is None whenever ``separated`` is False, i.e. for
    correlation strength at or below the threshold ``1/(n sqrt(kappa))``.
    """

    mean: float | None
    separated: bool
    threshold: float


def top_eigenvalue_mean(r: float, dims: BipartiteDims) -> SpikeEstimate:
    """Isolated largest eigenvalue for correlation strength ``r``."""
    if not 0.0 <= r <= 1.0:
        raise ValueError("r must lie in [0, 1]")
    threshold = 1.0 / (dims.n * np.sqrt(dims.kappa))
    if r <= threshold:
        return SpikeEstimate(mean=None, separated=False, threshold=threshold)
    n, kappa = dims.n, dims.kappa
    value = dims.sigma2 * (n * r + 1.0 - r) * (n * r * kappa + 1.0 - r) / (n * r * kappa)
    return SpikeEstimate(mean=float(value), separated=True, threshold=threshold)


def top_eigenvalue_variance(g: float, g2: float, dims: BipartiteDims) -> float:
    """Leading-order variance of the separated top eigenvalue."""
    return (2.0 * g * g + 2.0 * g * g * g2 - 4.0 * g**4) / dims.total


@dataclass
class BulkDensity:
    """Marchenko-Pastur bulk with variance rescaled by ``(1 - r)``."""

    r: float
    dims: BipartiteDims
    lam_minus: float = field(init=False)
    lam_plus: float = field(init=False)
    _cdf_grid: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        scale = (1.0 - self.r) * self.dims.sigma2
        root = 1.0 / np.sqrt(self.dims.kappa)
        self.lam_minus = scale * (root - 1.0) ** 2
        self.lam_plus = scale * (root + 1.0) ** 2

    @property
    def support(self) -> tuple:
        return (self.lam_minus, self.lam_plus)

    def pdf(self, lam):
        """Density, zero outside the support."""
        lam = np.asarray(lam, dtype=float)
        scalar = lam.ndim == 0
        lam = np.atleast_1d(lam)
        out = np.zeros_like(lam)
        inside = (lam > self.lam_minus) & (lam < self.lam_plus) & (lam > 0)
        lo = lam[inside]
        scale = (1.0 - self.r) * self.dims.sigma2
        out[inside] = (self.dims.kappa * np.sqrt((self.lam_plus - lo) * (lo - self.lam_minus))
                       / (2.0 * np.pi * lo * scale))
        return float(out[0]) if scalar else out

    def _ensure_cdf(self, points: int = 4001):
        if self._cdf_grid is not None:
            return
        # substitute lam = lam_- + (lam_+ - lam_-) sin^2(theta); the
        # integrand is then smooth even at a hard zero lower edge
        theta = np.linspace(0.0, 0.5 * np.pi, points)
        width = self.lam_plus - self.lam_minus
        lam = self.lam_minus + width * np.sin(theta) ** 2
        scale = (1.0 - self.r) * self.dims.sigma2
        integrand = (self.dims.kappa * width**2 * (np.sin(theta) * np.cos(theta)) ** 2
                     / (np.pi * scale * np.where(lam > 0, lam, 1.0)))
        if self.lam_minus == 0.0:
            # limiting value at theta -> 0 when the edge touches zero
            integrand[0] = self.dims.kappa * width / (np.pi * scale)
        cdf = np.concatenate(([0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1])
                                               * np.diff(theta))))
        self._cdf_grid = (lam, cdf / cdf[-1])

    def cdf(self, lam):
        """Cumulative distribution, clamped to {0, 1} outside the support."""
        self._ensure_cdf()
        grid, values = self._cdf_grid
        lam = np.asarray(lam, dtype=float)
        scalar = lam.ndim == 0
        out = np.interp(np.atleast_1d(lam), grid, values, left=0.0, right=1.0)
        return float(out[0]) if scalar else out

    def normalization(self, points: int = 200001) -> float:
        """Numerical integral of the density over the support."""
        theta = np.linspace(0.0, 0.5 * np.pi, points)
        width = self.lam_plus - self.lam_minus
        lam = self.lam_minus + width * np.sin(theta) ** 2
        scale = (1.0 - self.r) * self.dims.sigma2
        integrand = (self.dims.kappa * width**2 * (np.sin(theta) * np.cos(theta)) ** 2
                     / (np.pi * scale * np.where(lam > 0, lam, 1.0)))
        if self.lam_minus == 0.0:
            integrand[0] = self.dims.kappa * width / (np.pi * scale)
        return float(np.trapezoid(integrand, theta))


def bulk_density(r: float, dims: BipartiteDims) -> BulkDensity:
    """Bulk eigenvalue density for correlation strength ``r`` in [0, 1)."""
    if not 0.0 <= r < 1.0:
        raise ValueError("r must lie in [0, 1); r = 1 degenerates the bulk")
    return BulkDensity(r=r, dims=dims)


@dataclass(frozen=True)
class ResolventDensity:
    """Pointwise spectral density from the self-consistent resolvent.

    ``converged`` flags each grid point; non-converged points keep their
    last iterate and are reported, never silently accepted.
    """

    grid: np.ndarray
    density: np.ndarray
    resolvent: np.ndarray
    converged: np.ndarray
    eps: float
    iterations: int


def resolvent_density(xi_eigs, dims: BipartiteDims, grid=None, eps: float | None = None,
                      damping: float = 0.5, max_iter: int = 20000,
                      tol: float = 1e-10) -> ResolventDensity:
    """Solve the fixed-point resolvent equation of the correlated ensemble.

    For each grid point ``z = lam - i eps`` iterate (with damping)

        G <- mean_j 1 / (z - (sigma^2/kappa) (kappa - 1 + z G) xi_j)

    starting from ``G = 1/z``; the density is ``Im G / pi``.
    """
    xi = np.asarray(xi_eigs, dtype=float)
    if (xi < -1e-12).any():
        raise ValueError("xi eigenvalues must be nonnegative")
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    xi = np.clip(xi, 0.0, None)
    edge = float(np.mean(xi)) * dims.sigma2 * (1.0 / np.sqrt(dims.kappa) + 1.0) ** 2
    if grid is None:
        grid = np.linspace(edge * 1e-3, 1.25 * edge, 400)
    grid = np.asarray(grid, dtype=float)
    if eps is None:
        eps = 1e-4 * edge
    if eps <= 0:
        raise ValueError("eps must be positive")

    z = grid - 1j * eps
    coeff = dims.sigma2 / dims.kappa
    g = 1.0 / z
    converged = np.zeros(grid.shape, dtype=bool)
    active = np.arange(grid.size)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        za = z[active]
        denom = za[:, None] - coeff * (dims.kappa - 1.0 + za * g[active])[:, None] * xi[None, :]
        fresh = np.mean(1.0 / denom, axis=1)
        residual = np.abs(fresh - g[active])
        g[active] = g[active] + damping * (fresh - g[active])
        done = residual < tol
        converged[active[done]] = True
        active = active[~done]
        if active.size == 0:
            break
    if active.size:
        warnings.warn(f"resolvent iteration left {active.size} grid points unconverged",
                      RuntimeWarning, stacklevel=2)
    density = g.imag / np.pi
    return ResolventDensity(grid=grid, density=density, resolvent=g,
                            converged=converged, eps=float(eps), iterations=iterations)


@dataclass(frozen=True)
class ConvergenceTimes:
    """Times after which evolution has produced a random state.

    ``first_passage``: earliest time the fourth power of the decay
    factor dips below the accuracy target. ``envelope_time``: earliest
    time after which the decaying envelope ``t^{-3/2}/sqrt(pi)`` keeps
    it below the target for good.
    """

    first_passage: float
    envelope_time: float


def convergence_times(dims: BipartiteDims, accuracy: float | None = None) -> ConvergenceTimes:
    """Randomization times at the given accuracy (default ``1/n``)."""
    acc = 1.0 / dims.n if accuracy is None else float(accuracy)
    if acc <= 0.0:
        raise ValueError("accuracy must be positive")
    if acc >= 1.0:
        return ConvergenceTimes(first_passage=0.0, envelope_time=0.0)

    target = acc**0.25
    # g decreases from 1 to its first zero near t ~ 1.9159, so the first
    # crossing lives in that window; scan coarsely, then refine
    t_hi = 1.9158529851
    step = 1e-3
    t = step
    while gue_form_factor(t) > target and t < t_hi:
        t += step
    lo = max(t - step, 1e-12)
    first = brentq(lambda u: gue_form_factor(u) - target, lo, min(t, t_hi),
                   xtol=1e-12, rtol=8.9e-16)
    envelope = (np.pi**2 * acc) ** (-1.0 / 6.0)
    return ConvergenceTimes(first_passage=float(first), envelope_time=float(envelope))
