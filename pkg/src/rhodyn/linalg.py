"""Dense complex linear algebra and random-matrix sampling primitives.

Matrices are plain ``numpy`` arrays (complex128, row-major); the helpers
here enforce the contracts the rest of the package relies on: exact
Hermiticity of sampled ensembles, unitarity of Haar samples, PSD square
roots with a documented clamp policy, and deterministic sampling from
:class:`~rhodyn.rng.RngStream` keys.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .rng import RngStream, complex_gaussians, real_gaussians

__all__ = [
    "as_generator",
    "hermitize",
    "check_hermitian",
    "sample_ginibre",
    "sample_gue",
    "sample_gue_spectrum",
    "sample_haar_unitary",
    "haar_frame",
    "eigh",
    "psd_sqrt",
]

# PSD clamp policy: eigenvalues in (-1e-8, 0) * scale are treated as
# floating-point dust and clamped to zero; anything more negative is a
# genuine violation and raises.
PSD_CLAMP_TOL = 1e-12
PSD_ERROR_TOL = 1e-8


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream or an already-opened Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def hermitize(a: np.ndarray) -> np.ndarray:
    """(a + a^dagger) / 2."""
    return 0.5 * (a + a.conj().T)


def check_hermitian(h: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity within ``tol`` (relative to max entry)."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, np.abs(h).max()) if h.size else 1.0
    defect = np.abs(h - h.conj().T).max()
    if defect > tol * scale:
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    return h


def sample_ginibre(rows: int, cols: int, variance: float, rng) -> np.ndarray:
    """Matrix of iid complex Gaussians with ``<|X_jk|^2> = variance``."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    return complex_gaussians(as_generator(rng), (rows, cols), variance)


def sample_gue(dim: int, rng, element_variance: float | None = None) -> np.ndarray:
    """GUE matrix with ``<|H_jk|^2> = element_variance`` (default ``1/dim``).

    Diagonal entries are real Gaussians of the same variance (standard
    GUE weight ``exp(-tr H^2 / (2 v))``), giving an asymptotic spectral
    span of 4 under the default normalization.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    v = 1.0 / dim if element_variance is None else float(element_variance)
    if v < 0:
        raise ValueError("element_variance must be nonnegative")
    g = sample_ginibre(dim, dim, v, rng)
    # (G + G^dagger)/sqrt(2) has off-diagonal <|H_jk|^2> = v and real
    # N(0, v) diagonal, and is Hermitian exactly.
    h = (g + g.conj().T) / np.sqrt(2.0)
    return h


def sample_gue_spectrum(dim: int, rng, element_variance: float | None = None) -> np.ndarray:
    """Eigenvalues (ascending) of a GUE draw, without forming the matrix.

    Uses the beta=2 tridiagonal model, whose eigenvalue law coincides
    with :func:`sample_gue`'s: N(0, v) diagonal and
    ``sqrt(v/2) * chi_{2(dim-k)}`` off-diagonal. Cost is O(dim^2) time
    and O(dim) memory, which is what makes large total dimensions
    reachable at all.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    v = 1.0 / dim if element_variance is None else float(element_variance)
    if v < 0:
        raise ValueError("element_variance must be nonnegative")
    gen = as_generator(rng)
    diag = real_gaussians(gen, dim, v)
    dof = 2.0 * np.arange(dim - 1, 0, -1)
    off = np.sqrt(0.5 * v * gen.chisquare(dof))
    return eigvalsh_tridiagonal(diag, off, lapack_driver="sterf")


def sample_haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via Ginibre QR with phase-fixed R diagonal."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    g = sample_ginibre(dim, dim, 1.0, rng)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    q *= d / np.abs(d)
    return q


def haar_frame(dim: int, k: int, rng, orthogonal_to: np.ndarray | None = None) -> np.ndarray:
    """``k`` jointly Haar-distributed orthonormal columns in C^dim.

    With ``orthogonal_to`` set (a unit vector), the frame is Haar in the
    orthogonal complement of that vector.
    """
    if not 1 <= k <= dim - (orthogonal_to is not None):
        raise ValueError("need 1 <= k <= available dimension")
    gen = as_generator(rng)
    g = complex_gaussians(gen, (dim, k), 1.0)
    if orthogonal_to is not None:
        g -= np.outer(orthogonal_to, orthogonal_to.conj() @ g)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    q *= d / np.abs(d)
    return q


def eigh(h: np.ndarray, check: bool = True, tol: float = 1e-10):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues ascending, eigenvector columns)`` with
    ``h = V diag(w) V^dagger`` to 1e-10 relative residual.
    """
    h = np.asarray(h, dtype=np.complex128)
    if check:
        check_hermitian(h, tol)
    return np.linalg.eigh(h)


def psd_sqrt(xi: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root ``S`` with ``S @ S = xi``.

    Eigenvalues below ``-1e-8 * scale`` raise; the band
    ``(-1e-8 * scale, 0)`` is clamped to zero, absorbing cancellation
    dust that Hermitian differences of nearly equal matrices produce.
    """
    w, v = eigh(xi)
    scale = max(1.0, float(w[-1]))
    if w[0] < -PSD_ERROR_TOL * scale:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    return hermitize((v * np.sqrt(w)) @ v.conj().T)
