"""Sampling primitives: determinism, moments, and structural contracts."""

import numpy as np
import pytest

from rhodyn.linalg import (eigh, haar_frame, hermitize, psd_sqrt, sample_ginibre,
                           sample_gue, sample_gue_spectrum, sample_haar_unitary)
from rhodyn.rng import RngStream
from rhodyn.weingarten import haar_moment


def test_stream_determinism_bit_identical():
    a = sample_ginibre(8, 8, 0.25, RngStream(42, 3))
    b = sample_ginibre(8, 8, 0.25, RngStream(42, 3))
    assert np.array_equal(a, b)
    c = sample_ginibre(8, 8, 0.25, RngStream(42, 4))
    assert not np.array_equal(a, c)


def test_ginibre_zero_mean_and_variance():
    n = 400
    x = sample_ginibre(4, 4, 1.0 / 16.0, RngStream(1, 0))
    samples = np.stack([sample_ginibre(4, 4, 1.0 / 16.0, RngStream(1, k))
                        for k in range(n)])
    mean = samples.mean()
    # entries have std 1/4; mean of 16 n entries fluctuates ~ 1/(4 sqrt(16 n))
    assert abs(mean) < 4.0 / np.sqrt(16 * n)
    second = (np.abs(samples) ** 2).mean()
    se = (np.abs(samples) ** 2).std() / np.sqrt(samples.size)
    assert abs(second - 1.0 / 16.0) < 3 * se


def test_ginibre_zero_variance_and_errors():
    assert np.array_equal(sample_ginibre(3, 2, 0.0, RngStream(0, 0)),
                          np.zeros((3, 2), dtype=complex))
    with pytest.raises(ValueError):
        sample_ginibre(3, 2, -1.0, RngStream(0, 0))
    with pytest.raises(ValueError):
        sample_ginibre(0, 2, 1.0, RngStream(0, 0))


def test_gue_hermitian_and_variances():
    h = sample_gue(64, RngStream(7, 0))
    assert np.array_equal(h, h.conj().T)
    draws = np.stack([sample_gue(16, RngStream(7, k), element_variance=0.5)
                      for k in range(600)])
    off = draws[:, 0, 1]
    diag = draws[:, 2, 2].real
    assert abs((np.abs(off) ** 2).mean() - 0.5) < 0.06
    assert abs((diag**2).mean() - 0.5) < 0.06
    assert np.abs(draws[:, 2, 2].imag).max() == 0.0


def test_gue_spectral_span_and_semicircle():
    w = np.linalg.eigvalsh(sample_gue(1024, RngStream(3, 0)))
    span = w[-1] - w[0]
    assert abs(span - 4.0) < 0.2  # 5%
    # Kolmogorov distance to the semicircle law on [-2, 2]
    grid = np.sort(w)
    semi_cdf = 0.5 + (grid * np.sqrt(np.clip(4 - grid**2, 0, None))
                      + 4 * np.arcsin(np.clip(grid / 2, -1, 1))) / (4 * np.pi)
    emp = np.arange(1, grid.size + 1) / grid.size
    assert np.abs(emp - semi_cdf).max() < 0.05


def test_gue_mean_spacing_and_heisenberg_time():
    dim = 256
    spacings, central = [], []
    for k in range(12):
        w = np.linalg.eigvalsh(sample_gue(dim, RngStream(5, k)))
        spacings.append(np.diff(w).mean())
        # central density from a window around zero; 2 pi rho(0) ~ 2 dim
        central.append((np.abs(w) < 0.25).sum() / 0.5)
    assert abs(np.mean(spacings) - 4.0 / dim) / (4.0 / dim) < 0.05
    heisenberg = 2 * np.pi * np.mean(central)
    assert abs(heisenberg - 2 * dim) / (2 * dim) < 0.10


def test_gue_spectrum_matches_dense_law():
    """Tridiagonal sampler: same mean spectral density as dense draws."""
    dim = 128
    dense = np.concatenate([np.linalg.eigvalsh(sample_gue(dim, RngStream(11, k)))
                            for k in range(40)])
    tri = np.concatenate([sample_gue_spectrum(dim, RngStream(12, k))
                          for k in range(40)])
    qs = np.linspace(0.02, 0.98, 25)
    qd = np.quantile(dense, qs)
    qt = np.quantile(tri, qs)
    assert np.abs(qd - qt).max() < 0.08
    assert abs(dense.mean() - tri.mean()) < 0.02
    assert abs(dense.std() - tri.std()) < 0.02


def test_gue_spectrum_determinism_and_sorting():
    a = sample_gue_spectrum(256, RngStream(9, 1))
    b = sample_gue_spectrum(256, RngStream(9, 1))
    assert np.array_equal(a, b)
    assert (np.diff(a) >= 0).all()


def test_haar_unitarity():
    u = sample_haar_unitary(8, RngStream(2, 0))
    assert np.abs(u @ u.conj().T - np.eye(8)).max() < 1e-12


def test_haar_dim_one_is_phase():
    u = sample_haar_unitary(1, RngStream(2, 5))
    assert u.shape == (1, 1)
    assert abs(abs(u[0, 0]) - 1.0) < 1e-14


def test_haar_first_entry_moment_matches_weingarten():
    # cross-module oracle: <|U_11|^2> = haar_moment p=1 = 1/dim
    dim, n = 4, 20000
    gen = RngStream(4, 0).generator()
    vals = np.empty(n)
    for k in range(n):
        u = sample_haar_unitary(dim, gen)
        vals[k] = abs(u[0, 0]) ** 2
    exact = haar_moment((0,), (0,), (0,), (0,), dim)
    assert exact == pytest.approx(0.25)
    se = vals.std(ddof=1) / np.sqrt(n)
    assert abs(vals.mean() - exact) < 3 * se


def test_haar_frame_orthogonal_to_vector():
    v = np.zeros(16, dtype=complex)
    v[0] = 1.0
    q = haar_frame(16, 5, RngStream(6, 0), orthogonal_to=v)
    assert np.abs(q.conj().T @ q - np.eye(5)).max() < 1e-12
    assert np.abs(v.conj() @ q).max() < 1e-12


def test_eigh_contracts():
    w, v = eigh(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
    assert np.allclose(w, [-1.0, 1.0])
    d = np.diag([3.0, -1.0, 2.0]).astype(complex)
    w, v = eigh(d)
    assert np.allclose(w, [-1.0, 2.0, 3.0])
    h = sample_gue(64, RngStream(8, 0))
    w, v = eigh(h)
    resid = np.abs(v @ np.diag(w) @ v.conj().T - h).max()
    assert resid < 1e-10 * max(1.0, np.abs(h).max())
    assert np.abs(v @ v.conj().T - np.eye(64)).max() < 1e-10
    with pytest.raises(ValueError):
        eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_psd_sqrt_cases():
    assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    n, r = 8, 0.5
    xi = (1 - r) * np.eye(n) + r * np.ones((n, n))
    s = psd_sqrt(xi)
    assert np.abs(s @ s - xi).max() < 1e-10
    # dust below zero is clamped; a real violation raises
    dusty = np.diag([1.0, -1e-13])
    s = psd_sqrt(dusty)
    assert np.abs(s @ s - np.diag([1.0, 0.0])).max() < 1e-12
    with pytest.raises(ValueError):
        psd_sqrt(np.diag([1.0, -1e-6]))


def test_hermitize():
    a = np.array([[1.0, 2.0 + 1j], [0.0, 3.0]])
    h = hermitize(a)
    assert np.array_equal(h, h.conj().T)
