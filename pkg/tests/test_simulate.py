"""Monte Carlo engine: contracts, determinism, and engine equivalence."""

import numpy as np
import pytest

from rhodyn.bipartite import (BipartiteDims, custom_schmidt_state, form_factors,
                              product_state, two_schmidt_state)
from rhodyn.linalg import as_generator, sample_gue, sample_gue_spectrum
from rhodyn.rng import RngStream
from rhodyn.simulate import Propagator, evolve, monte_carlo
from rhodyn import theory


def test_evolve_identity_at_time_zero():
    d = BipartiteDims(2, 3)
    a0 = product_state().matrix(d)
    h = sample_gue(d.total, RngStream(0, 0))
    assert np.abs(evolve(h, a0, 0.0) - a0).max() < 1e-12


def test_evolve_preserves_norm():
    d = BipartiteDims(3, 4)
    a0 = custom_schmidt_state([0.5, 0.3, 0.2]).matrix(d)
    h = sample_gue(d.total, RngStream(1, 0))
    for t in (0.3, 1.0, 4.7):
        at = evolve(h, a0, t)
        assert abs(np.linalg.norm(at) - 1.0) < 1e-10


def test_evolve_diagonal_hamiltonian_only_rotates_phases():
    d = BipartiteDims(2, 2)
    a0 = two_schmidt_state(0.75).matrix(d)
    energies = np.array([0.5, -1.0, 2.0, 0.1])
    h = np.diag(energies).astype(complex)
    t = 1.3
    at = evolve(h, a0, t)
    expected = (np.exp(-1j * energies * t) * a0.reshape(-1)).reshape(2, 2)
    assert np.abs(at - expected).max() < 1e-12
    assert np.abs(np.abs(at) - np.abs(a0)).max() < 1e-12


def test_evolve_dimension_mismatch():
    d = BipartiteDims(2, 2)
    a0 = product_state().matrix(d)
    h = sample_gue(6, RngStream(0, 0))
    with pytest.raises(ValueError):
        evolve(h, a0, 1.0)


def test_propagator_grid_matches_single_calls():
    d = BipartiteDims(2, 3)
    a0 = product_state().matrix(d)
    h = sample_gue(d.total, RngStream(2, 0))
    prop = Propagator(h)
    times = np.array([0.0, 0.7, 2.1])
    grid = prop.apply_grid(a0, times)
    for k, t in enumerate(times):
        assert np.abs(grid[k] - prop.apply(a0, t)).max() < 1e-12


def test_monte_carlo_determinism():
    d = BipartiteDims(2, 2)
    times = np.array([0.0, 0.5, 1.5])
    a = monte_carlo(d, product_state(), times, 5, seed=3)
    b = monte_carlo(d, product_state(), times, 5, seed=3)
    assert np.array_equal(a.purity_mean, b.purity_mean)
    assert np.array_equal(a.lambda1, b.lambda1)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    c = monte_carlo(d, product_state(), times, 5, seed=4)
    assert not np.array_equal(a.lambda1, c.lambda1)


def test_monte_carlo_worker_count_invariance():
    d = BipartiteDims(2, 2)
    times = np.array([0.2, 0.9])
    a = monte_carlo(d, product_state(), times, 6, seed=5, workers=1)
    b = monte_carlo(d, product_state(), times, 6, seed=5, workers=3)
    assert np.array_equal(a.lambda1, b.lambda1)
    assert np.array_equal(a.purity_mean, b.purity_mean)
    assert np.array_equal(a.eig_means, b.eig_means)


def test_monte_carlo_time_zero_product_state():
    d = BipartiteDims(4, 4)
    rec = monte_carlo(d, product_state(), np.array([0.0]), 10, seed=1)
    assert rec.purity_mean[0] == pytest.approx(1.0, abs=1e-12)
    assert np.abs(rec.lambda1[:, 0] - 1.0).max() < 1e-12


def test_monte_carlo_maximally_entangled_floor():
    """Uniform Schmidt weights at n = m: purity starts at exactly 1/n."""
    d = BipartiteDims(4, 4)
    state = custom_schmidt_state([0.25] * 4)
    rec = monte_carlo(d, state, np.array([0.0]), 6, seed=2)
    assert rec.purity_mean[0] == pytest.approx(0.25, abs=1e-12)
    assert np.abs(rec.eigenvalues[:, 0, :] - 0.25).max() < 1e-12


def test_monte_carlo_validation_errors():
    d = BipartiteDims(2, 2)
    with pytest.raises(ValueError):
        monte_carlo(d, product_state(), np.array([]), 5)
    with pytest.raises(ValueError):
        monte_carlo(d, product_state(), np.array([0.5]), 0)
    with pytest.raises(ValueError):
        monte_carlo(d, product_state(), np.array([0.5]), 5, method="magic")
    with pytest.raises(ValueError):
        # spectral subspace needs fewer time points than the dimension
        monte_carlo(d, product_state(), np.linspace(0, 1, 5), 2, method="spectral")


def test_per_realization_spectra_contracts():
    d = BipartiteDims(3, 5)
    rec = monte_carlo(d, product_state(), np.array([0.4, 1.7]), 30, seed=6)
    assert rec.eigenvalues.shape == (30, 2, 3)
    sums = rec.eigenvalues.sum(axis=2)
    assert np.abs(sums - 1.0).max() < 1e-10
    assert (np.diff(rec.eigenvalues, axis=2) <= 1e-15).all()  # descending
    assert (rec.eigenvalues > -1e-12).all()


@pytest.mark.parametrize("method", ["dense", "spectral"])
def test_mean_purity_matches_exact_formula_paired(method):
    """Per-spectrum pairing removes form-factor noise: the residual
    against the exact eigenvector average must be zero within errors."""
    d = BipartiteDims(2, 3)
    times = np.array([0.4, 1.1, 2.0])
    n_r = 4000
    rec = monte_carlo(d, product_state(), times, n_r, seed=11, method=method)
    resid = np.empty((n_r, times.size))
    for r in range(n_r):
        gen = as_generator(RngStream(11, r))
        if method == "dense":
            energies = np.linalg.eigvalsh(sample_gue(d.total, gen))
        else:
            energies = sample_gue_spectrum(d.total, gen)
        exact = np.array([theory.purity_exact(form_factors(energies, t), d)
                          for t in times])
        resid[r] = (rec.eigenvalues[r] ** 2).sum(axis=1) - exact
    z = resid.mean(0) / (resid.std(0, ddof=1) / np.sqrt(n_r))
    assert np.abs(z).max() < 4.0


def test_engines_agree_statistically():
    d = BipartiteDims(2, 3)
    times = np.array([0.5, 1.3])
    n_r = 4000
    a = monte_carlo(d, product_state(), times, n_r, seed=21, method="dense")
    b = monte_carlo(d, product_state(), times, n_r, seed=22, method="spectral")
    for key in ("purity", "lambda1"):
        va = a.purity_mean if key == "purity" else a.lambda1.mean(0)
        vb = b.purity_mean if key == "purity" else b.lambda1.mean(0)
        sa = a.purity_se if key == "purity" else a.lambda1.std(0, ddof=1) / np.sqrt(n_r)
        sb = b.purity_se if key == "purity" else b.lambda1.std(0, ddof=1) / np.sqrt(n_r)
        z = (va - vb) / np.sqrt(sa**2 + sb**2)
        assert np.abs(z).max() < 4.0


def test_top_eigenvalue_tracks_spike_prediction():
    """Medium-size run against the isolated-eigenvalue curve (r = g^2)."""
    d = BipartiteDims(64, 64)
    t = 0.5
    rec = monte_carlo(d, product_state(), np.array([t]), 60, seed=30)
    g = theory.gue_form_factor(t)
    pred = theory.top_eigenvalue_mean(g * g, d).mean
    assert abs(rec.lambda1[:, 0].mean() - pred) / pred < 0.02


def test_run_record_serialization(tmp_path):
    d = BipartiteDims(2, 2)
    rec = monte_carlo(d, product_state(), np.array([0.0, 1.0]), 4, seed=9)
    csv = tmp_path / "run.csv"
    rec.to_csv(csv)
    text = csv.read_text()
    assert text.startswith("#")
    assert "seed=9" in text
    assert "t,purity_mean,purity_se" in text
    rec.to_json(tmp_path / "run.json")
    import json
    payload = json.loads((tmp_path / "run.json").read_text())
    assert payload["config"]["seed"] == 9
    assert len(payload["times"]) == 2


def test_pooled_histogram_modes():
    d = BipartiteDims(4, 4)
    rec = monte_carlo(d, product_state(), np.array([0.8]), 40, seed=12)
    edges, dens = rec.pooled_histogram(0, bins=16)
    assert ((edges[1:] - edges[:-1]) * dens).sum() == pytest.approx(1.0)
    edges_b, dens_b = rec.pooled_histogram(0, bins=16, bulk_only=True)
    # bulk view drops the top eigenvalue, shifting support down
    assert edges_b[-1] < edges[-1]
    lean = monte_carlo(d, product_state(), np.array([0.8]), 4, seed=12,
                       keep_eigenvalues=False)
    with pytest.raises(ValueError):
        lean.pooled_histogram(0)
