"""Statistics of subsystem density matrices under random-Hamiltonian evolution.

The package simulates the reduced density matrix of a bipartite pure
state evolved by a random (unitary-class) Hamiltonian, provides the
matching closed-form spectral theory, Wishart-ensemble surrogates, exact
Haar-moment machinery for small-system verification, and distribution
analysis of the largest eigenvalue.
"""

from .bipartite import (BipartiteDims, FormFactors, SchmidtState, custom_schmidt_state,
                        form_factors, linear_schmidt_state, product_state, purity,
                        reduced_density, two_schmidt_state)
from .rng import RngStream
from .simulate import Propagator, RunRecord, evolve, monte_carlo

__version__ = "0.1.0"

__all__ = [
    "BipartiteDims",
    "FormFactors",
    "SchmidtState",
    "RngStream",
    "Propagator",
    "RunRecord",
    "custom_schmidt_state",
    "evolve",
    "form_factors",
    "linear_schmidt_state",
    "monte_carlo",
    "product_state",
    "purity",
    "reduced_density",
    "two_schmidt_state",
    "__version__",
]
