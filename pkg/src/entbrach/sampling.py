"""Seeded random instances for property checks."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .hamiltonian import NonlocalHamiltonian, assemble
from .state import BipartiteState


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (x + x.conj().T)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> BipartiteState:
    return BipartiteState.from_amplitudes(random_vector(dim_a * dim_b, rng), dim_a, dim_b)


def random_product_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> BipartiteState:
    v = np.kron(random_vector(dim_a, rng), random_vector(dim_b, rng))
    return BipartiteState.from_amplitudes(v, dim_a, dim_b)


def random_hamiltonian(dim_a: int, dim_b: int, rng: np.random.Generator) -> NonlocalHamiltonian:
    """Random H1 (x) I + I (x) H2 + Hint with all parts retained."""
    return assemble(
        random_hermitian(dim_a, rng),
        random_hermitian(dim_b, rng),
        random_hermitian(dim_a * dim_b, rng),
    )
