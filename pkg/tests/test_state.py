import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entbrach.errors import InputError
from entbrach.sampling import random_product_state, random_state
from entbrach.state import (
    BipartiteState,
    basis_state,
    bell_psi_plus,
    entropy,
    entropy_of,
    geodesic_distance,
    load_state,
    overlap,
    product_state,
    save_state,
    schmidt,
    two_qubit_state,
)

KET0 = np.array([1, 0])
KET1 = np.array([0, 1])


def test_product_of_basis_vectors():
    s = product_state(KET0, KET1)
    np.testing.assert_allclose(s.amplitudes, [0, 1, 0, 0])


def test_product_normalizes():
    s = product_state(KET0 + KET1, KET0)
    np.testing.assert_allclose(s.amplitudes, np.array([1, 0, 1, 0]) / math.sqrt(2))


def test_product_rejects_zero():
    with pytest.raises(InputError, match="zero vector"):
        product_state([0, 0], KET0)


def test_product_is_rank_one(rng):
    s = product_state(rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=2))
    np.testing.assert_allclose(schmidt(s).coefficients, [1, 0], atol=1e-12)


def test_schmidt_bell():
    np.testing.assert_allclose(schmidt(bell_psi_plus()).coefficients, [0.5, 0.5], atol=1e-14)


def test_schmidt_basis_state():
    np.testing.assert_allclose(schmidt(basis_state(2, 2, 0, 1)).coefficients, [1, 0], atol=1e-14)


@pytest.mark.parametrize("p", [0.0, 0.0832, 0.3, 0.5])
def test_schmidt_partial_entangled(p):
    np.testing.assert_allclose(schmidt(two_qubit_state(p)).coefficients, [1 - p, p], atol=1e-14)


def test_entropy_values():
    assert entropy(schmidt(bell_psi_plus())) == pytest.approx(1.0, abs=1e-14)
    assert entropy(schmidt(basis_state(2, 2, 0, 1))) == 0.0


def test_entropy_reported_constant():
    # quoted as 0.413 ebit for the optimal initial weight
    assert entropy_of([0.9168, 0.0832]) == pytest.approx(0.413, abs=5e-4)


def test_entropy_in_nats():
    assert entropy(schmidt(bell_psi_plus()), "e") == pytest.approx(math.log(2))


def test_entropy_bad_base():
    with pytest.raises(InputError):
        entropy_of([0.5, 0.5], 10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_entropy_maximal_iff_uniform(n, rng):
    uniform = np.full(n, 1.0 / n)
    assert entropy_of(uniform) == pytest.approx(math.log2(n), abs=1e-12)
    for _ in range(20):
        lam = rng.dirichlet(np.ones(n))
        assert entropy_of(lam) < math.log2(n)


def test_overlap_examples():
    s01, s10 = basis_state(2, 2, 0, 1), basis_state(2, 2, 1, 0)
    assert overlap(s01, s01) == 1.0
    assert overlap(s01, s10) == 0.0
    assert overlap(s01, bell_psi_plus()) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_overlap_dimension_mismatch(rng):
    with pytest.raises(InputError, match="dimension mismatch"):
        overlap(random_state(2, 2, rng), random_state(2, 3, rng))


def test_geodesic_examples(rng):
    s = random_state(2, 3, rng)
    assert geodesic_distance(s, s) == pytest.approx(0.0, abs=1e-7)
    assert geodesic_distance(basis_state(2, 2, 0, 1), basis_state(2, 2, 1, 0)) == pytest.approx(math.pi)
    assert geodesic_distance(basis_state(2, 2, 0, 1), bell_psi_plus()) == pytest.approx(math.pi / 2)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), phase=st.floats(0, 2 * math.pi))
def test_geodesic_symmetric_and_phase_invariant(seed, phase):
    rng = np.random.default_rng(seed)
    a, b = random_state(3, 2, rng), random_state(3, 2, rng)
    d = geodesic_distance(a, b)
    assert geodesic_distance(b, a) == pytest.approx(d, abs=1e-12)
    b_ph = BipartiteState(3, 2, np.exp(1j * phase) * b.amplitudes)
    assert geodesic_distance(a, b_ph) == pytest.approx(d, abs=1e-12)
    assert 0.0 <= d <= math.pi


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dims=st.sampled_from([(2, 2), (2, 3), (3, 3), (4, 2)]))
def test_schmidt_reassembly(seed, dims):
    s = random_state(*dims, np.random.default_rng(seed))
    sf = schmidt(s)
    assert sf.coefficients.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all(np.diff(sf.coefficients) <= 1e-15)
    assert abs(np.vdot(sf.reassemble(), s.amplitudes)) >= 1 - 1e-10
    again = schmidt(BipartiteState.from_amplitudes(sf.reassemble(), *dims))
    np.testing.assert_allclose(again.coefficients, sf.coefficients, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_product_entropy_zero(seed):
    s = random_product_state(3, 2, np.random.default_rng(seed))
    assert entropy(schmidt(s)) == pytest.approx(0.0, abs=1e-10)


def test_rejects_unnormalized():
    with pytest.raises(InputError, match="normalized"):
        BipartiteState(2, 2, np.array([1, 1, 0, 0], dtype=complex))


def test_file_round_trip(tmp_path, rng):
    s = random_state(2, 3, rng)
    path = tmp_path / "s.json"
    save_state(s, path)
    back = load_state(path)
    assert back.dims == (2, 3)
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-15)


def test_file_normalizes_with_warning(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"dims": [2, 2], "amplitudes": [[0, 0], [1, 0], [1, 0], [0, 0]]}))
    with pytest.warns(UserWarning, match="normalizing"):
        s = load_state(path)
    np.testing.assert_allclose(s.amplitudes, bell_psi_plus().amplitudes)


@pytest.mark.parametrize(
    "content, match",
    [
        ('{"dims": [2, 2],\n "amplitudes": [[1, 0], ', "line 2"),
        ('{"amplitudes": []}', "missing field 'dims'"),
        ('{"dims": [2, 2], "amplitudes": [[1, 0]]}', "field 'amplitudes'"),
        ('{"dims": [2, 2], "amplitudes": [[1, 0], [0], [0, 0], [0, 0]]}', r"amplitudes'\[1\]"),
    ],
)
def test_file_malformed(tmp_path, content, match):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(InputError, match=match):
        load_state(path)
