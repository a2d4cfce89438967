import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entbrach.dynamics import (
    EntanglementLevel,
    ExactState,
    evolve,
    hitting_time,
    read_trajectory_csv,
    rotating_frame,
    sample_trajectory,
    trajectory_header,
    write_trajectory_csv,
)
from entbrach.errors import InputError
from entbrach.geometry import fs_speed, min_time_bound
from entbrach.hamiltonian import NonlocalHamiltonian, assemble, from_canonical
from entbrach.linalg import unitary_exp
from entbrach.sampling import random_hamiltonian, random_hermitian, random_product_state, random_state
from entbrach.state import BipartiteState, basis_state, entropy, overlap, schmidt, two_qubit_state

from oracles import block_amplitudes, lambda_closed_form


def test_evolve_at_zero(rng, canonical_h):
    s = random_state(2, 2, rng)
    assert overlap(evolve(canonical_h, s, 0.0), s) == pytest.approx(1.0, abs=1e-14)


def test_evolve_eigenstate(rng):
    h = random_hermitian(6, rng)
    _, q = np.linalg.eigh(h)
    s = BipartiteState(2, 3, q[:, 2])
    assert overlap(evolve(NonlocalHamiltonian(2, 3, h), s, 1.7), s) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("t", [0.1, 0.5, 1.3])
def test_evolve_canonical_product(mu, canonical_h, t):
    s = evolve(canonical_h, basis_state(2, 2, 0, 1), t)
    a01, a10 = block_amplitudes(mu.mu, 1.0, t)
    np.testing.assert_allclose(s.amplitudes, [0, a01, a10, 0], atol=1e-12)
    assert abs(s.amplitudes[1]) ** 2 == pytest.approx(math.cos(mu.omega * t) ** 2, abs=1e-12)


def test_evolve_norm_preserved(rng):
    h = random_hamiltonian(3, 3, rng)
    s = evolve(h, random_state(3, 3, rng), 12.3)
    assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t1=st.floats(-2, 2), t2=st.floats(-2, 2))
def test_evolve_composes(seed, t1, t2):
    rng = np.random.default_rng(seed)
    h = random_hamiltonian(2, 3, rng)
    s = random_state(2, 3, rng)
    direct = evolve(h, s, t1 + t2)
    stepped = evolve(h, evolve(h, s, t1), t2)
    assert overlap(direct, stepped) == pytest.approx(1.0, abs=1e-10)


def test_evolve_dimension_mismatch(rng):
    with pytest.raises(InputError, match="dimension mismatch"):
        evolve(random_hamiltonian(2, 2, rng), random_state(2, 3, rng), 1.0)


def test_trajectory_two_steps(canonical_h):
    traj = sample_trajectory(canonical_h, basis_state(2, 2, 0, 1), 1.0, 2)
    np.testing.assert_allclose(traj.times, [0.0, 1.0])


def test_trajectory_rejects_bad_args(canonical_h):
    s = basis_state(2, 2, 0, 1)
    with pytest.raises(InputError, match="t_max"):
        sample_trajectory(canonical_h, s, 0.0, 10)
    with pytest.raises(InputError, match="steps"):
        sample_trajectory(canonical_h, s, 1.0, 1)


def test_trajectory_samples_exact(rng):
    h = random_hamiltonian(2, 3, rng)
    s = random_state(2, 3, rng)
    traj = sample_trajectory(h, s, 4.0, 33)
    for i in range(0, 33, 4):
        u = unitary_exp(h.matrix, traj.times[i])
        exact = BipartiteState.from_amplitudes(u @ s.amplitudes, 2, 3)
        assert overlap(traj.state(i), exact) == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.norm(traj.vectors[i]) == pytest.approx(1.0, abs=1e-10)


def test_trajectory_local_entropy_constant(rng):
    h = assemble(random_hermitian(2, rng), random_hermitian(3, rng))
    s = random_state(2, 3, rng)
    ent = sample_trajectory(h, s, 5.0, 50).entropies()
    np.testing.assert_allclose(ent, ent[0], atol=1e-10)


@pytest.mark.parametrize("p", [0.0, 0.0832, 0.3])
def test_trajectory_lambda_closed_form(mu, canonical_h, p):
    traj = sample_trajectory(canonical_h, two_qubit_state(p), math.pi / mu.omega, 200)
    lam = traj.coefficients
    expected = np.array([lambda_closed_form(mu.mu, p, t) for t in traj.times])
    # one tracked branch follows the weight on |01>, through the crossing at 1/2
    err = min(np.max(np.abs(lam[:, k] - expected)) for k in range(2))
    assert err < 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dims=st.sampled_from([(2, 2), (2, 3), (3, 3)]))
def test_lambda_continuity(seed, dims):
    rng = np.random.default_rng(seed)
    h = random_hamiltonian(*dims, rng)
    s = random_state(*dims, rng)
    traj = sample_trajectory(h, s, 2.0, 400)
    v = fs_speed(h, s)
    jumps = np.max(np.abs(np.diff(traj.coefficients, axis=0)))
    assert jumps <= v * traj.dt + 1e-10


def test_tracking_keeps_reassembly(rng):
    h = random_hamiltonian(3, 3, rng)
    traj = sample_trajectory(h, random_state(3, 3, rng), 2.0, 100)
    for i in range(0, 100, 9):
        np.testing.assert_allclose(traj.schmidt[i].reassemble(), traj.vectors[i], atol=1e-10)


def test_rotating_frame_initial(rng):
    h = random_hamiltonian(2, 2, rng)
    s = random_state(2, 2, rng)
    rf = rotating_frame(sample_trajectory(h, s, 1.0, 20))
    assert overlap(rf.state(0, (2, 2)), s) == pytest.approx(1.0, abs=1e-12)


def test_rotating_frame_local_constant(rng):
    h = assemble(random_hermitian(2, rng), random_hermitian(3, rng))
    rf = rotating_frame(sample_trajectory(h, random_state(2, 3, rng), 3.0, 40))
    np.testing.assert_allclose(rf.vectors, np.broadcast_to(rf.vectors[0], rf.vectors.shape), atol=1e-10)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_rotating_frame_entropy_matches(rng, dims):
    h = random_hamiltonian(*dims, rng)
    traj = sample_trajectory(h, random_state(*dims, rng), 3.0, 120)
    rf = rotating_frame(traj)
    lab = traj.entropies()
    rot = np.array([entropy(schmidt(rf.state(i, dims))) for i in range(len(traj))])
    np.testing.assert_allclose(rot, lab, atol=1e-10)


def test_rotating_frame_flags_degeneracy(canonical_h):
    rf = rotating_frame(sample_trajectory(canonical_h, basis_state(2, 2, 0, 1), 1.0, 5))
    # |01> starts with lambda = (1, 0): non-degenerate, but Psi+ has (1/2, 1/2)
    assert rf.valid[0]
    rf2 = rotating_frame(sample_trajectory(canonical_h, two_qubit_state(0.5), 1.0, 5))
    assert not rf2.valid.any()


def test_hit_initial_is_zero(rng):
    h = random_hamiltonian(2, 2, rng)
    s = random_state(2, 2, rng)
    assert hitting_time(h, s, ExactState(s), 1.0) == 0.0


def test_hit_zero_hamiltonian():
    h = NonlocalHamiltonian(2, 2, np.zeros((4, 4)))
    assert hitting_time(h, basis_state(2, 2, 0, 1), EntanglementLevel(1.0), 5.0) is None


@pytest.mark.parametrize("p", [0.0, 0.0832, 0.25, 0.45])
def test_hit_one_ebit(mu, canonical_h, p):
    t = hitting_time(canonical_h, two_qubit_state(p), EntanglementLevel(1.0), math.pi / mu.omega)
    assert t == pytest.approx(math.pi / (4 * mu.omega), abs=1e-4)


def test_hit_partial_level_matches_closed_form(mu, canonical_h):
    # first time lambda(t) reaches the binary-entropy preimage of 0.5 ebit
    t = hitting_time(canonical_h, basis_state(2, 2, 0, 1), EntanglementLevel(0.5), 2.0)
    lam = lambda_closed_form(mu.mu, 0.0, t)
    h = -lam * math.log2(lam) - (1 - lam) * math.log2(1 - lam)
    assert h == pytest.approx(0.5, abs=1e-8)
    assert 0 < t < math.pi / (4 * mu.omega)


def test_hit_maximally_entangled_from_product(mu, canonical_h):
    # |01> reaches (|01> - i|10>)/sqrt(2) exactly at pi/(4 omega)
    target = BipartiteState(2, 2, np.array([0, 1, -1j, 0]) / math.sqrt(2))
    t = hitting_time(canonical_h, basis_state(2, 2, 0, 1), ExactState(target), 2.0)
    assert t == pytest.approx(math.pi / (4 * mu.omega), abs=1e-8)


@pytest.mark.parametrize("p", [0.0, 0.0832, 0.25])
def test_hit_psi_plus_unreachable(canonical_h, p):
    # Psi+ is an eigenvector of the {|01>, |10>} block, so its overlap is conserved
    from entbrach.state import bell_psi_plus

    assert hitting_time(canonical_h, two_qubit_state(p), ExactState(bell_psi_plus()), 10.0) is None


def test_hit_rejects_excess_level(canonical_h):
    with pytest.raises(InputError, match="exceeds"):
        hitting_time(canonical_h, basis_state(2, 2, 0, 1), EntanglementLevel(1.5), 1.0)


def test_hit_rejects_bad_args(canonical_h):
    s = basis_state(2, 2, 0, 1)
    with pytest.raises(InputError, match="t_max"):
        hitting_time(canonical_h, s, EntanglementLevel(1.0), 0.0)
    with pytest.raises(InputError, match="coarse_steps"):
        hitting_time(canonical_h, s, EntanglementLevel(1.0), 1.0, coarse_steps=8)


def test_hit_respects_bound_on_random_instances(rng):
    violations = 0
    for _ in range(100):
        h = random_hamiltonian(2, 2, rng)
        s = random_state(2, 2, rng)
        t_star = rng.uniform(0.05, 1.0) * math.pi / max(h.norm(), 1e-12)
        target = evolve(h, s, t_star)
        t_hit = hitting_time(h, s, ExactState(target), 1.5 * t_star)
        assert t_hit is not None
        bound = min_time_bound(h, s, target).t_bound
        violations += t_hit < bound - 1e-9
    assert violations == 0


def test_csv_round_trip(rng, canonical_h):
    from entbrach.state import bell_psi_plus

    traj = sample_trajectory(canonical_h, random_product_state(2, 2, rng), 1.0, 30)
    buf = io.StringIO()
    write_trajectory_csv(traj, buf, bell_psi_plus())
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(trajectory_header(2))
    assert lines[0] == "t,entropy_ebits,rate_ebits_per_time,fidelity_to_target,delta_h,lambda_1,lambda_2"
    buf.seek(0)
    table = read_trajectory_csv(buf)
    np.testing.assert_allclose(table.times, traj.times, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(table.entropy, traj.entropies(), rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(table.coefficients, traj.coefficients, rtol=1e-9, atol=1e-12)
    assert table.fidelity is not None


def test_csv_without_target(rng, canonical_h):
    traj = sample_trajectory(canonical_h, random_state(2, 2, rng), 1.0, 5)
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    buf.seek(0)
    assert read_trajectory_csv(buf).fidelity is None


def test_csv_rejects_bad_header():
    with pytest.raises(InputError, match="header"):
        read_trajectory_csv(io.StringIO("a,b,c\n1,2,3\n"))
