"""Entanglement rates, entangling capability and the time-averaged rate bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import Trajectory, rotating_frame, sample_trajectory
from .errors import InputError, NumericalError
from .hamiltonian import CanonicalTwoQubit, NonlocalHamiltonian, _check_state
from .state import BipartiteState, SchmidtForm, entropy_of, fs_angle, log_fn

LOG_CLAMP = 1e-12
LOW_CONFIDENCE_LAMBDA = 1e-6
VANISHING_LAMBDA = 1e-10


def _product_basis(sf: SchmidtForm) -> np.ndarray:
    """Columns |a_n>|b_n> on the joint space."""
    return np.einsum("an,bn->abn", sf.left, sf.right).reshape(-1, sf.count)


def entangling_capability(H: NonlocalHamiltonian, sf: SchmidtForm, hbar: float = 1.0) -> np.ndarray:
    """h[n, m] = Im <a_n b_n| H |a_m b_m> / hbar.

    The product vectors |a_n b_n> are invariant under the Schmidt phase
    gauge, so h does not depend on how the Schmidt vectors are phased.
    """
    if sf.left.shape[0] * sf.right.shape[0] != H.matrix.shape[0]:
        raise InputError("dimension mismatch between Hamiltonian and Schmidt form")
    basis = _product_basis(sf)
    h = np.imag(basis.conj().T @ H.matrix @ basis) / hbar
    if np.max(np.abs(np.diag(h))) > 1e-12 * (1.0 + H.norm() / hbar):
        raise NumericalError("capability matrix has a non-zero diagonal")
    return h


def coefficient_flow(H: NonlocalHamiltonian, sf: SchmidtForm, hbar: float = 1.0) -> np.ndarray:
    """d lambda_n / dt = 2 sum_m sqrt(lambda_n lambda_m) h[n, m]."""
    root = np.sqrt(np.clip(sf.coefficients, 0.0, None))
    return 2.0 * root * (entangling_capability(H, sf, hbar) @ root)


@dataclass(frozen=True)
class RateSample:
    """Entanglement rate at one trajectory sample.

    ``gamma_fd`` differentiates the entropy directly, ``gamma_formula`` is
    -sum dlambda/dt log lambda with tracked central differences and
    ``gamma_capability`` is the same sum with dlambda/dt taken from the
    capability matrix. Rates are in ebits (or nats) per unit time.
    """

    t: float
    gamma_fd: float
    gamma_formula: float
    gamma_capability: float
    capability: np.ndarray
    lambda_min: float

    @property
    def low_confidence(self) -> bool:
        return self.lambda_min < LOW_CONFIDENCE_LAMBDA

    @property
    def capability_residual(self) -> float:
        return abs(self.gamma_formula - self.gamma_capability)


def _interior(traj: Trajectory, i: int) -> None:
    if not 0 < i < len(traj) - 1:
        raise InputError(f"index {i} is on the trajectory boundary; central differences need both neighbours")


def _dlambda(traj: Trajectory, i: int) -> np.ndarray:
    return (traj.schmidt[i + 1].coefficients - traj.schmidt[i - 1].coefficients) / (2 * traj.dt)


def entanglement_rate(traj: Trajectory, i: int, log_base=2) -> RateSample:
    _interior(traj, i)
    base = log_fn(log_base)
    dt = traj.dt
    e_prev = entropy_of(traj.schmidt[i - 1].coefficients, log_base)
    e_next = entropy_of(traj.schmidt[i + 1].coefficients, log_base)
    sf = traj.schmidt[i]
    logs = np.log(np.maximum(sf.coefficients, LOG_CLAMP)) / base
    dlam = _dlambda(traj, i)
    flow = coefficient_flow(traj.hamiltonian, sf, traj.hbar)
    return RateSample(
        t=float(traj.times[i]),
        gamma_fd=(e_next - e_prev) / (2 * dt),
        gamma_formula=float(-np.sum(dlam * logs)),
        gamma_capability=float(-np.sum(flow * logs)),
        capability=entangling_capability(traj.hamiltonian, sf, traj.hbar),
        lambda_min=float(np.min(sf.coefficients)),
    )


def _require_two_qubits(traj: Trajectory) -> None:
    if traj.dims != (2, 2):
        raise InputError(f"two-qubit identity needs dims (2, 2), got {traj.dims}")


def two_qubit_rate_identity(traj: Trajectory, i: int) -> tuple[float, float]:
    """Both sides of dp/dt = 2 sqrt(p(1-p)) h for the tracked coefficient p."""
    _require_two_qubits(traj)
    _interior(traj, i)
    sf = traj.schmidt[i]
    p = float(sf.coefficients[0])
    h = entangling_capability(traj.hamiltonian, sf, traj.hbar)[0, 1]
    dp = float(_dlambda(traj, i)[0])
    return dp, 2.0 * math.sqrt(max(p * (1.0 - p), 0.0)) * float(h)


@dataclass(frozen=True)
class RotatingSpeed:
    """Speed of the rotating-frame state at one sample.

    For two qubits ``pdot_form`` is pdot^2 / (p (1-p)) and ``two_h`` is
    2 |h_01|; both should agree with ``v**2`` and ``v`` respectively.
    """

    t: float
    v: float
    pdot_form: Optional[float] = None
    four_h2: Optional[float] = None
    two_h: Optional[float] = None


def rotating_speed(traj: Trajectory, i: int) -> RotatingSpeed:
    _interior(traj, i)
    sf = traj.schmidt[i]
    lam = sf.coefficients
    if np.min(lam) < VANISHING_LAMBDA:
        raise InputError(f"sample {i}: Schmidt coefficient {np.min(lam):.3e} vanishes; speed undefined")
    dlam = _dlambda(traj, i)
    v = math.sqrt(float(np.sum(dlam**2 / lam)))
    if traj.dims != (2, 2):
        return RotatingSpeed(float(traj.times[i]), v)
    p = float(lam[0])
    h = float(entangling_capability(traj.hamiltonian, sf, traj.hbar)[0, 1])
    return RotatingSpeed(
        float(traj.times[i]), v, float(dlam[0] ** 2 / (p * (1.0 - p))), 4.0 * h * h, 2.0 * abs(h)
    )


def rotating_speed_fd(traj: Trajectory, i: int) -> float:
    """Chord-angle speed of the rotating state at sample i.

    Interior samples use the centred chord 2 arccos |<psi_R(t_i-1)|psi_R(t_i+1)>| / (2 dt),
    which is second order in dt; the first sample falls back to the forward chord.
    """
    if not 0 <= i < len(traj) - 1:
        raise InputError(f"index {i} has no forward neighbour")
    frame = rotating_frame(traj)
    lo = i - 1 if i > 0 else i
    return 2.0 * fs_angle(frame.vectors[lo], frame.vectors[i + 1]) / (traj.times[i + 1] - traj.times[lo])


def time_avg_rate(traj: Trajectory, log_base=2) -> float:
    """(E(T) - E(0)) / T; the integral of the rate telescopes."""
    span = float(traj.times[-1] - traj.times[0])
    if not span > 0:
        raise InputError("time average needs a trajectory of positive duration")
    e0 = entropy_of(traj.schmidt[0].coefficients, log_base)
    e1 = entropy_of(traj.schmidt[-1].coefficients, log_base)
    return (e1 - e0) / span


def rate_bound(n: int, delta_h: float, s0: float, hbar: float = 1.0, log_base=2) -> float:
    """Upper bound 2 log(N) dH / (hbar S0) on the time-averaged rate.

    Returns ``math.inf`` (unbounded) when S0 = 0.
    """
    if n < 1:
        raise InputError(f"Schmidt count must be >= 1, got {n}")
    if not hbar > 0:
        raise InputError(f"hbar must be positive, got {hbar}")
    if s0 <= 0.0:
        return math.inf
    return 2.0 * (math.log(n) / log_fn(log_base)) * delta_h / (hbar * s0)


def two_qubit_rate_bound_alt(p: float, mu: CanonicalTwoQubit, s0: float) -> float:
    """(mu1 + mu2) sqrt(1 - 4p(1-p)) / S0.

    Alternative normalization of the two-qubit maximal average rate, which
    equals half of ``rate_bound(2, dH, S0)`` for the canonical problem.
    Reported for comparison only.
    """
    if s0 <= 0.0:
        return math.inf
    return mu.omega * math.sqrt(max(1.0 - 4.0 * p * (1.0 - p), 0.0)) / s0


# -- profiles for the CLI ----------------------------------------------------

RATE_HEADER = ["t", "gamma_fd", "gamma_formula", "v_rotating", "two_h", "lambda_min"]


def rate_profile(
    H: NonlocalHamiltonian,
    s0: BipartiteState,
    times,
    dt: Optional[float] = None,
    hbar: float = 1.0,
    log_base=2,
) -> list:
    """Rate diagnostics at each time, each on its own 3-point stencil.

    `dt` defaults to 1e-5 times the characteristic time hbar / ||H||.
    Rows follow :data:`RATE_HEADER`; undefined entries are None.
    """
    _check_state(H.matrix, s0)
    if dt is None:
        norm = H.norm()
        dt = 1e-5 * (hbar / norm if norm > 0 else 1.0)
    rows = []
    for t in np.asarray(times, dtype=float):
        traj = sample_trajectory(H, s0, 2 * dt, 3, hbar, t_start=t - dt)
        rs = entanglement_rate(traj, 1, log_base)
        try:
            sp = rotating_speed(traj, 1)
            v, two_h = sp.v, sp.two_h
        except InputError:
            v = two_h = None
        rows.append([float(t), rs.gamma_fd, rs.gamma_formula, v, two_h, rs.lambda_min])
    return rows
