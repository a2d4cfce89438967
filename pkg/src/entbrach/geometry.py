"""Fubini-Study kinematics and minimum-time bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import Trajectory
from .errors import InputError
from .hamiltonian import CanonicalTwoQubit, NonlocalHamiltonian, uncertainty
from .state import BipartiteState, fs_angle, geodesic_distance, overlap

METRIC_MAX_DT = 1e-3
METRIC_LAMBDA_FLOOR = 1e-12
SAME_RAY_TOL = 1e-12  # S0 below this counts as the same ray
STATIONARY_TOL = 1e-12  # dH below this times ||H|| counts as stationary


@dataclass(frozen=True)
class BoundReport:
    """Minimum-time bound for one (H, initial, target) problem.

    ``t_bound`` is ``math.inf`` when the initial state is stationary under
    H but differs from the target; check :attr:`reachable` rather than
    comparing against infinity.
    """

    delta_h: float
    s0: float
    t_bound: float
    overlap: float
    hbar: float = 1.0
    t_achieved: Optional[float] = None

    @property
    def reachable(self) -> bool:
        return math.isfinite(self.t_bound)

    @property
    def slack(self) -> Optional[float]:
        if self.t_achieved is None or not self.reachable:
            return None
        return self.t_achieved - self.t_bound

    def with_achieved(self, t: Optional[float]) -> "BoundReport":
        return BoundReport(self.delta_h, self.s0, self.t_bound, self.overlap, self.hbar, t)

    def as_dict(self) -> dict:
        return {
            "hbar": self.hbar,
            "delta_h": self.delta_h,
            "s0": self.s0,
            "overlap": self.overlap,
            "t_bound": self.t_bound if self.reachable else "unreachable",
            "t_achieved": self.t_achieved,
            "slack": self.slack,
        }


def fs_speed(H: NonlocalHamiltonian, s: BipartiteState, hbar: float = 1.0) -> float:
    """Fubini-Study speed V = 2 dH / hbar."""
    if not hbar > 0:
        raise InputError(f"hbar must be positive, got {hbar}")
    return 2.0 * uncertainty(H, s) / hbar


def path_length(traj: Trajectory) -> float:
    """Sum of chord angles 2 arccos |<psi_i|psi_i+1>| along the samples."""
    if len(traj) < 2:
        raise InputError("path length needs at least two samples")
    v = traj.vectors
    return float(sum(2.0 * fs_angle(v[i], v[i + 1]) for i in range(len(v) - 1)))


def min_time_bound(
    H: NonlocalHamiltonian,
    initial: BipartiteState,
    target: BipartiteState,
    hbar: float = 1.0,
) -> BoundReport:
    if not hbar > 0:
        raise InputError(f"hbar must be positive, got {hbar}")
    if initial.dims != target.dims:
        raise InputError(f"dimension mismatch: initial {initial.dims} vs target {target.dims}")
    dh = uncertainty(H, initial)
    s0 = geodesic_distance(initial, target)
    t = bound_time(s0, dh, hbar, H.norm())
    return BoundReport(dh, s0, t, overlap(initial, target), hbar)


def bound_time(s0: float, delta_h: float, hbar: float = 1.0, scale: float = 1.0) -> float:
    """hbar S0 / (2 dH), with 0 for the same ray and inf for a stationary state.

    `scale` sets the energy scale (usually ||H||) against which a rounding-level
    dH is recognised as zero, so that an eigenstate never yields a 0/0 ratio.
    """
    if s0 <= SAME_RAY_TOL:
        return 0.0
    if delta_h <= STATIONARY_TOL * max(scale, 1e-300):
        return math.inf
    return hbar * (s0 / 2.0) / delta_h


def two_qubit_bound_curve(p: float, mu: CanonicalTwoQubit, hbar: float = 1.0) -> tuple[float, float]:
    """Closed-form (S0, T_bound) for sqrt(p)|01> + sqrt(1-p)|10> -> |Psi+>.

    Uses sqrt(p) = sin(theta), so S0 = pi/2 - 2 theta and
    sqrt(1 - 4p(1-p)) = cos(2 theta); this is the same curve as the arccos
    form but stays accurate near p = 1/2, where the limit 1/(2 (mu1+mu2))
    is returned.
    """
    if not 0.0 <= p <= 0.5:
        raise InputError(f"p must lie in [0, 1/2], got {p}")
    omega = mu.omega
    theta = math.asin(math.sqrt(p))
    u = max(math.pi / 4.0 - theta, 0.0)
    s0 = 2.0 * u
    if omega == 0.0:
        return s0, math.inf
    if u == 0.0:
        return 0.0, hbar / (2.0 * omega)
    return s0, hbar * u / (omega * math.sin(2.0 * u))


@dataclass(frozen=True)
class SchmidtMetric:
    """Schmidt-coordinate pieces of the squared Fubini-Study line element.

    The four rate terms are per dt^2 and sum to <dpsi|dpsi> - |<psi|dpsi>|^2;
    ``ds2`` is four times their sum times dt^2, on the same scale as
    4 dH^2 dt^2 / hbar^2.
    """

    local: float
    phase: float
    correlation: float
    coefficient: float
    dt: float

    @property
    def rate(self) -> float:
        return self.local + self.phase + self.correlation + self.coefficient

    @property
    def ds2(self) -> float:
        return 4.0 * self.rate * self.dt**2


def fs_metric_schmidt(traj: Trajectory, i: int) -> SchmidtMetric:
    if not 0 < i < len(traj) - 1:
        raise InputError(f"index {i} needs neighbours on both sides")
    dt = traj.dt
    if dt > METRIC_MAX_DT:
        raise InputError(f"step {dt:.3g} too coarse for the Schmidt metric (max {METRIC_MAX_DT})")
    prev, cur, nxt = traj.schmidt[i - 1], traj.schmidt[i], traj.schmidt[i + 1]
    lam = cur.coefficients
    dlam = (nxt.coefficients - prev.coefficients) / (2 * dt)
    da = (nxt.left - prev.left) / (2 * dt)
    db = (nxt.right - prev.right) / (2 * dt)
    a, b = cur.left, cur.right

    local = float(np.sum(lam * (np.sum(np.abs(da) ** 2, axis=0) + np.sum(np.abs(db) ** 2, axis=0))))
    conn_a = np.einsum("an,an->n", a.conj(), da)
    conn_b = np.einsum("bn,bn->n", b.conj(), db)
    phase = -float(np.real(np.sum(lam * 1j * (conn_a + conn_b)))) ** 2
    ga = a.conj().T @ da  # ga[m, n] = <a_m|da_n>
    gb = b.conj().T @ db
    root = np.sqrt(np.clip(lam, 0.0, None))
    corr = -2.0 * float(np.real(np.sum(np.outer(root, root) * ga * gb)))
    keep = lam > METRIC_LAMBDA_FLOOR
    coeff = float(np.sum(dlam[keep] ** 2 / (4.0 * lam[keep])))
    return SchmidtMetric(local, phase, corr, coeff, dt)
