"""Two-qubit minimum-time experiments and the composition law for mixed Hamiltonians."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import EntanglementLevel, ExactState, hitting_time
from .errors import InputError, NumericalError
from .geometry import bound_time, min_time_bound, two_qubit_bound_curve
from .hamiltonian import CanonicalTwoQubit, NonlocalHamiltonian, from_canonical, uncertainty
from .state import BipartiteState, bell_psi_plus, entropy, geodesic_distance, schmidt, two_qubit_state

GOLDEN_TOL = 1e-8
CLOSED_FORM_TOL = 1e-10


@dataclass(frozen=True)
class SweepRow:
    p: float
    entropy: float
    s0: float
    delta_h: float
    t_bound: float
    t_hit_ebit: Optional[float]
    t_hit_exact: Optional[float]

    def as_list(self) -> list:
        return [self.p, self.entropy, self.s0, self.delta_h, self.t_bound, self.t_hit_ebit, self.t_hit_exact]


SWEEP_HEADER = ["p", "entropy_ebits", "s0", "delta_h", "t_bound", "t_hit_ebit", "t_hit_exact"]


def sweep_row(
    p: float,
    mu: CanonicalTwoQubit,
    hbar: float = 1.0,
    t_max: Optional[float] = None,
    coarse_steps: int = 4096,
) -> SweepRow:
    """One row of the initial-entanglement sweep.

    The bound comes from the closed form and is cross-checked against the
    4x4 matrix computation for p < 1/2 (at p = 1/2 the closed form returns
    the limiting value while the matrix problem is trivially solved at t = 0).
    """
    H = from_canonical(mu)
    s = two_qubit_state(p)
    target = bell_psi_plus()
    s0, t_bound = two_qubit_bound_curve(p, mu, hbar)
    report = min_time_bound(H, s, target, hbar)
    if p < 0.5 and abs(report.t_bound - t_bound) > CLOSED_FORM_TOL * max(1.0, abs(t_bound)):
        raise NumericalError(
            f"p={p}: closed-form bound {t_bound!r} disagrees with matrix bound {report.t_bound!r}"
        )
    if t_max is None:
        t_max = math.pi * hbar / (2.0 * mu.omega)
    t_ebit = hitting_time(H, s, EntanglementLevel(1.0), t_max, coarse_steps, hbar)
    t_exact = hitting_time(H, s, ExactState(target), t_max, coarse_steps, hbar)
    return SweepRow(p, entropy(schmidt(s)), s0, report.delta_h, t_bound, t_ebit, t_exact)


def sweep_p(
    mu: CanonicalTwoQubit,
    grid: int,
    hbar: float = 1.0,
    t_max: Optional[float] = None,
    coarse_steps: int = 4096,
) -> list:
    """Sweep p uniformly over [0, 1/2] for sqrt(p)|01> + sqrt(1-p)|10> -> |Psi+>."""
    if grid < 2:
        raise InputError(f"grid must be >= 2, got {grid}")
    if not mu.omega > 0:
        raise InputError("mu1 + mu2 must be positive for a finite sweep")
    return [sweep_row(float(p), mu, hbar, t_max, coarse_steps) for p in np.linspace(0.0, 0.5, grid)]


def rate_objective(p: float) -> float:
    """2 sqrt(p(1-p)) log2((1-p)/p), the peak two-qubit entangling rate at weight p."""
    if p <= 0.0 or p >= 0.5:
        return 0.0
    return 2.0 * math.sqrt(p * (1.0 - p)) * math.log2((1.0 - p) / p)


def best_rate_p() -> tuple[float, float]:
    """Golden-section maximization of :func:`rate_objective` on (0, 1/2)."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = 0.0, 0.5
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = rate_objective(c), rate_objective(d)
    while b - a > GOLDEN_TOL:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = rate_objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = rate_objective(d)
    p0 = 0.5 * (a + b)
    return p0, rate_objective(p0)


def composition_time(t1: float, t2: float, alpha1: float, alpha2: float) -> float:
    """T = t1 t2 / (alpha1 t2 + alpha2 t1)."""
    if not (t1 > 0 and t2 > 0):
        raise InputError(f"component times must be positive, got {t1}, {t2}")
    if alpha1 < 0 or alpha2 < 0:
        raise InputError(f"weights must be nonnegative, got {alpha1}, {alpha2}")
    den = alpha1 * t2 + alpha2 * t1
    if not den > 0:
        raise InputError("degenerate composition: both weights are zero")
    return t1 * t2 / den


@dataclass(frozen=True)
class CompositionReport:
    """Minimum-time bounds for H1, H2 and H' = alpha1 H1 + alpha2 H2.

    ``t_composed`` is the bound computed directly from dH'; ``t_predicted``
    is the composition law applied to ``t1`` and ``t2``. Uncertainty is
    convex, so ``t_composed >= t_predicted`` always; equality holds when the
    fluctuation vectors (H_k - <H_k>)|psi> are positively aligned.
    """

    s0: float
    delta_h1: float
    delta_h2: float
    delta_h_mix: float
    t1: float
    t2: float
    t_composed: float
    t_predicted: float
    commuting: bool
    hbar: float

    @property
    def residual(self) -> float:
        return self.t_composed - self.t_predicted

    @property
    def chain_holds(self) -> bool:
        return self.t_composed >= self.t_predicted - 1e-10 * max(1.0, abs(self.t_predicted))

    @property
    def equality(self) -> bool:
        return abs(self.residual) <= 1e-10 * max(1.0, abs(self.t_predicted))

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d.update(residual=self.residual, chain_holds=self.chain_holds, equality=self.equality)
        return {k: (v if not (isinstance(v, float) and math.isinf(v)) else "unreachable") for k, v in d.items()}


def verify_composition(
    H1: NonlocalHamiltonian,
    H2: NonlocalHamiltonian,
    alpha1: float,
    alpha2: float,
    initial: BipartiteState,
    target: BipartiteState,
    hbar: float = 1.0,
) -> CompositionReport:
    if H1.dims != H2.dims:
        raise InputError(f"dimension mismatch: H1 {H1.dims} vs H2 {H2.dims}")
    if alpha1 < 0 or alpha2 < 0:
        raise InputError(f"weights must be nonnegative, got {alpha1}, {alpha2}")
    if alpha1 == 0 and alpha2 == 0:
        raise InputError("degenerate composition: both weights are zero")
    s0 = geodesic_distance(initial, target)
    mixed = NonlocalHamiltonian(H1.dim_a, H1.dim_b, alpha1 * H1.matrix + alpha2 * H2.matrix)
    dh1, dh2, dhm = uncertainty(H1, initial), uncertainty(H2, initial), uncertainty(mixed, initial)
    scale = max(H1.norm(), H2.norm())
    t1, t2 = bound_time(s0, dh1, hbar, scale), bound_time(s0, dh2, hbar, scale)
    # composition law written through the uncertainties, which also covers
    # a zero weight or a stationary component
    t_pred = bound_time(s0, alpha1 * dh1 + alpha2 * dh2, hbar, scale)
    comm = H1.matrix @ H2.matrix - H2.matrix @ H1.matrix
    commuting = bool(np.linalg.norm(comm @ initial.amplitudes) <= 1e-10 * (1.0 + H1.norm() * H2.norm()))
    return CompositionReport(
        s0, dh1, dh2, dhm, t1, t2, bound_time(s0, dhm, hbar, scale), t_pred, commuting, hbar
    )
