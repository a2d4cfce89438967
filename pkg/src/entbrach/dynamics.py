"""Exact unitary propagation, Schmidt-tracked trajectories and hitting times."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import InputError
from .hamiltonian import NonlocalHamiltonian, _check_state, uncertainty
from .linalg import exp_from_eig, hermitian_eig
from .state import BipartiteState, SchmidtForm, entropy_of, log_fn, schmidt, schmidt_coefficients

DEGENERACY_TOL = 1e-8
VANISHING_LAMBDA = 1e-10
LOG_FLOOR = 1e-300
BISECT_TOL = 1e-10


class Propagator:
    """exp(-iHt/hbar) applied to a fixed initial vector, for many times at once."""

    def __init__(self, H: NonlocalHamiltonian, s0: BipartiteState, hbar: float = 1.0):
        if not hbar > 0:
            raise InputError(f"hbar must be positive, got {hbar}")
        _check_state(H.matrix, s0)
        self.H = H
        self.s0 = s0
        self.hbar = hbar
        self.eig = hermitian_eig(H.matrix)
        self._coeffs = self.eig.eigenvectors.conj().T @ s0.amplitudes

    def _phased(self, times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        return np.exp(-1j * np.outer(t, self.eig.eigenvalues) / self.hbar) * self._coeffs

    def vectors(self, times) -> np.ndarray:
        """Rows are psi(t) for each t."""
        return self._phased(times) @ self.eig.eigenvectors.T

    def vectors_and_derivatives(self, times) -> tuple[np.ndarray, np.ndarray]:
        ph = self._phased(times)
        q = self.eig.eigenvectors.T
        return ph @ q, (-1j / self.hbar) * (ph * self.eig.eigenvalues) @ q

    def state(self, t: float) -> BipartiteState:
        v = self.vectors([t])[0]
        return BipartiteState.from_amplitudes(v, *self.s0.dims)


def evolve(H: NonlocalHamiltonian, s: BipartiteState, t: float, hbar: float = 1.0) -> BipartiteState:
    _check_state(H.matrix, s)
    if not hbar > 0:
        raise InputError(f"hbar must be positive, got {hbar}")
    u = exp_from_eig(hermitian_eig(H.matrix), t, hbar)
    return BipartiteState.from_amplitudes(u @ s.amplitudes, *s.dims)


def track_schmidt(prev: SchmidtForm, new: SchmidtForm) -> SchmidtForm:
    """Re-order and re-phase `new` so it continues `prev` smoothly.

    Pairs are matched greedily on the overlap of the local vectors; each
    left vector is then rotated so <a_prev|a_new> is real positive, with the
    opposite phase pushed onto the right vector (the product is unchanged).
    """
    n = prev.count
    ov = (
        np.abs(prev.left.conj().T @ new.left) ** 2
        + np.abs(prev.right.conj().T @ new.right) ** 2
    )
    perm = np.empty(n, dtype=int)
    ov = ov.copy()
    for _ in range(n):
        k, j = np.unravel_index(np.argmax(ov), ov.shape)
        perm[k] = j
        ov[k, :] = -1.0
        ov[:, j] = -1.0
    lam = new.coefficients[perm].copy()
    left = new.left[:, perm].copy()
    right = new.right[:, perm].copy()
    ph = np.einsum("an,an->n", prev.left.conj(), left)
    rot = np.exp(-1j * np.angle(ph))
    left *= rot
    right *= rot.conj()
    return SchmidtForm(lam, left, right)


@dataclass(frozen=True, eq=False)
class Trajectory:
    hamiltonian: NonlocalHamiltonian
    hbar: float
    times: np.ndarray
    vectors: np.ndarray
    schmidt: tuple

    @property
    def dims(self) -> tuple[int, int]:
        return self.hamiltonian.dims

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> BipartiteState:
        return BipartiteState.from_amplitudes(self.vectors[i], *self.dims)

    @property
    def coefficients(self) -> np.ndarray:
        """Tracked Schmidt coefficients, shape (samples, N)."""
        return np.array([sf.coefficients for sf in self.schmidt])

    def entropies(self, log_base=2) -> np.ndarray:
        return np.array([entropy_of(sf.coefficients, log_base) for sf in self.schmidt])


def sample_trajectory(
    H: NonlocalHamiltonian,
    s0: BipartiteState,
    t_max: float,
    steps: int,
    hbar: float = 1.0,
    t_start: float = 0.0,
) -> Trajectory:
    """Exact states on a uniform grid ``t_start .. t_start + t_max`` with `steps` samples.

    `s0` is the state at t = 0; when ``t_start != 0`` the first sample is
    ``evolve(H, s0, t_start)``.
    """
    if not t_max > 0:
        raise InputError(f"t_max must be positive, got {t_max}")
    if steps < 2:
        raise InputError(f"steps must be >= 2, got {steps}")
    prop = Propagator(H, s0, hbar)
    times = t_start + np.linspace(0.0, t_max, steps)
    vecs = prop.vectors(times)
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    da, db = s0.dims
    forms = [schmidt(BipartiteState(da, db, vecs[0]))]
    for v in vecs[1:]:
        forms.append(track_schmidt(forms[-1], schmidt(BipartiteState(da, db, v))))
    vecs.flags.writeable = False
    return Trajectory(H, hbar, times, vecs, tuple(forms))


@dataclass(frozen=True, eq=False)
class RotatingFrame:
    """States in the frame co-moving with the Schmidt bases.

    ``valid[i]`` is False where the tracked coefficients are degenerate and
    the frame is not defined.
    """

    times: np.ndarray
    vectors: np.ndarray
    valid: np.ndarray

    def state(self, i: int, dims) -> BipartiteState:
        return BipartiteState.from_amplitudes(self.vectors[i], *dims)


def _min_gap(lam: np.ndarray) -> float:
    if len(lam) < 2:
        return math.inf
    srt = np.sort(lam)
    return float(np.min(np.diff(srt)))


def rotating_frame(traj: Trajectory) -> RotatingFrame:
    a0 = traj.schmidt[0].left
    b0 = traj.schmidt[0].right
    lam = traj.coefficients
    roots = np.sqrt(np.clip(lam, 0.0, None))
    vecs = np.einsum("tn,an,bn->tab", roots, a0, b0).reshape(len(traj), -1)
    valid = np.array([_min_gap(row) > DEGENERACY_TOL for row in lam])
    return RotatingFrame(traj.times.copy(), vecs, valid)


# -- hitting times -----------------------------------------------------------

@dataclass(frozen=True)
class ExactState:
    target: BipartiteState
    fidelity_threshold: float = 1.0 - 1e-9

    def __post_init__(self):
        if not 0.0 < self.fidelity_threshold <= 1.0:
            raise InputError(f"fidelity threshold must lie in (0, 1], got {self.fidelity_threshold}")


@dataclass(frozen=True)
class EntanglementLevel:
    ebits: float
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.ebits < 0:
            raise InputError(f"entanglement level must be >= 0, got {self.ebits}")


TargetSpec = Union[ExactState, EntanglementLevel]


def fidelity_curve(prop: Propagator, target: BipartiteState, times) -> tuple[np.ndarray, np.ndarray]:
    """|<target|psi(t)>|^2 and its time derivative."""
    psi, dpsi = prop.vectors_and_derivatives(times)
    tc = target.amplitudes.conj()
    a = psi @ tc
    da = dpsi @ tc
    return np.abs(a) ** 2, 2.0 * np.real(a.conj() * da)


def entropy_curve(prop: Propagator, times, log_base=2) -> tuple[np.ndarray, np.ndarray]:
    """Entanglement entropy and its exact time derivative -tr(rho_A' log rho_A)."""
    da, db = prop.s0.dims
    psi, dpsi = prop.vectors_and_derivatives(times)
    m = psi.reshape(-1, da, db)
    dm = dpsi.reshape(-1, da, db)
    rho = m @ m.conj().transpose(0, 2, 1)
    drho = dm @ m.conj().transpose(0, 2, 1)
    drho = drho + drho.conj().transpose(0, 2, 1)
    w, q = np.linalg.eigh(0.5 * (rho + rho.conj().transpose(0, 2, 1)))
    w = np.clip(w, 0.0, None)
    logw = np.log(np.maximum(w, LOG_FLOOR))
    # diagonal of rho' in the eigenbasis of rho
    ddiag = np.real(np.einsum("tia,tij,tja->ta", q.conj(), drho, q))
    base = log_fn(log_base)
    lam = schmidt_coefficients(m)
    ent = np.array([entropy_of(row, log_base) for row in lam])
    return ent, -np.sum(ddiag * logw, axis=1) / base


def _bisect(f: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of f on [lo, hi] given f(lo) < 0 <= f(hi)."""
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def _refine_peak(value, deriv, lo: float, hi: float) -> float:
    if deriv(lo) > 0.0 > deriv(hi):
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if deriv(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    # derivative does not bracket (flat or noisy); golden-section on the value
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = value(c), value(d)
    while b - a > BISECT_TOL:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = value(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = value(d)
    return 0.5 * (a + b)


def hitting_time(
    H: NonlocalHamiltonian,
    s0: BipartiteState,
    spec: TargetSpec,
    t_max: float,
    coarse_steps: int = 4096,
    hbar: float = 1.0,
) -> Optional[float]:
    """First time in [0, t_max] at which the evolving state meets `spec`.

    For :class:`ExactState` this is the arrival time: the first local peak
    of the fidelity to the target whose value reaches the threshold. For
    :class:`EntanglementLevel` it is the first time the entropy (in ebits)
    reaches the level, either by crossing it or by touching it within the
    tolerance at a local maximum. Returns None when the criterion is never
    met on the scanned interval.
    """
    if not t_max > 0:
        raise InputError(f"t_max must be positive, got {t_max}")
    if coarse_steps < 16:
        raise InputError(f"coarse_steps must be >= 16, got {coarse_steps}")
    prop = Propagator(H, s0, hbar)

    if isinstance(spec, ExactState):
        if spec.target.dims != s0.dims:
            raise InputError(f"dimension mismatch: target {spec.target.dims} vs state {s0.dims}")
        level, tol, crossing = spec.fidelity_threshold, 0.0, False

        def curve(t):
            return fidelity_curve(prop, spec.target, t)
    elif isinstance(spec, EntanglementLevel):
        n = min(s0.dims)
        if spec.ebits > math.log2(n) + 1e-12:
            raise InputError(f"level {spec.ebits} ebits exceeds log2(N) = {math.log2(n):.6g}")
        level, tol, crossing = spec.ebits, spec.tolerance, True

        def curve(t):
            return entropy_curve(prop, t, 2)
    else:
        raise InputError(f"unknown target spec {spec!r}")

    def g(t: float) -> float:
        return float(curve([t])[0][0]) - level

    def dg(t: float) -> float:
        return float(curve([t])[1][0])

    times = np.linspace(0.0, t_max, coarse_steps)
    vals = curve(times)[0] - level
    if vals[0] >= -tol:
        return 0.0
    for i in range(1, len(times)):
        if crossing and vals[i] >= 0.0:
            return float(_bisect(g, times[i - 1], times[i]))
        if i + 1 < len(times) and vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]:
            margin = 2.0 * max(vals[i] - vals[i - 1], vals[i] - vals[i + 1])
            if vals[i] + margin < -tol:
                continue
            tp = _refine_peak(g, dg, times[i - 1], times[i + 1])
            gp = g(tp)
            if gp >= -tol:
                if crossing and gp > 0.0 and vals[i - 1] < 0.0:
                    return float(_bisect(g, times[i - 1], tp))
                return float(tp)
    return None


# -- CSV ---------------------------------------------------------------------

def trajectory_header(n: int) -> list:
    return ["t", "entropy_ebits", "rate_ebits_per_time", "fidelity_to_target", "delta_h"] + [
        f"lambda_{k + 1}" for k in range(n)
    ]


def _fmt(x) -> str:
    return "" if x is None else f"{float(x):.12g}"


def trajectory_rows(traj: Trajectory, target: Optional[BipartiteState] = None) -> list:
    """Per-sample observables in the trajectory CSV column order."""
    prop = Propagator(traj.hamiltonian, traj.state(0), traj.hbar)
    rel = traj.times - traj.times[0]
    ent, rate = entropy_curve(prop, rel, 2)
    fid = fidelity_curve(prop, target, rel)[0] if target is not None else [None] * len(traj)
    dh = uncertainty(traj.hamiltonian, traj.state(0))
    lam = traj.coefficients
    return [
        [traj.times[i], ent[i], rate[i], fid[i], dh] + list(lam[i]) for i in range(len(traj))
    ]


def write_trajectory_csv(traj: Trajectory, stream, target: Optional[BipartiteState] = None) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(trajectory_header(min(traj.dims)))
    for row in trajectory_rows(traj, target):
        w.writerow([_fmt(x) for x in row])


@dataclass(frozen=True, eq=False)
class TrajectoryTable:
    """Observables parsed back from a trajectory CSV."""

    times: np.ndarray
    entropy: np.ndarray
    rate: np.ndarray
    fidelity: Optional[np.ndarray]
    delta_h: np.ndarray
    coefficients: np.ndarray


def read_trajectory_csv(stream) -> TrajectoryTable:
    rows = list(csv.reader(stream))
    if not rows:
        raise InputError("trajectory csv: empty file")
    header = rows[0]
    n = len(header) - 5
    if n < 1 or header != trajectory_header(n):
        raise InputError(f"trajectory csv: unexpected header {header}")
    body = rows[1:]
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise InputError(f"trajectory csv: line {lineno} has {len(r)} fields, expected {len(header)}")

    def col(k):
        return np.array([float(r[k]) for r in body])

    fid = None if any(r[3] == "" for r in body) else col(3)
    lam = np.array([[float(x) for x in r[5:]] for r in body])
    return TrajectoryTable(col(0), col(1), col(2), fid, col(4), lam)
