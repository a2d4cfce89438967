"""Nonlocal Hamiltonians on a bipartite space.

A :class:`NonlocalHamiltonian` is a Hermitian matrix on the joint space,
optionally remembering the local/interaction split
``H = H1 (x) I + I (x) H2 + Hint`` it was assembled from. Energies are in
units where hbar = 1 unless an explicit ``hbar`` is passed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import InputError, NumericalError
from .linalg import as_matrix, check_hermitian, is_unitary, maxabs, svd
from .state import BipartiteState, schmidt, load_json, _parse_complex_list

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
I2 = np.eye(2, dtype=complex)

PRODUCT_RANK_TOL = 1e-10


class HamiltonianParts(NamedTuple):
    h1: np.ndarray
    h2: np.ndarray
    hint: np.ndarray


@dataclass(frozen=True, eq=False)
class NonlocalHamiltonian:
    dim_a: int
    dim_b: int
    matrix: np.ndarray
    parts: Optional[HamiltonianParts] = None

    def __post_init__(self):
        m = as_matrix(self.matrix, "hamiltonian")
        d = self.dim_a * self.dim_b
        if m.shape != (d, d):
            raise InputError(f"hamiltonian: expected {d}x{d} matrix, got {m.shape}")
        check_hermitian(m, "hamiltonian")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    def __neg__(self) -> "NonlocalHamiltonian":
        parts = None
        if self.parts is not None:
            parts = HamiltonianParts(*(-p for p in self.parts))
        return NonlocalHamiltonian(self.dim_a, self.dim_b, -self.matrix, parts)

    def shifted(self, c: float) -> "NonlocalHamiltonian":
        """H + c I (parts dropped)."""
        return NonlocalHamiltonian(
            self.dim_a, self.dim_b, self.matrix + c * np.eye(self.matrix.shape[0])
        )

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, 2))


@dataclass(frozen=True)
class TwoQubitCoefficients:
    alpha: tuple
    beta: tuple
    gamma: tuple

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        b = np.asarray(self.beta, dtype=float)
        g = np.asarray(self.gamma, dtype=float)
        if a.shape != (3,) or b.shape != (3,) or g.shape != (3, 3):
            raise InputError("pauli coefficients need alpha[3], beta[3], gamma[3][3]")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(g))):
            raise InputError("pauli coefficients must be finite")


@dataclass(frozen=True)
class CanonicalTwoQubit:
    mu: tuple

    def __post_init__(self):
        mu = tuple(float(x) for x in self.mu)
        if len(mu) != 3:
            raise InputError(f"canonical form needs three mu values, got {len(mu)}")
        if not (mu[0] >= mu[1] >= mu[2] >= 0.0):
            raise InputError(f"canonical mu must satisfy mu1 >= mu2 >= mu3 >= 0, got {mu}")
        object.__setattr__(self, "mu", mu)

    @property
    def omega(self) -> float:
        """mu1 + mu2, the frequency of the {|01>, |10>} block."""
        return self.mu[0] + self.mu[1]


def _lift(h1: np.ndarray, h2: np.ndarray) -> np.ndarray:
    return np.kron(h1, np.eye(h2.shape[0])) + np.kron(np.eye(h1.shape[0]), h2)


def lift_a(op, dim_b: int) -> np.ndarray:
    return np.kron(np.asarray(op, dtype=complex), np.eye(dim_b))


def lift_b(op, dim_a: int) -> np.ndarray:
    return np.kron(np.eye(dim_a), np.asarray(op, dtype=complex))


def assemble(h1, h2, hint=None) -> NonlocalHamiltonian:
    """Build H = H1 (x) I + I (x) H2 + Hint, keeping the parts."""
    h1 = as_matrix(h1, "H1")
    h2 = as_matrix(h2, "H2")
    check_hermitian(h1, "H1")
    check_hermitian(h2, "H2")
    d = h1.shape[0] * h2.shape[0]
    if hint is None:
        hint = np.zeros((d, d), dtype=complex)
    hint = as_matrix(hint, "Hint")
    if hint.shape != (d, d):
        raise InputError(f"Hint: expected {d}x{d} for joint space, got {hint.shape}")
    check_hermitian(hint, "Hint")
    return NonlocalHamiltonian(
        h1.shape[0], h2.shape[0], _lift(h1, h2) + hint, HamiltonianParts(h1, h2, hint)
    )


def from_pauli(c: TwoQubitCoefficients) -> NonlocalHamiltonian:
    alpha = np.asarray(c.alpha, dtype=float)
    beta = np.asarray(c.beta, dtype=float)
    gamma = np.asarray(c.gamma, dtype=float)
    h1 = sum(a * s for a, s in zip(alpha, PAULIS))
    h2 = sum(b * s for b, s in zip(beta, PAULIS))
    hint = sum(
        gamma[i, j] * np.kron(PAULIS[i], PAULIS[j]) for i in range(3) for j in range(3)
    )
    return assemble(h1, h2, hint)


def from_canonical(mu) -> NonlocalHamiltonian:
    """sum_k mu_k sigma_k (x) sigma_k."""
    if not isinstance(mu, CanonicalTwoQubit):
        mu = CanonicalTwoQubit(tuple(mu))
    return from_pauli(TwoQubitCoefficients((0, 0, 0), (0, 0, 0), np.diag(mu.mu)))


def canonicalize(gamma) -> CanonicalTwoQubit:
    """Sorted singular values of the 3x3 Pauli interaction matrix."""
    g = np.asarray(gamma, dtype=float)
    if g.shape != (3, 3):
        raise InputError(f"gamma must be 3x3, got {g.shape}")
    _, s, _ = svd(g)
    s = np.clip(s, 0.0, None)
    return CanonicalTwoQubit((s[0], s[1], s[2]))


def _check_state(h: np.ndarray, s: BipartiteState) -> None:
    if h.shape[0] != s.dim:
        raise InputError(f"dimension mismatch: operator is {h.shape[0]}-dim, state is {s.dims}")


def _matrix_of(op) -> np.ndarray:
    return op.matrix if isinstance(op, NonlocalHamiltonian) else np.asarray(op, dtype=complex)


def expectation(H, s: BipartiteState) -> float:
    h = _matrix_of(H)
    _check_state(h, s)
    val = np.vdot(s.amplitudes, h @ s.amplitudes)
    if abs(val.imag) > 1e-12 * (1.0 + maxabs(h)):
        raise NumericalError(f"expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)


def uncertainty(H, s: BipartiteState) -> float:
    """Delta H = sqrt(<H^2> - <H>^2), evaluated as || (H - <H>) psi ||."""
    h = _matrix_of(H)
    _check_state(h, s)
    psi = s.amplitudes
    e = expectation(h, s)
    return float(np.linalg.norm(h @ psi - e * psi))


def correlation(A, B, s: BipartiteState) -> complex:
    """C(A, B) = <AB> - <A><B>."""
    a = _matrix_of(A)
    b = _matrix_of(B)
    _check_state(a, s)
    _check_state(b, s)
    psi = s.amplitudes
    ea = np.vdot(psi, a @ psi)
    eb = np.vdot(psi, b @ psi)
    return complex(np.vdot(psi, a @ (b @ psi)) - ea * eb)


@dataclass(frozen=True)
class SpeedDecomposition:
    v2: float
    var_h1: float
    var_h2: float
    var_hint: float
    c_h1_hint: complex
    c_hint_h1: complex
    c_h2_hint: complex
    c_hint_h2: complex
    hbar: float


def speed_decomposition(H: NonlocalHamiltonian, s: BipartiteState, hbar: float = 1.0) -> SpeedDecomposition:
    """Squared Fubini-Study speed split into local variances and correlations.

    Only valid on product states, where the local variances are those of
    the factors. The prefactor is 4/hbar^2 so the total equals (2 dH/hbar)^2.
    """
    if H.parts is None:
        raise InputError("speed decomposition needs a Hamiltonian with (H1, H2, Hint) parts")
    if not hbar > 0:
        raise InputError(f"hbar must be positive, got {hbar}")
    _check_state(H.matrix, s)
    lam = schmidt(s).coefficients
    if np.any(lam[1:] > PRODUCT_RANK_TOL):
        raise InputError(f"state is not a product state (Schmidt coefficients {lam})")
    h1 = lift_a(H.parts.h1, H.dim_b)
    h2 = lift_b(H.parts.h2, H.dim_a)
    hint = H.parts.hint
    v1 = correlation(h1, h1, s).real
    v2 = correlation(h2, h2, s).real
    vi = correlation(hint, hint, s).real
    c1i, ci1 = correlation(h1, hint, s), correlation(hint, h1, s)
    c2i, ci2 = correlation(h2, hint, s), correlation(hint, h2, s)
    total = v1 + v2 + vi + c1i + ci1 + c2i + ci2
    if abs(total.imag) > 1e-10 * (1.0 + abs(total.real)):
        raise NumericalError(f"speed decomposition has imaginary residue {total.imag:.3e}")
    return SpeedDecomposition(
        4.0 / hbar**2 * total.real, v1, v2, vi, c1i, ci1, c2i, ci2, hbar
    )


def mix(terms: Sequence[tuple], H: NonlocalHamiltonian) -> NonlocalHamiltonian:
    """Composite Hamiltonian sum_k alpha_k U_k H U_k^dagger with alpha_k >= 0."""
    if not terms:
        raise InputError("mix needs at least one (weight, unitary) term")
    d = H.matrix.shape[0]
    out = np.zeros((d, d), dtype=complex)
    for k, (alpha, u) in enumerate(terms):
        if alpha < 0:
            raise InputError(f"term {k}: negative weight {alpha}")
        u = as_matrix(u, f"U_{k}")
        if u.shape != (d, d) or not is_unitary(u):
            raise InputError(f"term {k}: U_{k} is not a {d}x{d} unitary")
        out += alpha * (u @ H.matrix @ u.conj().T)
    return NonlocalHamiltonian(H.dim_a, H.dim_b, 0.5 * (out + out.conj().T))


# -- file format -----------------------------------------------------------

def hamiltonian_from_dict(data: dict, source: str = "hamiltonian") -> NonlocalHamiltonian:
    if not isinstance(data, dict) or len(data) != 1:
        raise InputError(f"{source}: expected exactly one of 'dense', 'pauli', 'canonical'")
    (kind, body), = data.items()
    if not isinstance(body, dict):
        raise InputError(f"{source}: field '{kind}' must be an object")
    try:
        if kind == "dense":
            dims = body.get("dims")
            rows = body.get("matrix")
            if not (isinstance(dims, list) and len(dims) == 2):
                raise InputError(f"{source}: field 'dense.dims' must be [dA, dB]")
            if not isinstance(rows, list):
                raise InputError(f"{source}: field 'dense.matrix' must be a list of rows")
            m = np.array(
                [_parse_complex_list(r, f"{source}: field 'dense.matrix[{i}]'") for i, r in enumerate(rows)]
            )
            return NonlocalHamiltonian(int(dims[0]), int(dims[1]), m)
        if kind == "pauli":
            missing = [k for k in ("alpha", "beta", "gamma") if k not in body]
            if missing:
                raise InputError(f"{source}: field 'pauli.{missing[0]}' missing")
            return from_pauli(TwoQubitCoefficients(body["alpha"], body["beta"], body["gamma"]))
        if kind == "canonical":
            if "mu" not in body:
                raise InputError(f"{source}: field 'canonical.mu' missing")
            return from_canonical(body["mu"])
    except InputError as exc:
        if str(exc).startswith(source):
            raise
        raise InputError(f"{source}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise InputError(f"{source}: field '{kind}': {exc}") from None
    raise InputError(f"{source}: unknown Hamiltonian kind '{kind}'")


def load_hamiltonian(path) -> NonlocalHamiltonian:
    return hamiltonian_from_dict(load_json(path), str(path))
