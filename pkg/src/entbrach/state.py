"""Bipartite pure states and their Schmidt decomposition.

Amplitudes are stored flat with ``amplitudes[a * dim_b + b] = <a, b | psi>``,
so ``amplitudes.reshape(dim_a, dim_b)`` is the coefficient matrix whose
singular values are the square roots of the Schmidt coefficients.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError
from .linalg import svd

NORM_TOL = 1e-12
LOAD_NORM_WARN = 1e-6


def log_fn(base):
    """Map a log-base spec (2, 'e', e) to a natural-log divisor."""
    if base in (2, "2"):
        return math.log(2.0)
    if base in ("e", math.e) or (isinstance(base, float) and abs(base - math.e) < 1e-15):
        return 1.0
    raise InputError(f"log base must be 2 or 'e', got {base!r}")


@dataclass(frozen=True, eq=False)
class BipartiteState:
    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.dim_a < 2 or self.dim_b < 2:
            raise InputError(f"subsystem dimensions must be >= 2, got {self.dim_a}x{self.dim_b}")
        if amps.size != self.dim_a * self.dim_b:
            raise InputError(
                f"amplitudes: expected {self.dim_a * self.dim_b} entries, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InputError(f"state not normalized (norm = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, dim_a: int, dim_b: int) -> "BipartiteState":
        """Build a state from unnormalized amplitudes."""
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if not norm > 0 or not np.isfinite(norm):
            raise InputError("cannot normalize a zero or non-finite vector")
        return cls(dim_a, dim_b, amps / norm)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dim_a, self.dim_b)


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """Schmidt coefficients with paired local vectors.

    ``left[:, n]`` and ``right[:, n]`` are the vectors paired with
    ``coefficients[n]``. Forms straight out of :func:`schmidt` are sorted
    descending; forms produced by continuity tracking keep the tracked order.
    """

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def count(self) -> int:
        return len(self.coefficients)

    def reassemble(self) -> np.ndarray:
        """Flat amplitude vector sum_n sqrt(lambda_n) |a_n>|b_n>."""
        root = np.sqrt(np.clip(self.coefficients, 0.0, None))
        return np.einsum("n,an,bn->ab", root, self.left, self.right).reshape(-1)


def product_state(psi, phi) -> BipartiteState:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    for name, v in (("psi", psi), ("phi", phi)):
        if not np.linalg.norm(v) > 0:
            raise InputError(f"{name}: zero vector cannot be normalized")
    return BipartiteState.from_amplitudes(np.kron(psi, phi), len(psi), len(phi))


def basis_state(dim_a: int, dim_b: int, a: int, b: int) -> BipartiteState:
    amps = np.zeros(dim_a * dim_b, dtype=complex)
    amps[a * dim_b + b] = 1.0
    return BipartiteState(dim_a, dim_b, amps)


def two_qubit_state(p: float) -> BipartiteState:
    """sqrt(p)|01> + sqrt(1-p)|10>, the partially entangled two-qubit family."""
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    return BipartiteState(2, 2, np.array([0.0, math.sqrt(p), math.sqrt(1.0 - p), 0.0], dtype=complex))


def bell_psi_plus() -> BipartiteState:
    return two_qubit_state(0.5)


def schmidt(state: BipartiteState) -> SchmidtForm:
    u, s, v = svd(state.matrix())
    n = min(state.dim_a, state.dim_b)
    lam = s[:n] ** 2
    # coefficient matrix = sum_n s_n u_n v_n^H, so |b_n> has components conj(v_n)
    return SchmidtForm(lam, u[:, :n], v[:, :n].conj())


def schmidt_coefficients(matrices: np.ndarray) -> np.ndarray:
    """Descending Schmidt coefficients for a stack of coefficient matrices."""
    s = np.linalg.svd(matrices, compute_uv=False)
    return s**2


def entropy_of(coefficients, log_base=2) -> float:
    lam = np.asarray(coefficients, dtype=float)
    lam = lam[lam > 0.0]
    return float(-np.sum(lam * np.log(lam)) / log_fn(log_base)) + 0.0


def entropy(sf: SchmidtForm, log_base=2) -> float:
    """Entanglement entropy -sum lambda log lambda (0 log 0 = 0)."""
    return entropy_of(sf.coefficients, log_base)


def _check_dims(a: BipartiteState, b: BipartiteState) -> None:
    if a.dims != b.dims:
        raise InputError(f"dimension mismatch: {a.dims} vs {b.dims}")


def overlap(a: BipartiteState, b: BipartiteState) -> float:
    _check_dims(a, b)
    return float(min(1.0, max(0.0, abs(np.vdot(a.amplitudes, b.amplitudes)))))


def fs_angle(x: np.ndarray, y: np.ndarray) -> float:
    """arccos |<x|y>| for unit vectors, computed without cancellation near 0."""
    ip = np.vdot(x, y)
    perp = np.linalg.norm(y - ip * x)
    return float(math.atan2(perp, abs(ip)))


def geodesic_distance(a: BipartiteState, b: BipartiteState) -> float:
    """Fubini-Study geodesic distance S0 = 2 arccos |<a|b>| in [0, pi]."""
    _check_dims(a, b)
    return 2.0 * fs_angle(a.amplitudes, b.amplitudes)


# -- file format -----------------------------------------------------------

def _parse_complex_list(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise InputError(f"{where}: expected a list of [re, im] pairs")
    out = np.empty(len(raw), dtype=complex)
    for i, item in enumerate(raw):
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out[i] = float(item)
            continue
        if not (isinstance(item, list) and len(item) == 2):
            raise InputError(f"{where}[{i}]: expected [re, im], got {item!r}")
        try:
            out[i] = complex(float(item[0]), float(item[1]))
        except (TypeError, ValueError):
            raise InputError(f"{where}[{i}]: non-numeric entry {item!r}") from None
    return out


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def state_from_dict(data: dict, source: str = "state") -> BipartiteState:
    if not isinstance(data, dict):
        raise InputError(f"{source}: top level must be an object")
    for key in ("dims", "amplitudes"):
        if key not in data:
            raise InputError(f"{source}: missing field '{key}'")
    dims = data["dims"]
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) for d in dims)):
        raise InputError(f"{source}: field 'dims' must be [dA, dB] integers")
    amps = _parse_complex_list(data["amplitudes"], f"{source}: field 'amplitudes'")
    if amps.size != dims[0] * dims[1]:
        raise InputError(
            f"{source}: field 'amplitudes' has {amps.size} entries, dims need {dims[0] * dims[1]}"
        )
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > LOAD_NORM_WARN:
        warnings.warn(f"{source}: amplitudes have norm {norm:.6g}; normalizing", stacklevel=2)
    return BipartiteState.from_amplitudes(amps, dims[0], dims[1])


def load_state(path) -> BipartiteState:
    return state_from_dict(load_json(path), str(path))


def state_to_dict(state: BipartiteState) -> dict:
    return {
        "dims": [state.dim_a, state.dim_b],
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
    }


def save_state(state: BipartiteState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)) + "\n")
