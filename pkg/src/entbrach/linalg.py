"""Dense complex linear algebra kernels.

Small matrices only (joint dimensions up to ~64). The decompositions are
backed by LAPACK through numpy; this module adds input validation and
checks the reconstruction residuals before handing results back.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InputError, NumericalError

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-10


class EigenSystem(NamedTuple):
    """Ascending real eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def maxabs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise InputError(f"{name}: expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name}: non-finite entries")
    return m


def check_square(a: np.ndarray, name: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise InputError(f"{name}: not square (shape {a.shape})")


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return maxabs(a - a.conj().T) <= tol * (1.0 + maxabs(a))


def check_hermitian(a: np.ndarray, name: str = "matrix") -> None:
    check_square(a, name)
    if not is_hermitian(a):
        dev = maxabs(a - a.conj().T)
        raise InputError(f"{name}: not Hermitian (max |A - A^H| = {dev:.3e})")


def is_unitary(u: np.ndarray, tol: float = RESIDUAL_TOL) -> bool:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return maxabs(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def hermitian_eig(a) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix.

    Raises
    ------
    InputError
        If `a` is not square or not Hermitian within tolerance.
    NumericalError
        If the reconstruction or orthonormality residual exceeds 1e-10.
    """
    a = as_matrix(a)
    check_hermitian(a)
    herm = 0.5 * (a + a.conj().T)
    w, q = np.linalg.eigh(herm)
    scale = 1.0 + maxabs(a)
    recon = maxabs(a - (q * w) @ q.conj().T)
    if recon > RESIDUAL_TOL * scale:
        raise NumericalError(f"eigendecomposition residual {recon:.3e} too large")
    orth = maxabs(q.conj().T @ q - np.eye(a.shape[0]))
    if orth > RESIDUAL_TOL:
        raise NumericalError(f"eigenvector orthonormality residual {orth:.3e} too large")
    return EigenSystem(w, q)


def exp_from_eig(es: EigenSystem, t: float, hbar: float = 1.0) -> np.ndarray:
    w, q = es
    return (q * np.exp(-1j * w * (t / hbar))) @ q.conj().T


def unitary_exp(a, t: float, hbar: float = 1.0) -> np.ndarray:
    """Return exp(-i A t / hbar) for Hermitian `a`."""
    if not hbar > 0:
        raise InputError(f"hbar must be positive, got {hbar}")
    u = exp_from_eig(hermitian_eig(a), t, hbar)
    if not is_unitary(u):
        raise NumericalError("matrix exponential lost unitarity")
    return u


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full singular value decomposition ``M = U @ diag(s) @ V^H``.

    Returns ``(U, s, V)`` with ``s`` nonnegative and descending. Note that
    the right factor is returned as ``V`` itself, not its adjoint.
    """
    m = as_matrix(m)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    sigma = np.zeros(m.shape)
    k = len(s)
    sigma[:k, :k] = np.diag(s)
    res = maxabs(m - u @ sigma @ vh)
    if res > RESIDUAL_TOL * (1.0 + maxabs(m)):
        raise NumericalError(f"svd residual {res:.3e} too large")
    return u, s, vh.conj().T
