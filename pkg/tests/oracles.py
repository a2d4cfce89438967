"""Independent reference computations used as test oracles.

Nothing here calls into the package's decompositions or propagators.
"""

import math

import numpy as np


def jacobi_eigvalsh(a, tol=1e-14, max_sweeps=100):
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    The n x n Hermitian matrix is embedded as the 2n x 2n real symmetric
    matrix [[Re, -Im], [Im, Re]], whose spectrum is each eigenvalue twice.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    m = np.block([[a.real, -a.imag], [a.imag, a.real]]).astype(float)
    size = 2 * n
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum((m - np.diag(np.diag(m))) ** 2))
        if off < tol * (1.0 + np.max(np.abs(m))):
            break
        for p in range(size):
            for q in range(p + 1, size):
                if abs(m[p, q]) < 1e-300:
                    continue
                theta = 0.5 * math.atan2(2 * m[p, q], m[q, q] - m[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rp, rq = m[p, :].copy(), m[q, :].copy()
                m[p, :], m[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = m[:, p].copy(), m[:, q].copy()
                m[:, p], m[:, q] = c * cp - s * cq, s * cp + c * cq
    w = np.sort(np.diag(m))
    return w[::2]


def canonical_block(mu):
    """The canonical Hamiltonian restricted to span{|01>, |10>}: [[-mu3, w], [w, -mu3]]."""
    w = mu[0] + mu[1]
    return np.array([[-mu[2], w], [w, -mu[2]]], dtype=float)


def block_expectation(mu, p):
    """<H> on sqrt(p)|01> + sqrt(1-p)|10>, by explicit 2x2 arithmetic."""
    v = np.array([math.sqrt(p), math.sqrt(1 - p)])
    return float(v @ canonical_block(mu) @ v)


def block_uncertainty(mu, p):
    v = np.array([math.sqrt(p), math.sqrt(1 - p)])
    b = canonical_block(mu)
    e = v @ b @ v
    e2 = v @ b @ b @ v
    return math.sqrt(max(e2 - e * e, 0.0))


def block_amplitudes(mu, p, t):
    """Amplitudes on (|01>, |10>) at time t (hbar = 1), from the 2x2 closed form.

    exp(-i t [[-m3, w], [w, -m3]]) = e^{i m3 t} (cos(wt) I - i sin(wt) X).
    """
    w = mu[0] + mu[1]
    ph = complex(math.cos(mu[2] * t), math.sin(mu[2] * t))
    c, s = math.cos(w * t), math.sin(w * t)
    a, b = math.sqrt(p), math.sqrt(1 - p)
    return ph * complex(c * a, -s * b), ph * complex(c * b, -s * a)


def lambda_closed_form(mu, p, t):
    """Schmidt weight on |01>: p + (1-2p) sin^2((mu1+mu2) t)."""
    return p + (1 - 2 * p) * math.sin((mu[0] + mu[1]) * t) ** 2


def binary_entropy(x):
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def gamma_closed_form(mu, p, t):
    """d/dt of the two-qubit entropy in ebits along the canonical trajectory."""
    w = mu[0] + mu[1]
    lam = lambda_closed_form(mu, p, t)
    dlam = (1 - 2 * p) * w * math.sin(2 * w * t)
    return -dlam * math.log2(lam / (1 - lam))
