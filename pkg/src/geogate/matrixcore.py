"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The largest
operator in scope is 9x9, so everything is dense.
"""

from __future__ import annotations

import math

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

# Taylor truncation bound used by expm.
_EXPM_TOL = 1e-16
_EXPM_THETA = 0.5


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a 2-D complex array, raising on other ranks."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"trace of non-square matrix {a.shape}")
    return complex(np.trace(a))


def projector(dim: int, i: int, j: int | None = None) -> np.ndarray:
    """Matrix unit ``|i><j|`` (``|i><i|`` when ``j`` is omitted)."""
    out = np.zeros((dim, dim), dtype=complex)
    out[i, i if j is None else j] = 1.0
    return out


def pauli_vector(nx: float, ny: float, nz: float) -> np.ndarray:
    """``n . sigma`` for a real 3-vector."""
    return nx * SX + ny * SY + nz * SZ


def _taylor_degree(theta: float) -> int:
    # Smallest m with theta^(m+1)/(m+1)! * 1/(1 - theta/(m+2)) below the tolerance.
    m = 1
    term = theta
    while True:
        term *= theta / (m + 1)
        if term / (1.0 - theta / (m + 2)) < _EXPM_TOL:
            return m
        m += 1


def expm(a) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 0.5; the
    series degree is then chosen so the truncation remainder is below 1e-16
    relative to the scaled norm.
    """
    a = as_matrix(a)
    n, m = a.shape
    if n != m:
        raise ValueError(f"expm needs a square matrix, got {a.shape}")
    norm = float(np.abs(a).sum(axis=0).max()) if n else 0.0
    if norm == 0.0:
        return np.eye(n, dtype=complex)
    s = max(0, math.ceil(math.log2(norm / _EXPM_THETA)))
    scaled = a / (2.0**s)
    degree = _taylor_degree(min(norm / 2.0**s, _EXPM_THETA))
    # Horner evaluation of sum_{j<=degree} X^j / j!
    eye = np.eye(n, dtype=complex)
    result = eye.copy()
    for j in range(degree, 0, -1):
        result = eye + (scaled @ result) / j
    for _ in range(s):
        result = result @ result
    return result


def is_hermitian(a, atol: float = 1e-12) -> bool:
    a = as_matrix(a)
    return a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def is_unitary(a, atol: float = 1e-10) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])), initial=0.0) <= atol)
