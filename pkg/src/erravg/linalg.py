"""Dense complex matrix primitives for linear-optical network calculations.

Matrices follow the scattering convention: entry (i, j) is the amplitude from
input mode j to output mode i, i.e. output operators are ``U @ input``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

DEFAULT_TOL = 1e-10

ComplexMatrix = NDArray[np.complex128]


def as_complex_matrix(m) -> ComplexMatrix:
    """Coerce to a square complex128 array with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def identity(n: int) -> ComplexMatrix:
    return np.eye(n, dtype=np.complex128)


def dft_matrix(n: int) -> ComplexMatrix:
    """Unitary DFT matrix with entries w^(r*k)/sqrt(n), w = exp(-2i*pi/n).

    Args:
        n: number of modes, n >= 1.

    Returns:
        n x n complex unitary.
    """
    if n < 1:
        raise ValueError("dft_matrix requires n >= 1")
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def unitarity_deviation(m) -> float:
    """Max-norm of U^dag U - I."""
    a = as_complex_matrix(m)
    gram = a.conj().T @ a
    return float(np.max(np.abs(gram - np.eye(a.shape[0]))))


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ||U^dag U - I||_max <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return unitarity_deviation(m) <= tol


def direct_sum(blocks) -> ComplexMatrix:
    """Block-diagonal matrix diag(B_1, ..., B_k).

    Unitary whenever every block is unitary.
    """
    mats = [as_complex_matrix(b) for b in blocks]
    if not mats:
        raise ValueError("direct_sum requires at least one block")
    dim = sum(b.shape[0] for b in mats)
    out = np.zeros((dim, dim), dtype=np.complex128)
    pos = 0
    for b in mats:
        d = b.shape[0]
        out[pos : pos + d, pos : pos + d] = b
        pos += d
    return out
