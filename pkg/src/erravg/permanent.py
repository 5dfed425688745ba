"""Matrix permanent via Ryser's formula.

Two interchangeable kernels: a compiled Cython loop with Gray-code column
updates (preferred) and a vectorized numpy evaluation of the same formula.
The compiled kernel is selected at import time when the extension built.
"""

from __future__ import annotations

import os

import numpy as np

try:
    if os.environ.get("ERRAVG_PURE_PYTHON"):
        raise ImportError("compiled kernel disabled by ERRAVG_PURE_PYTHON")
    from erravg._ryser import ryser_permanent as _ryser_compiled
except ImportError:  # extension not built (or disabled); numpy fallback below
    _ryser_compiled = None

DEFAULT_CAP = 16


class ResourceLimitError(RuntimeError):
    """Raised when a computation exceeds its configured size cap."""


def ryser_permanent_numpy(a: np.ndarray) -> complex:
    """Ryser permanent evaluated with vectorized subset sums, O(2^n * n^2)."""
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1.0 + 0.0j
    subsets = np.arange(1, 1 << n, dtype=np.uint64)
    membership = (subsets[:, None] >> np.arange(n, dtype=np.uint64)) & 1
    row_sums = membership.astype(np.complex128) @ a.T
    products = np.prod(row_sums, axis=1)
    popcounts = membership.sum(axis=1)
    signs = np.where((n - popcounts) % 2, -1.0, 1.0)
    return complex(signs @ products)


def permanent(m, cap: int = DEFAULT_CAP) -> complex:
    """Permanent of a square complex matrix.

    Args:
        m: square array-like.
        cap: largest allowed dimension; larger inputs raise
            :class:`ResourceLimitError` instead of silently running for hours.
    """
    a = np.ascontiguousarray(m, dtype=np.complex128)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("matrix must be square")
    if n > cap:
        raise ResourceLimitError(f"permanent of {n}x{n} exceeds cap {cap}")
    if n == 0:
        return 1.0 + 0.0j
    if _ryser_compiled is not None:
        return _ryser_compiled(a)
    return ryser_permanent_numpy(a)


def backend() -> str:
    """Which permanent kernel is active: 'cython' or 'numpy'."""
    return "cython" if _ryser_compiled is not None else "numpy"
