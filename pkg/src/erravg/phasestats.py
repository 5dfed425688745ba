"""Wrapped-phase statistics for chains of noisy phase shifters.

The total applied phase of an averaged chain is defined as the argument of
its effective complex amplitude; for M shifters averaged N times the
realization is a delta array of shape (N, M) (copies x positions).
Variances are ordinary sample variances of the wrapped values, whose maximum
for a uniform phase is pi^2/3.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

SCHEMES = ("noavg", "whole", "each")


class UndefinedPhaseError(ArithmeticError):
    """The effective amplitude vanished, so its phase is undefined."""


# amplitudes below this have no numerically meaningful argument
_AMPLITUDE_FLOOR = 1e-14


def wrap(theta):
    """Wrap angles into (-pi, pi], mapping the -pi boundary to +pi."""
    theta = np.asarray(theta, dtype=np.float64)
    wrapped = np.mod(theta + np.pi, TWO_PI) - np.pi
    wrapped = np.where(wrapped == -np.pi, np.pi, wrapped)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


def _as_realization(deltas) -> np.ndarray:
    arr = np.asarray(deltas, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError("realization must be an (N, M) array of deltas")
    return arr


def total_phase(deltas, scheme: str) -> float:
    """Total applied phase of one noise realization.

    Args:
        deltas: (N, M) array, copies x positions; a 1-D array is treated as
            N = 1.
        scheme: 'noavg' (requires N = 1, sum of the deltas), 'whole'
            (argument of the mean of per-copy phase factors), or 'each'
            (argument of the product of per-position means).
    """
    arr = _as_realization(deltas)
    n, _ = arr.shape
    if scheme == "noavg":
        if n != 1:
            raise ValueError("noavg expects a single copy of deltas")
        return float(wrap(arr.sum()))
    if scheme == "whole":
        amp = np.exp(1j * arr.sum(axis=1)).mean()
    elif scheme == "each":
        amp = np.prod(np.exp(1j * arr).mean(axis=0))
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if abs(amp) < _AMPLITUDE_FLOOR:
        raise UndefinedPhaseError("effective amplitude is zero")
    return float(np.angle(amp))


def total_phases_batch(deltas: np.ndarray, scheme: str) -> np.ndarray:
    """Vectorized :func:`total_phase` over a (runs, N, M) delta array.

    The 'noavg' scheme consumes copy 0 of each run.
    """
    if deltas.ndim != 3:
        raise ValueError("expected a (runs, N, M) array")
    if scheme == "noavg":
        return wrap(deltas[:, 0, :].sum(axis=1))
    if scheme == "whole":
        amps = np.exp(1j * deltas.sum(axis=2)).mean(axis=1)
    elif scheme == "each":
        amps = np.prod(np.exp(1j * deltas).mean(axis=1), axis=1)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if np.any(np.abs(amps) < _AMPLITUDE_FLOOR):
        raise UndefinedPhaseError("effective amplitude is zero")
    return np.angle(amps)


def sample_variance(samples) -> float:
    """Ordinary sample variance (ddof = 1) of wrapped phase samples."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.size < 2:
        return 0.0
    return float(np.var(arr, ddof=1))


def histogram(samples, bin_width: float = np.pi / 50.0):
    """Histogram of wrapped samples over (-pi, pi].

    Returns (edges, counts); the bin count is rounded so bins tile the
    interval exactly.
    """
    nbins = max(1, round(TWO_PI / bin_width))
    edges = np.linspace(-np.pi, np.pi, nbins + 1)
    counts, _ = np.histogram(np.asarray(samples, dtype=np.float64), bins=edges)
    return edges, counts
