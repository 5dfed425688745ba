"""Exact few-photon Fock state evolution through a network matrix.

Transition amplitudes use the standard permanent formula: repeat column j of
U once per input photon in mode j and row i once per output photon in mode i,
then divide by sqrt(prod n_in! * prod n_out!).  Distributions are exact per
noise realization; Monte Carlo only ever averages over noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from erravg.linalg import as_complex_matrix
from erravg.permanent import ResourceLimitError, permanent

DEFAULT_PHOTON_CAP = 4

FockState = tuple[int, ...]


def validate_fock_state(state, mode_count: int | None = None) -> FockState:
    occ = tuple(int(x) for x in state)
    if any(x < 0 for x in occ):
        raise ValueError("occupations must be non-negative")
    if mode_count is not None and len(occ) != mode_count:
        raise ValueError(f"expected {mode_count} modes, got {len(occ)}")
    return occ


def enumerate_fock_states(mode_count: int, photons: int) -> list[FockState]:
    """All n-photon occupation vectors in ascending lexicographic order."""
    states = []
    for combo in combinations_with_replacement(range(mode_count), photons):
        occ = [0] * mode_count
        for mode in combo:
            occ[mode] += 1
        states.append(tuple(occ))
    states.reverse()
    return states


@dataclass(frozen=True)
class OutputDistribution:
    """Probabilities over n-photon occupation vectors."""

    entries: dict[FockState, float]
    total_photons: int
    mode_count: int

    def probability(self, state) -> float:
        return self.entries.get(validate_fock_state(state, self.mode_count), 0.0)

    def total(self) -> float:
        return float(sum(self.entries.values()))


@dataclass(frozen=True)
class PostselectionResult:
    """Success probability and renormalized kept-mode distribution.

    ``conditional`` is None when p_success is (numerically) zero.
    """

    p_success: float
    conditional: OutputDistribution | None


def _occupied_modes(occ: FockState) -> list[int]:
    return [i for i, n in enumerate(occ) for _ in range(n)]


def _norm_factor(in_occ: FockState, out_occ: FockState) -> float:
    prod = 1.0
    for n in in_occ:
        prod *= math.factorial(n)
    for n in out_occ:
        prod *= math.factorial(n)
    return math.sqrt(prod)


def transition_amplitude(u, in_state, out_state) -> complex:
    """Amplitude <out| U |in> for equal photon number and mode count."""
    a = as_complex_matrix(u)
    in_occ = validate_fock_state(in_state, a.shape[0])
    out_occ = validate_fock_state(out_state, a.shape[0])
    if sum(in_occ) != sum(out_occ):
        raise ValueError("photon number must be conserved")
    if sum(in_occ) == 0:
        return 1.0 + 0.0j
    cols = _occupied_modes(in_occ)
    rows = _occupied_modes(out_occ)
    sub = a[np.ix_(rows, cols)]
    return permanent(sub) / _norm_factor(in_occ, out_occ)


def output_distribution(u, in_state, cap: int = DEFAULT_PHOTON_CAP) -> OutputDistribution:
    """Exact |amplitude|^2 over every n-photon occupation vector."""
    a = as_complex_matrix(u)
    in_occ = validate_fock_state(in_state, a.shape[0])
    n = sum(in_occ)
    if n > cap:
        raise ResourceLimitError(f"{n} photons exceeds cap {cap}")
    entries = {}
    for out_occ in enumerate_fock_states(a.shape[0], n):
        amp = transition_amplitude(a, in_occ, out_occ)
        entries[out_occ] = abs(amp) ** 2
    return OutputDistribution(entries, n, a.shape[0])


def postselect(dist: OutputDistribution, kept) -> PostselectionResult:
    """Condition on zero photons outside the kept modes.

    p_success is the total probability of outcomes supported on the kept
    modes; the conditional distribution is their renormalized restriction.
    """
    kept = list(kept)
    if not kept:
        raise ValueError("kept mode list must be non-empty")
    kept_set = set(kept)
    p_success = 0.0
    restricted: dict[FockState, float] = {}
    for occ, prob in dist.entries.items():
        if any(n > 0 for i, n in enumerate(occ) if i not in kept_set):
            continue
        p_success += prob
        restricted[tuple(occ[i] for i in kept)] = prob
    if p_success <= 0.0:
        return PostselectionResult(0.0, None)
    conditional = OutputDistribution(
        {occ: p / p_success for occ, p in restricted.items()}, dist.total_photons, len(kept)
    )
    return PostselectionResult(p_success, conditional)


def projected_amplitudes(u, in_state, kept) -> dict[FockState, complex]:
    """Amplitudes of the outcomes with no photons outside the kept modes.

    Independent of :func:`postselect`: sums of |amplitude|^2 over this map
    give p_success directly as the squared norm of the projected state.
    Keys are occupation vectors over the kept modes only.
    """
    a = as_complex_matrix(u)
    in_occ = validate_fock_state(in_state, a.shape[0])
    kept = list(kept)
    n = sum(in_occ)
    cols = _occupied_modes(in_occ)
    out = {}
    for kept_occ in enumerate_fock_states(len(kept), n):
        rows = [kept[i] for i, cnt in enumerate(kept_occ) for _ in range(cnt)]
        sub = a[np.ix_(rows, cols)]
        denom = _norm_factor(in_occ, kept_occ)
        out[kept_occ] = permanent(sub) / denom
    return out


def mode_expectation(dist: OutputDistribution, mode: int) -> float:
    """Mean photon number in one mode."""
    return float(sum(occ[mode] * p for occ, p in dist.entries.items()))


def coincidence_expectation(dist: OutputDistribution, mode_a: int, mode_b: int) -> float:
    """Mean of n_a * n_b, the two-mode coincidence observable."""
    return float(sum(occ[mode_a] * occ[mode_b] * p for occ, p in dist.entries.items()))


def distribution_csv_rows(dist: OutputDistribution) -> list[list]:
    """Rows (one occupation column per mode, then probability), sorted
    in the enumeration order."""
    rows = []
    for occ in enumerate_fock_states(dist.mode_count, dist.total_photons):
        rows.append(list(occ) + [dist.entries.get(occ, 0.0)])
    return rows
