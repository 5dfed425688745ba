"""Closed-form predictions for error-averaged networks.

Gaussian phase noise with variance v throughout.  The sp_* functions cover a
single photon in an averaged Mach-Zehnder interferometer, tp_* the two-photon
case, chain_* a single-mode chain of M phase shifters under the two averaging
strategies, and recurrence_* the doubling recurrence observed in the
four-mode study.  First/second-order expressions are fixed reference series;
exact expectation oracles are provided alongside where the series resums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ChainParams:
    """M phase shifters in series, each with variance v, averaged N times."""

    shifters: int
    variance: float
    redundancy: int

    def __post_init__(self):
        if self.shifters < 0:
            raise ValueError("shifter count must be >= 0")
        if self.variance < 0:
            raise ValueError("variance must be >= 0")
        if self.redundancy < 1:
            raise ValueError("redundancy must be >= 1")


@dataclass(frozen=True)
class RecurrenceParams:
    """First-round error coefficient a1/b1 of the doubling recurrence."""

    a1: int
    b1: int

    def __post_init__(self):
        if self.a1 < 1 or self.b1 < 1:
            raise ValueError("a1 and b1 must be positive integers")


@dataclass(frozen=True)
class GeneratorNoise:
    """Independent Gaussian parameter noise on a set of involutory generators."""

    sigmas: tuple[float, ...]
    involutory: bool = True

    def __post_init__(self):
        if any(s < 0 for s in self.sigmas):
            raise ValueError("sigmas must be >= 0")


def mean_phase_factor(v: float) -> float:
    """E[exp(i*delta)] for delta ~ Normal(0, v): the characteristic value
    exp(-v/2)."""
    if v < 0:
        raise ValueError("variance must be >= 0")
    return math.exp(-v / 2.0)


def commuting_mean_scale(noise: GeneratorNoise) -> float:
    """Amplitude scale c of the mean matrix M = c U for commuting involutory
    generator noise: c = prod_l exp(-sigma_l^2 / 2), 0 < c <= 1.
    """
    if not noise.involutory:
        raise NotImplementedError(
            "non-involutory generators give state-dependent decay; unsupported"
        )
    return math.exp(-0.5 * sum(s * s for s in noise.sigmas))


# --- single photon through an averaged MZ interferometer (theta = 0) -------


def sp_success(v: float, n: int) -> float:
    """First-order success probability 1 + v/2N - v/2."""
    return 1.0 + v / (2.0 * n) - v / 2.0


def sp_correct_nopost(v: float, n: int) -> float:
    """First-order probability of the correct output mode, no post-selection:
    1 - (2N - 1) v / 4N."""
    return 1.0 - (2.0 * n - 1.0) * v / (4.0 * n)


def sp_correct_post(v: float, n: int) -> float:
    """First-order conditional correct probability 1 - v/4N."""
    return 1.0 - v / (4.0 * n)


def sp_success_exact(v: float, n: int) -> float:
    """Exact success probability (1 + 1/N + (1 - 1/N) e^(-v)) / 2.

    From E|S|^2 with S = (1/N) sum_j exp(i delta_j): diagonal pairs give
    1/N, off-diagonal pairs give (1 - 1/N) e^(-v).
    """
    return 0.5 * (1.0 + 1.0 / n + (1.0 - 1.0 / n) * math.exp(-v))


def sp_correct_post_exact(v: float, n: int) -> float:
    """Exact conditional correct probability E<n_a> / E[P(success)].

    Numerator: E|S + 1|^2 / 4 with E[S] = e^(-v/2).
    """
    e_s2 = 1.0 / n + (1.0 - 1.0 / n) * math.exp(-v)
    numerator = (1.0 + 2.0 * math.exp(-v / 2.0) + e_s2) / 4.0
    return numerator / sp_success_exact(v, n)


# --- two photons |1,1> through an averaged MZ interferometer ----------------


def tp_expect_coinc(v: float) -> float:
    """First-order coincidence expectation <n_a n_b> = 1 - v."""
    return 1.0 - v


def tp_coincidence_post(v: float, n: int) -> float:
    """First-order post-selected coincidence reference value 1 - v/2N.

    The exact expectation ratio works out to 1 - v/N at first order (see
    tp_coincidence_post_exact), a factor-2 difference in the 1/N term that
    Monte Carlo confirms; this function keeps the reference series unchanged.
    """
    return 1.0 - v / (2.0 * n)


def tp_success(v: float, n: int) -> float:
    """First-order two-photon success reference value 1 - v + v/2N.

    The exact resummation gives 1 - v + v/N at first order (see
    tp_success_exact).
    """
    return 1.0 - v + v / (2.0 * n)


def _two_photon_moments(v: float, n: int) -> tuple[float, float]:
    """Exact (E[Re Q], E|Q|^2) for Q = S^2, S = (1/N) sum_j exp(i delta_j).

    E[Q] counts coincident index pairs: e^(-2v)/N + (1 - 1/N) e^(-v).
    E|Q|^2 sums e^(-w v/2) over all 4-index sign patterns (+,+,-,-), where
    w is the squared net coefficient total; enumerated exactly below.
    """
    a = math.exp(-v / 2.0)
    e_q = (a**4) / n + (1.0 - 1.0 / n) * a**2
    total = 0.0
    for j in range(n):
        for k in range(n):
            for l in range(n):
                for m in range(n):
                    coeff = {}
                    for idx, sign in ((j, 1), (k, 1), (l, -1), (m, -1)):
                        coeff[idx] = coeff.get(idx, 0) + sign
                    w = sum(c * c for c in coeff.values())
                    total += a**w
    return e_q, total / n**4


def tp_success_exact(v: float, n: int) -> float:
    """Exact two-photon success probability (1 + E|Q|^2) / 2."""
    _, e_q2 = _two_photon_moments(v, n)
    return 0.5 * (1.0 + e_q2)


def tp_coincidence_post_exact(v: float, n: int) -> float:
    """Exact post-selected coincidence E|1 + Q|^2/4 divided by success."""
    e_q, e_q2 = _two_photon_moments(v, n)
    numerator = (1.0 + 2.0 * e_q + e_q2) / 4.0
    return numerator / tp_success_exact(v, n)


# --- M phase shifters in series ---------------------------------------------


def chain_correct_noavg(p: ChainParams) -> float:
    """Second-order correct probability with no averaging:
    1 - Mv/4 + M^2 v^2/16."""
    mv = p.shifters * p.variance
    return 1.0 - mv / 4.0 + mv * mv / 16.0


def chain_correct_noavg_exact(p: ChainParams) -> float:
    """Exact resummation (1 + e^(-Mv/2)) / 2."""
    return 0.5 * (1.0 + math.exp(-p.shifters * p.variance / 2.0))


def chain_success_avg_whole(p: ChainParams) -> float:
    """Second-order success for whole-chain averaging:
    1 - (1 - 1/N)(Mv - M^2 v^2 / 2)."""
    mv = p.shifters * p.variance
    return 1.0 - (1.0 - 1.0 / p.redundancy) * (mv - 0.5 * mv * mv)


def chain_success_avg_whole_exact(p: ChainParams) -> float:
    """Exact success 1/N + (1 - 1/N) e^(-Mv) for whole-chain averaging."""
    n = p.redundancy
    return 1.0 / n + (1.0 - 1.0 / n) * math.exp(-p.shifters * p.variance)


def chain_correct_avg_whole(p: ChainParams) -> float:
    """Second-order conditional correct probability for whole-chain
    averaging:
    [1 - (Mv - M^2v^2/4 + (1 - 1/N)(Mv - M^2v^2/2))/4]
      / [1 - (1 - 1/N)(Mv/2 - M^2v^2/4)].
    """
    mv = p.shifters * p.variance
    frac = 1.0 - 1.0 / p.redundancy
    numerator = 1.0 - 0.25 * (mv - mv * mv / 4.0 + frac * (mv - 0.5 * mv * mv))
    denominator = 1.0 - frac * (0.5 * mv - 0.25 * mv * mv)
    return numerator / denominator


def chain_success_avg_each(p: ChainParams) -> float:
    """Second-order success for per-shifter averaging:
    (1 - (v - v^2/2)(1 - 1/N))^M."""
    v = p.variance
    per_step = 1.0 - (v - 0.5 * v * v) * (1.0 - 1.0 / p.redundancy)
    return per_step**p.shifters


def chain_success_avg_each_exact(p: ChainParams) -> float:
    """Exact success (1/N + (1 - 1/N) e^(-v))^M for per-shifter averaging."""
    n = p.redundancy
    per_step = 1.0 / n + (1.0 - 1.0 / n) * math.exp(-p.variance)
    return per_step**p.shifters


def chain_correct_avg_each(p: ChainParams) -> float:
    """Second-order conditional correct probability for per-shifter
    averaging:
    [3/4 - Mv/4 + M^2v^2/16 + Psuccess/4] / [1/2 + Psuccess/2].
    """
    mv = p.shifters * p.variance
    success = chain_success_avg_each(p)
    numerator = 0.75 - mv / 4.0 + mv * mv / 16.0 + success / 4.0
    denominator = 0.5 + success / 2.0
    return numerator / denominator


# --- applied-phase variance --------------------------------------------------


def variance_predicted(v: float, m: int, n: int = 1) -> float:
    """Linear-regime variance of the total applied phase: vM/N
    (N = 1 means no averaging)."""
    return v * m / n


def variance_max() -> float:
    """Variance of a uniform phase on (-pi, pi]: pi^2/3."""
    return math.pi**2 / 3.0


# --- doubling recurrence for repeated averaging rounds -----------------------


def recurrence_coefficients(r: RecurrenceParams, rounds: int) -> dict[str, Fraction]:
    """Exact rational first-order coefficients after n averaging rounds.

    Round 1 is the bare system (N = 1); each extra round doubles the
    averaging.  Returns the coefficient c in P = 1 - c*v (or P = c*v for
    'wrong').
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    a1, b1 = Fraction(r.a1), Fraction(r.b1)
    scale = Fraction(2) ** (rounds - 1)
    wrong = a1 / (scale * b1)
    correct = (scale * a1 + (scale - 1)) / (scale * b1)
    success = (scale - 1) * (a1 + 1) / (scale * b1)
    return {"correct": correct, "wrong": wrong, "success": success, "correct_post": wrong}


def recurrence_correct(r: RecurrenceParams, rounds: int, v: float) -> float:
    return 1.0 - float(recurrence_coefficients(r, rounds)["correct"]) * v


def recurrence_wrong(r: RecurrenceParams, rounds: int, v: float) -> float:
    return float(recurrence_coefficients(r, rounds)["wrong"]) * v


def recurrence_success(r: RecurrenceParams, rounds: int, v: float) -> float:
    return 1.0 - float(recurrence_coefficients(r, rounds)["success"]) * v


def recurrence_correct_post(r: RecurrenceParams, rounds: int, v: float) -> float:
    """Post-selected correct probability 1 - a1 v / (2^(n-1) b1); tends to 1."""
    return 1.0 - float(recurrence_coefficients(r, rounds)["correct_post"]) * v


def recurrence_asymptote_success(r: RecurrenceParams, v: float) -> float:
    """Limit of the success probability: 1 - (a1 + 1) v / b1."""
    return 1.0 - (r.a1 + 1) * v / r.b1


# --- whole-unitary averaging, k photons --------------------------------------


def multiphoton_success(photons: int, modes: int, sigma: float) -> float:
    """Success probability e^(-k n^2 sigma^2 / 2) for a k-photon state through
    an averaged n-mode unitary with per-generator noise sigma.

    Constant success requires sigma = O(1/n) in the mode count.
    """
    if photons < 0 or modes < 0:
        raise ValueError("photons and modes must be >= 0")
    return math.exp(-photons * modes**2 * sigma**2 / 2.0)
