"""Four-mode benchmark network and its first-order leakage coefficients.

The network is two columns of identity-targeting MZ tunable beam splitters:
column 1 couples (0,1) and (2,3), column 2 couples (1,2) and (0,3).  This
topology was validated by matching every first-order output coefficient of
the benchmark tables below; swapping the order of the column-2 pairs only
flips post-selectable signs and leaves all coefficients unchanged.

Coefficient tables: probabilities are P = 1 - c*v for the correct outcome
and P = c*v for leak outcomes, with c given below per redundancy N.  The
same values hold for whole-circuit and per-shifter averaging.  Rows absent
from a table are zero at first order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from erravg.circuit import Circuit, mz_tunable_bs
from erravg.encoding import EncodingScheme, encode_circuit
from erravg.montecarlo import MCConfig, MCEstimate, run_outcomes


def four_mode_circuit(v: float) -> Circuit:
    """Four identity-targeting MZ beam splitters on four modes."""
    if v < 0:
        raise ValueError("variance must be >= 0")
    elements = (
        mz_tunable_bs(0, 1, 0.0, v)
        + mz_tunable_bs(2, 3, 0.0, v)
        + mz_tunable_bs(1, 2, 0.0, v)
        + mz_tunable_bs(0, 3, 0.0, v)
    )
    return Circuit(4, tuple(elements))


def _frac(num: int, den: int) -> Fraction:
    return Fraction(num, den)


# First-order coefficient c per outcome and redundancy N.  The |1,0,1,0> and
# |0,1,0,1> leaks of the |1,1,0,0> input are 1/4 at N = 1: that value is
# forced by normalization (the correct row is 1 - 3v/2 and the other leaks
# total v) and continues the exact halving of the N = 2, 4 columns.
TABLE_COEFFS: dict[tuple[int, ...], dict[str, dict]] = {
    (1, 0, 0, 0): {
        "rows": {
            (1, 0, 0, 0): {1: _frac(1, 2), 2: _frac(3, 4), 4: _frac(7, 8)},
            (0, 1, 0, 0): {1: _frac(1, 4), 2: _frac(1, 8), 4: _frac(1, 16)},
            (0, 0, 1, 0): {1: 0, 2: 0, 4: 0},
            (0, 0, 0, 1): {1: _frac(1, 4), 2: _frac(1, 8), 4: _frac(1, 16)},
        },
        "post": {1: _frac(1, 2), 2: _frac(1, 4), 4: _frac(1, 8)},
    },
    (2, 0, 0, 0): {
        "rows": {
            (2, 0, 0, 0): {1: _frac(1, 1), 2: _frac(3, 2), 4: _frac(7, 4)},
            (1, 1, 0, 0): {1: _frac(1, 2), 2: _frac(1, 4), 4: _frac(1, 8)},
            (1, 0, 0, 1): {1: _frac(1, 2), 2: _frac(1, 4), 4: _frac(1, 8)},
            (0, 2, 0, 0): {1: 0, 2: 0, 4: 0},
            (0, 0, 2, 0): {1: 0, 2: 0, 4: 0},
            (0, 0, 0, 2): {1: 0, 2: 0, 4: 0},
            (1, 0, 1, 0): {1: 0, 2: 0, 4: 0},
            (0, 1, 1, 0): {1: 0, 2: 0, 4: 0},
            (0, 1, 0, 1): {1: 0, 2: 0, 4: 0},
            (0, 0, 1, 1): {1: 0, 2: 0, 4: 0},
        },
        "post": {1: _frac(1, 1), 2: _frac(1, 2), 4: _frac(1, 4)},
    },
    (1, 1, 0, 0): {
        "rows": {
            (1, 1, 0, 0): {1: _frac(3, 2), 2: _frac(7, 4), 4: _frac(15, 8)},
            (2, 0, 0, 0): {1: _frac(1, 2), 2: _frac(1, 4), 4: _frac(1, 8)},
            (0, 2, 0, 0): {1: _frac(1, 2), 2: _frac(1, 4), 4: _frac(1, 8)},
            (1, 0, 1, 0): {1: _frac(1, 4), 2: _frac(1, 8), 4: _frac(1, 16)},
            (0, 1, 0, 1): {1: _frac(1, 4), 2: _frac(1, 8), 4: _frac(1, 16)},
            (0, 0, 2, 0): {1: 0, 2: 0, 4: 0},
            (0, 0, 0, 2): {1: 0, 2: 0, 4: 0},
            (1, 0, 0, 1): {1: 0, 2: 0, 4: 0},
            (0, 1, 1, 0): {1: 0, 2: 0, 4: 0},
            (0, 0, 1, 1): {1: 0, 2: 0, 4: 0},
        },
        "post": {1: _frac(3, 2), 2: _frac(3, 4), 4: _frac(3, 8)},
    },
}

INPUT_STATES = tuple(TABLE_COEFFS)


@dataclass(frozen=True)
class SlopeEstimate:
    """Two-point slope dP/dv with its propagated standard error."""

    slope: float
    stderr: float


@dataclass(frozen=True)
class FourModeSlopes:
    """Measured first-order coefficients for one (input, N, strategy) cell."""

    input_state: tuple[int, ...]
    redundancy: int
    strategy: str
    outcomes: dict[tuple[int, ...], SlopeEstimate]
    correct_post: SlopeEstimate
    success: SlopeEstimate


def _mc_outcomes(input_state, n: int, strategy: str, v: float, trials: int, seed: int):
    circuit = four_mode_circuit(v)
    if n > 1:
        encoded = encode_circuit(circuit, EncodingScheme(n, "tree", strategy))
        target = encoded
    else:
        target = circuit
    config = MCConfig(
        circuit=target,
        input_state=tuple(input_state),
        observables=("p_success", "correct", "correct_post"),
        trials=trials,
        master_seed=seed,
    )
    return run_outcomes(config)


def _two_point(lo: MCEstimate, hi: MCEstimate, dv: float) -> SlopeEstimate:
    slope = (hi.mean - lo.mean) / dv
    stderr = (lo.stderr**2 + hi.stderr**2) ** 0.5 / dv
    return SlopeEstimate(slope, stderr)


def measure_slopes(
    input_state,
    n: int,
    strategy: str,
    trials: int,
    seed: int,
    v_pair: tuple[float, float] = (0.004, 0.008),
) -> FourModeSlopes:
    """Estimate every first-order output coefficient by finite differences.

    Runs the Monte Carlo at the two variances and differences per-outcome
    probabilities, the post-selected correct probability, and the success
    probability.
    """
    v_lo, v_hi = v_pair
    lo = _mc_outcomes(input_state, n, strategy, v_lo, trials, seed)
    hi = _mc_outcomes(input_state, n, strategy, v_hi, trials, seed + 1)
    dv = v_hi - v_lo
    outcomes = {
        occ: _two_point(lo.estimates[occ], hi.estimates[occ], dv) for occ in lo.estimates
    }
    return FourModeSlopes(
        input_state=tuple(input_state),
        redundancy=n,
        strategy=strategy,
        outcomes=outcomes,
        correct_post=_two_point(lo.correct_post, hi.correct_post, dv),
        success=_two_point(lo.p_success, hi.p_success, dv),
    )
