"""Acceptance gate: one test per validation criterion, at stated tolerances.

Run with ``-s`` (or read test_output.txt) to see the per-criterion pass/fail
lines.  The same checks back the ``ea validate`` command.

Criterion 3's second clause is expected to fail: its reference constant
1 - v/2N disagrees with the exact post-selected coincidence ratio, which is
1 - v/N + O(v^2) (see analytics.tp_coincidence_post_exact; the Monte Carlo
and the exact oracle agree to well under a standard error).  The test is
marked xfail(strict) so the discrepancy stays visible without masking the
rest of the suite; ``ea validate`` reports the same clause as FAIL.
"""

import pytest

from erravg import acceptance
from erravg.experiments import DEFAULT_SEED


def _run(number: int):
    result = acceptance.CRITERIA[number](DEFAULT_SEED)
    print()
    print(result.line())
    for detail in result.details:
        print("   ", detail)
    return result


def test_criterion_01_single_photon_success_asymptote():
    assert _run(1).status == acceptance.PASS


def test_criterion_02_post_selected_correctness():
    assert _run(2).status == acceptance.PASS


@pytest.mark.xfail(
    strict=True,
    reason=(
        "coincidence-after-post-selection target constant 1 - v/2N is "
        "inconsistent with the exact expectation ratio 1 - v/N; measured "
        "values sit on the exact oracle, far outside the stated tolerance"
    ),
)
def test_criterion_03_two_photon_coincidence():
    assert _run(3).status == acceptance.PASS


def test_criterion_03_hom_baseline_clause():
    # first clause of criterion 3 in isolation: exact two-photon suppression
    result = _run(3)
    assert result.details[0].startswith("ok ")


def test_criterion_04_variance_scaling():
    assert _run(4).status == acceptance.PASS


def test_criterion_05_kept_block_identity():
    assert _run(5).status == acceptance.PASS


def test_criterion_06_zero_noise_exactness():
    assert _run(6).status == acceptance.PASS


def test_criterion_07_phase_chain_variance_laws():
    assert _run(7).status == acceptance.PASS


def test_criterion_08_threshold_window():
    assert _run(8).status == acceptance.PASS


def test_criterion_09_four_mode_tables():
    assert _run(9).status == acceptance.PASS


def test_criterion_10_recurrence_consistency():
    assert _run(10).status == acceptance.PASS


def test_criterion_11_first_order_equivalence():
    assert _run(11).status == acceptance.PASS


def test_criterion_12_determinism():
    assert _run(12).status == acceptance.PASS
