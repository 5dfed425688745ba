import json
import math

import numpy as np
import pytest

from erravg.analytics import sp_correct_post_exact, sp_success_exact
from erravg.circuit import Circuit, PhaseShifter, mz_circuit
from erravg.encoding import EncodingScheme, encode_circuit
from erravg.montecarlo import (
    MCConfig,
    MCEstimate,
    PairedMoments,
    RunningMoments,
    _TrialStreams,
    estimates_csv_rows,
    estimates_to_json,
    run,
    run_outcomes,
    trial_rng,
    variance_scan,
)


def _encoded(theta, v, n, strategy="whole"):
    return encode_circuit(mz_circuit(theta, v), EncodingScheme(n, "tree", strategy))


def test_trial_streams_match_fresh_generators():
    streams = _TrialStreams(987654321)
    for t in (0, 1, 17, 54321):
        fast = streams.standard_normal(t, 6)
        slow = trial_rng(987654321, t).standard_normal(6)
        assert np.array_equal(fast, slow)


def test_trial_rng_streams_are_distinct():
    a = trial_rng(1, 0).standard_normal(4)
    b = trial_rng(1, 1).standard_normal(4)
    c = trial_rng(2, 0).standard_normal(4)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_running_moments_matches_numpy():
    rng = np.random.default_rng(0)
    values = rng.standard_normal(1000)
    acc = RunningMoments()
    acc.add_batch(values[:400])
    acc.add_batch(values[400:])
    assert acc.mean == pytest.approx(values.mean(), abs=1e-12)
    assert acc.variance == pytest.approx(values.var(ddof=1), abs=1e-12)
    assert acc.stderr == pytest.approx(values.std(ddof=1) / math.sqrt(1000), abs=1e-12)


def test_moment_merge_is_order_insensitive():
    rng = np.random.default_rng(1)
    values = rng.standard_normal(3000)
    chunks = np.array_split(values, 7)
    forward = RunningMoments()
    for c in chunks:
        forward.add_batch(c)
    backward = RunningMoments()
    for c in reversed(chunks):
        backward.add_batch(c)
    assert forward.mean == pytest.approx(backward.mean, abs=1e-12)
    assert forward.m2 == pytest.approx(backward.m2, abs=1e-9)


def test_paired_moments_ratio_matches_direct_computation():
    rng = np.random.default_rng(2)
    x = 0.9 + 0.01 * rng.standard_normal(5000)
    y = 0.95 + 0.01 * rng.standard_normal(5000)
    acc = PairedMoments()
    acc.add_batch(x[:1000], y[:1000])
    acc.add_batch(x[1000:], y[1000:])
    ratio, stderr = acc.ratio()
    assert ratio == pytest.approx(x.mean() / y.mean(), abs=1e-12)
    r = x.mean() / y.mean()
    var_direct = (
        x.var(ddof=1) - 2 * r * np.cov(x, y, ddof=1)[0, 1] + r * r * y.var(ddof=1)
    ) / y.mean() ** 2
    assert stderr == pytest.approx(math.sqrt(var_direct / 5000), rel=1e-9)


def test_zero_variance_circuit_gives_exact_mean_and_zero_stderr():
    cfg = MCConfig(
        circuit=_encoded(0.0, 0.0, 4),
        input_state=(1, 0),
        observables=("p_success", "correct", "n:0"),
        trials=500,
        master_seed=3,
    )
    res = run(cfg)
    for obs in ("p_success", "correct", "n:0"):
        assert res[obs].mean == pytest.approx(1.0, abs=1e-12)
        assert res[obs].stderr == pytest.approx(0.0, abs=1e-12)


def test_single_photon_success_matches_exact_law():
    v, n = 0.1, 8
    cfg = MCConfig(
        circuit=_encoded(0.0, v, n),
        input_state=(1, 0),
        observables=("p_success", "correct_post"),
        trials=100000,
        master_seed=4,
    )
    res = run(cfg)
    assert abs(res["p_success"].mean - sp_success_exact(v, n)) < 3 * res["p_success"].stderr
    assert (
        abs(res["correct_post"].mean - sp_correct_post_exact(v, n))
        < 3 * res["correct_post"].stderr
    )


def test_rerun_is_bit_identical():
    cfg = dict(
        circuit=_encoded(0.3, 0.2, 2),
        input_state=(1, 1),
        observables=("p_success", "correct", "coincidence_post"),
        trials=4000,
        master_seed=5,
    )
    first = run(MCConfig(**cfg))
    second = run(MCConfig(**cfg))
    assert first == second


def test_chunk_iteration_order_does_not_change_counts():
    cfg = MCConfig(
        circuit=_encoded(0.0, 0.1, 2),
        input_state=(1, 0),
        observables=("p_success",),
        trials=5001,
        master_seed=6,
        chunk_size=100,
    )
    res = run(cfg)
    assert res["p_success"].trials == 5001


@pytest.mark.parametrize("input_state", [(1, 0), (1, 1), (2, 0)])
@pytest.mark.parametrize("strategy", ["whole", "each"])
def test_batched_engine_matches_general_path(input_state, strategy):
    cfg = MCConfig(
        circuit=_encoded(0.4, 0.3, 2, strategy),
        input_state=input_state,
        observables=("p_success", "correct", "correct_post"),
        trials=200,
        master_seed=7,
    )
    fast = run(cfg)
    slow = run(cfg, force_general=True)
    for obs in cfg.observables:
        assert fast[obs].mean == pytest.approx(slow[obs].mean, abs=1e-12)
        assert fast[obs].stderr == pytest.approx(slow[obs].stderr, abs=1e-12)


def test_run_outcomes_consistent_with_run():
    cfg = MCConfig(
        circuit=_encoded(0.0, 0.2, 2),
        input_state=(1, 1),
        observables=("p_success", "correct", "correct_post"),
        trials=1000,
        master_seed=8,
    )
    table = run_outcomes(cfg)
    res = run(cfg)
    assert table.p_success.mean == pytest.approx(res["p_success"].mean, abs=1e-15)
    assert table.correct_post.mean == pytest.approx(res["correct_post"].mean, abs=1e-15)
    assert table.estimates[(1, 1)].mean == pytest.approx(res["correct"].mean, abs=1e-15)
    total = sum(est.mean for est in table.estimates.values())
    assert total == pytest.approx(table.p_success.mean, abs=1e-12)


def test_three_photon_general_path_runs():
    cfg = MCConfig(
        circuit=mz_circuit(0.0, 0.05),
        input_state=(2, 1),
        observables=("p_success", "correct"),
        trials=50,
        master_seed=9,
    )
    res = run(cfg)
    assert res["p_success"].mean == pytest.approx(1.0, abs=1e-9)
    assert 0.0 < res["correct"].mean <= 1.0


def test_config_validation():
    enc = _encoded(0.0, 0.1, 2)
    with pytest.raises(ValueError):
        MCConfig(enc, (1, 0), ("p_success",), 0, 1)
    with pytest.raises(ValueError):
        MCConfig(enc, (1, 0, 0), ("p_success",), 10, 1)
    with pytest.raises(ValueError):
        MCConfig(enc, (1, 0), ("entropy",), 10, 1)
    with pytest.raises(ValueError):
        MCConfig(enc, (1, 0), ("n:7",), 10, 1)
    with pytest.raises(ValueError):
        MCConfig(enc, (1, 0), ("p_success",), 10, 1, target_output=(1, 1))
    with pytest.raises(ValueError):
        MCConfig(enc, (5, 0), ("p_success",), 10, 1)


def test_coincidence_requires_two_occupied_modes():
    cfg = MCConfig(
        circuit=_encoded(0.0, 0.1, 2),
        input_state=(2, 0),
        observables=("coincidence",),
        trials=10,
        master_seed=1,
    )
    with pytest.raises(ValueError):
        run(cfg)


def test_variance_scan_zero_noise():
    scan = variance_scan(mz_circuit(0.0, 0.0), None, [1, 2], 50, 11)
    for n in (1, 2):
        assert np.max(scan[n]["var_re"]) == pytest.approx(0.0, abs=1e-20)
        assert np.max(scan[n]["var_im"]) == pytest.approx(0.0, abs=1e-20)


def test_variance_scan_halves_with_doubled_redundancy():
    scan = variance_scan(mz_circuit(0.0, 0.1), None, [1, 2], 500, 12)
    pooled = {
        n: float(scan[n]["var_re"].sum() + scan[n]["var_im"].sum()) for n in (1, 2)
    }
    assert 1.5 <= pooled[1] / pooled[2] <= 2.5


def test_variance_scan_single_phase_scaling():
    # 1x1 target: variance of Re M_N drops as 1/N; the N = 1 estimator is
    # heavy-tailed (chi-square-like quadratic fluctuations), hence many seeds
    target = Circuit(1, (PhaseShifter(0, 0.0, 0.1),))
    scan = variance_scan(target, None, [1, 4], 10000, 13)
    ratio = scan[1]["var_re"][0, 0] / scan[4]["var_re"][0, 0]
    assert ratio == pytest.approx(4.0, rel=0.25)


def test_variance_scan_variance_override():
    base = mz_circuit(0.0, 0.7)
    scan_a = variance_scan(base, 0.1, [2], 100, 14)
    scan_b = variance_scan(mz_circuit(0.0, 0.1), None, [2], 100, 14)
    assert np.allclose(scan_a[2]["var_re"], scan_b[2]["var_re"])


def test_estimate_export_rows_and_json():
    results = {"p_success": MCEstimate(0.5, 0.01, 100)}
    rows = estimates_csv_rows(results, 42)
    assert rows == [["p_success", 0.5, 0.01, 100, 42]]
    payload = json.loads(estimates_to_json(results, 42))
    assert payload["seed"] == 42
    assert payload["estimates"]["p_success"]["trials"] == 100
