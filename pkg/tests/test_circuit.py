import json

import numpy as np
import pytest

from erravg.circuit import (
    Circuit,
    FixedBeamSplitter,
    PhaseShifter,
    circuit_from_dict,
    circuit_to_dict,
    compile_circuit,
    load_circuit,
    mean_matrix,
    mz_circuit,
    mz_tunable_bs,
    sample_realization,
    save_circuit,
)
from erravg.linalg import is_unitary
from erravg.montecarlo import trial_rng


def mz_block(theta):
    return 0.5 * np.array(
        [
            [np.exp(1j * theta) + 1, np.exp(1j * theta) - 1],
            [np.exp(1j * theta) - 1, np.exp(1j * theta) + 1],
        ]
    )


def test_mz_zero_phase_is_identity():
    u = compile_circuit(mz_circuit(0.0), [0.0])
    assert np.allclose(u, np.eye(2), atol=1e-15)


def test_mz_pi_is_signed_swap():
    u = compile_circuit(mz_circuit(np.pi), [0.0])
    # independent 2x2 product: H . diag(e^{i pi}, 1) . H
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    expected = h @ np.diag([np.exp(1j * np.pi), 1.0]) @ h
    assert np.allclose(u, expected, atol=1e-15)
    assert np.allclose(u, [[0, -1], [-1, 0]], atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 2, 2.2])
def test_mz_block_structure(theta):
    u = compile_circuit(mz_circuit(theta), [0.0])
    assert np.allclose(u, mz_block(theta), atol=1e-14)


def test_mz_stay_probability_with_noise():
    u = compile_circuit(mz_circuit(0.0), [0.1])
    assert abs(u[0, 0]) ** 2 == pytest.approx(np.cos(0.05) ** 2, abs=1e-14)


def test_mz_rejects_same_mode():
    with pytest.raises(ValueError):
        mz_tunable_bs(1, 1, 0.0)


def test_empty_circuit_compiles_to_identity():
    u = compile_circuit(Circuit(3, ()), [])
    assert np.array_equal(u, np.eye(3))


def test_double_beam_splitter_is_identity():
    bs = FixedBeamSplitter((0, 1))
    u = compile_circuit(Circuit(2, (bs, bs)), [])
    assert np.allclose(u, np.eye(2), atol=1e-15)


def test_compile_rejects_wrong_delta_count():
    with pytest.raises(ValueError):
        compile_circuit(mz_circuit(0.0), [0.1, 0.2])


def test_compile_is_unitary_for_sampled_noise():
    circuit = Circuit(
        3,
        tuple(mz_tunable_bs(0, 1, 0.4, 0.3) + mz_tunable_bs(1, 2, 1.1, 0.2)),
    )
    for seed in range(20):
        deltas = sample_realization(circuit, trial_rng(7, seed))
        assert is_unitary(compile_circuit(circuit, deltas), tol=1e-10)


def test_sample_realization_empty_and_zero_variance():
    no_ps = Circuit(2, (FixedBeamSplitter((0, 1)),))
    assert sample_realization(no_ps, trial_rng(0, 0)).shape == (0,)
    frozen = Circuit(1, (PhaseShifter(0, 0.5, 0.0),))
    assert sample_realization(frozen, trial_rng(0, 0)) == pytest.approx([0.0])


def test_sample_realization_mean_within_standard_error():
    v = 0.1
    circuit = Circuit(1, (PhaseShifter(0, 0.0, v),))
    rng = trial_rng(123, 0)
    draws = np.array([sample_realization(circuit, rng)[0] for _ in range(100000)])
    assert abs(draws.mean()) < 3.0 * np.sqrt(v / len(draws))
    assert draws.var() == pytest.approx(v, rel=0.05)


def test_mean_matrix_zero_variance_equals_compile():
    circuit = Circuit(2, tuple(mz_tunable_bs(0, 1, 0.7, 0.0)))
    assert np.allclose(mean_matrix(circuit), compile_circuit(circuit, [0.0]), atol=1e-15)


def test_mean_matrix_single_phase_value():
    circuit = Circuit(1, (PhaseShifter(0, 0.0, 0.1),))
    assert mean_matrix(circuit)[0, 0] == pytest.approx(np.exp(-0.05))
    assert mean_matrix(circuit)[0, 0].real == pytest.approx(0.951229, abs=1e-6)


def test_mean_matrix_mz_has_averaged_block_structure():
    # replacing e^{i theta} by its mean c reproduces the MZ block in c
    theta, v = 0.4, 0.1
    mm = mean_matrix(mz_circuit(theta, v))
    c = np.exp(1j * theta) * np.exp(-v / 2.0)
    assert mm[0, 0] == pytest.approx((c + 1.0) / 2.0)
    assert mm[1, 1] == pytest.approx((c + 1.0) / 2.0)
    assert mm[0, 1] == pytest.approx((c - 1.0) / 2.0)
    assert mm[1, 0] == pytest.approx((c - 1.0) / 2.0)


def test_mean_matrix_matches_empirical_mean():
    # entrywise agreement within 4 standard errors over 1e5 realizations
    circuit = mz_circuit(0.4, 0.15)
    trials = 100000
    acc = np.zeros((2, 2), dtype=np.complex128)
    acc2 = np.zeros((2, 2))
    rng = trial_rng(99, 0)
    for _ in range(trials):
        u = compile_circuit(circuit, sample_realization(circuit, rng))
        acc += u
        acc2 += np.abs(u) ** 2
    empirical = acc / trials
    expected = mean_matrix(circuit)
    stderr = np.sqrt(np.maximum(acc2 / trials - np.abs(empirical) ** 2, 0.0) / trials)
    assert np.all(np.abs(empirical - expected) <= 4.0 * stderr + 1e-12)


def test_validation_of_mode_indices_and_variance():
    with pytest.raises(ValueError):
        Circuit(2, (PhaseShifter(2, 0.0, 0.0),))
    with pytest.raises(ValueError):
        PhaseShifter(0, 0.0, -0.1)
    with pytest.raises(ValueError):
        FixedBeamSplitter((1, 1))


def test_netlist_round_trip(tmp_path):
    circuit = Circuit(
        3,
        tuple(mz_tunable_bs(0, 1, 0.3, 0.1) + mz_tunable_bs(1, 2, -0.2, 0.05)),
    )
    data = circuit_to_dict(circuit)
    assert data["mode_count"] == 3
    assert data["elements"][0] == {"kind": "bs", "modes": [0, 1]}
    assert circuit_from_dict(data) == circuit

    path = tmp_path / "net.json"
    save_circuit(circuit, path)
    assert load_circuit(path) == circuit
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    assert raw["elements"][1]["kind"] == "ps"


def test_netlist_rejects_unknown_kind():
    with pytest.raises(ValueError):
        circuit_from_dict({"mode_count": 1, "elements": [{"kind": "xyz", "modes": [0]}]})
