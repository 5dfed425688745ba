import numpy as np
import pytest

from erravg.circuit import compile_circuit, mz_circuit
from erravg.encoding import EncodingScheme, encode_circuit
from erravg.fock import (
    coincidence_expectation,
    distribution_csv_rows,
    enumerate_fock_states,
    mode_expectation,
    output_distribution,
    postselect,
    projected_amplitudes,
    transition_amplitude,
)
from erravg.permanent import ResourceLimitError

from conftest import random_unitary

H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def test_enumeration_is_ascending_lexicographic():
    states = enumerate_fock_states(3, 2)
    assert states == [
        (0, 0, 2),
        (0, 1, 1),
        (0, 2, 0),
        (1, 0, 1),
        (1, 1, 0),
        (2, 0, 0),
    ]
    assert states == sorted(states)


def test_transition_amplitude_identity():
    assert transition_amplitude(np.eye(2), (1, 0), (1, 0)) == pytest.approx(1.0)


def test_single_photon_amplitude_is_matrix_entry(rng):
    u = random_unitary(4, rng)
    for j in range(4):
        in_state = tuple(1 if k == j else 0 for k in range(4))
        for i in range(4):
            out_state = tuple(1 if k == i else 0 for k in range(4))
            assert transition_amplitude(u, in_state, out_state) == pytest.approx(u[i, j])


def test_hong_ou_mandel_dip_is_exactly_zero():
    amp = transition_amplitude(H, (1, 1), (1, 1))
    assert amp == 0.0


def test_transition_amplitude_rejects_photon_mismatch():
    with pytest.raises(ValueError):
        transition_amplitude(np.eye(2), (1, 0), (1, 1))


def test_output_distribution_identity_point_mass():
    dist = output_distribution(np.eye(3), (0, 2, 0))
    assert dist.probability((0, 2, 0)) == pytest.approx(1.0)
    assert dist.total() == pytest.approx(1.0)


def test_output_distribution_balanced_splitter_single_photon():
    dist = output_distribution(H, (1, 0))
    assert dist.probability((1, 0)) == pytest.approx(0.5)
    assert dist.probability((0, 1)) == pytest.approx(0.5)


def test_output_distribution_hom_bunching():
    dist = output_distribution(H, (1, 1))
    assert dist.probability((2, 0)) == pytest.approx(0.5)
    assert dist.probability((0, 2)) == pytest.approx(0.5)
    assert dist.probability((1, 1)) == 0.0


def test_output_distribution_photon_cap():
    with pytest.raises(ResourceLimitError):
        output_distribution(np.eye(2), (3, 2))
    output_distribution(np.eye(2), (3, 2), cap=5)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_distributions_normalize_for_unitaries(rng, m, n):
    # exhaustive input sweep at small size: totals must hit 1 for unitaries
    u = random_unitary(m, rng)
    for in_state in enumerate_fock_states(m, n):
        dist = output_distribution(u, in_state)
        assert dist.total() == pytest.approx(1.0, abs=1e-9)


def test_single_photon_distribution_is_column_magnitude(rng):
    u = random_unitary(5, rng)
    dist = output_distribution(u, (0, 0, 1, 0, 0))
    for i in range(5):
        out = tuple(1 if k == i else 0 for k in range(5))
        assert dist.probability(out) == pytest.approx(abs(u[i, 2]) ** 2)


def test_postselect_keeping_everything_is_identity():
    u = random_unitary(3, np.random.default_rng(4))
    dist = output_distribution(u, (1, 1, 0))
    result = postselect(dist, [0, 1, 2])
    assert result.p_success == pytest.approx(1.0, abs=1e-9)
    assert result.conditional.entries == pytest.approx(dist.entries)


def test_postselect_requires_kept_modes():
    dist = output_distribution(np.eye(2), (1, 0))
    with pytest.raises(ValueError):
        postselect(dist, [])


def test_postselect_zero_success_flags_undefined():
    # photon sent entirely into a discarded mode
    dist = output_distribution(np.eye(2), (0, 1))
    result = postselect(dist, [0])
    assert result.p_success == 0.0
    assert result.conditional is None


def test_postselect_encoded_mz_fixed_realization():
    # N=2 whole encoding, deltas (0.1, -0.1): kept amplitudes follow
    # a = (S+1)/2, b = (S-1)/2 with S = cos(0.1)
    enc = encode_circuit(mz_circuit(0.0, 0.1), EncodingScheme(2, "tree", "whole"))
    u = compile_circuit(enc.circuit, [0.1, -0.1])
    dist = output_distribution(u, (1, 0, 0, 0))
    result = postselect(dist, enc.kept_modes)
    s = np.cos(0.1)
    expected = abs((s + 1.0) / 2.0) ** 2 + abs((s - 1.0) / 2.0) ** 2
    assert result.p_success == pytest.approx(expected, abs=1e-12)


def test_zero_noise_encoded_circuit_succeeds_always():
    enc = encode_circuit(mz_circuit(0.0, 0.0), EncodingScheme(4, "tree", "whole"))
    u = compile_circuit(enc.circuit, np.zeros(4))
    dist = output_distribution(u, (1, 0, 0, 0, 0, 0, 0, 0))
    result = postselect(dist, enc.kept_modes)
    assert result.p_success == pytest.approx(1.0, abs=1e-12)


def test_p_success_matches_projected_norm(rng):
    # independent computation path: squared norm of the projected state
    enc = encode_circuit(mz_circuit(0.3, 0.2), EncodingScheme(2, "tree", "whole"))
    for in_base, full_in in (((1, 0), (1, 0, 0, 0)), ((1, 1), (1, 0, 1, 0))):
        deltas = rng.standard_normal(2) * np.sqrt(0.2)
        u = compile_circuit(enc.circuit, deltas)
        dist = output_distribution(u, full_in)
        via_postselect = postselect(dist, enc.kept_modes).p_success
        amps = projected_amplitudes(u, full_in, enc.kept_modes)
        via_projection = sum(abs(a) ** 2 for a in amps.values())
        assert via_postselect == pytest.approx(via_projection, abs=1e-9)


def test_mode_expectation_point_mass():
    dist = output_distribution(np.eye(2), (1, 0))
    assert mode_expectation(dist, 0) == pytest.approx(1.0)
    assert mode_expectation(dist, 1) == pytest.approx(0.0)


def test_mode_expectation_balanced():
    dist = output_distribution(H, (1, 0))
    assert mode_expectation(dist, 0) == pytest.approx(0.5)


def test_coincidence_at_zero_noise_is_one():
    # MZ at theta=0 acts as identity: |1,1> stays put and <n_a n_b> = 1
    u = compile_circuit(mz_circuit(0.0, 0.0), [0.0])
    dist = output_distribution(u, (1, 1))
    assert coincidence_expectation(dist, 0, 1) == pytest.approx(1.0, abs=1e-12)


def test_distribution_csv_rows_order_and_content():
    dist = output_distribution(H, (1, 0))
    rows = distribution_csv_rows(dist)
    assert rows[0][:2] == [0, 1]
    assert rows[1][:2] == [1, 0]
    assert rows[0][2] == pytest.approx(0.5)
    assert len(rows) == 2
