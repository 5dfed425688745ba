"""Deterministic noise-ensemble averaging of exact Fock observables.

Every trial owns a counter-based random substream derived from
(master_seed, trial_index) via Philox, so results are reproducible
bit-for-bit and independent of execution order.  Per realization the engine
evolves only the input-occupied columns of the network matrix (exact for up
to two photons) and evaluates observables on the post-selection-supported
outcomes; no detection sampling ever happens, so the only Monte Carlo
variance comes from the noise ensemble itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from erravg.circuit import Circuit, PhaseShifter, compile_circuit
from erravg.encoding import EncodedCircuit, effective_matrix
from erravg.fock import enumerate_fock_states, output_distribution, postselect, validate_fock_state

INV_SQRT2 = 1.0 / math.sqrt(2.0)
SQRT2 = math.sqrt(2.0)

_MASK64 = (1 << 64) - 1


def trial_rng(master_seed: int, trial_index: int) -> Generator:
    """Independent substream for one trial: Philox keyed on (seed, index)."""
    key = np.array([master_seed & _MASK64, trial_index & _MASK64], dtype=np.uint64)
    return Generator(Philox(key=key))


class _TrialStreams:
    """Fast per-trial substreams, bit-identical to :func:`trial_rng`."""

    def __init__(self, master_seed: int):
        self._bg = Philox(key=np.array([master_seed & _MASK64, 0], dtype=np.uint64))
        self._gen = Generator(self._bg)
        self._template = self._bg.state

    def standard_normal(self, trial_index: int, count: int) -> np.ndarray:
        st = self._template
        st["state"]["counter"][:] = 0
        st["state"]["key"][1] = trial_index & _MASK64
        st["buffer_pos"] = 4
        st["has_uint32"] = 0
        st["uinteger"] = 0
        self._bg.state = st
        return self._gen.standard_normal(count)


@dataclass
class RunningMoments:
    """Merge-stable streaming mean/variance accumulator."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add_batch(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        batch = RunningMoments(
            count=values.size,
            mean=float(values.mean()) if values.size else 0.0,
            m2=float(((values - values.mean()) ** 2).sum()) if values.size else 0.0,
        )
        self.merge(batch)

    def merge(self, other: "RunningMoments") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.mean += delta * other.count / total
        self.count = total

    @property
    def variance(self) -> float:
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> float:
        if self.count == 0:
            return 0.0
        return math.sqrt(max(self.variance, 0.0) / self.count)


@dataclass
class PairedMoments:
    """Joint accumulator for ratio estimates mean(x)/mean(y) with a
    delta-method standard error."""

    count: int = 0
    mean_x: float = 0.0
    mean_y: float = 0.0
    m2x: float = 0.0
    m2y: float = 0.0
    cxy: float = 0.0

    def add_batch(self, x: np.ndarray, y: np.ndarray) -> None:
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.size == 0:
            return
        mx, my = float(x.mean()), float(y.mean())
        batch = PairedMoments(
            count=x.size,
            mean_x=mx,
            mean_y=my,
            m2x=float(((x - mx) ** 2).sum()),
            m2y=float(((y - my) ** 2).sum()),
            cxy=float(((x - mx) * (y - my)).sum()),
        )
        self.merge(batch)

    def merge(self, other: "PairedMoments") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            for name in ("count", "mean_x", "mean_y", "m2x", "m2y", "cxy"):
                setattr(self, name, getattr(other, name))
            return
        total = self.count + other.count
        dx = other.mean_x - self.mean_x
        dy = other.mean_y - self.mean_y
        w = self.count * other.count / total
        self.m2x += other.m2x + dx * dx * w
        self.m2y += other.m2y + dy * dy * w
        self.cxy += other.cxy + dx * dy * w
        self.mean_x += dx * other.count / total
        self.mean_y += dy * other.count / total
        self.count = total

    def ratio(self) -> tuple[float, float]:
        """(mean_x/mean_y, delta-method stderr of the ratio)."""
        if self.count == 0 or self.mean_y == 0.0:
            return math.nan, math.nan
        r = self.mean_x / self.mean_y
        if self.count < 2:
            return r, 0.0
        n = self.count
        var_x = self.m2x / (n - 1)
        var_y = self.m2y / (n - 1)
        cov = self.cxy / (n - 1)
        var_r = (var_x - 2.0 * r * cov + r * r * var_y) / (self.mean_y**2)
        return r, math.sqrt(max(var_r, 0.0) / n)


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean, standard error, and trial count for one observable."""

    mean: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class MCConfig:
    """One Monte Carlo run: circuit, input state, observables, trials, seed.

    ``input_state`` is given over the base (pre-encoding) modes; for an
    encoded circuit the photons enter the kept modes.  ``target_output``
    defaults to the input state, matching identity-targeting experiments.
    Observables: 'p_success', 'correct', 'correct_post', 'coincidence',
    'coincidence_post', or 'n:<base mode>'.
    """

    circuit: Circuit | EncodedCircuit
    input_state: tuple[int, ...]
    observables: tuple[str, ...]
    trials: int
    master_seed: int
    target_output: tuple[int, ...] | None = None
    chunk_size: int = 20000

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        base_modes = len(self.kept_modes())
        occ = validate_fock_state(self.input_state, base_modes)
        if sum(occ) > 4:
            raise ValueError("photon number cap is 4")
        object.__setattr__(self, "input_state", occ)
        if self.target_output is not None:
            target = validate_fock_state(self.target_output, base_modes)
            if sum(target) != sum(occ):
                raise ValueError("target must conserve photon number")
            object.__setattr__(self, "target_output", target)
        for obs in self.observables:
            if obs.startswith("n:"):
                mode = int(obs[2:])
                if not 0 <= mode < base_modes:
                    raise ValueError(f"observable mode {mode} out of range")
            elif obs not in ("p_success", "correct", "correct_post", "coincidence", "coincidence_post"):
                raise ValueError(f"unknown observable {obs!r}")

    def flat_circuit(self) -> Circuit:
        if isinstance(self.circuit, EncodedCircuit):
            return self.circuit.circuit
        return self.circuit

    def kept_modes(self) -> tuple[int, ...]:
        if isinstance(self.circuit, EncodedCircuit):
            return self.circuit.kept_modes
        return tuple(range(self.circuit.mode_count))

    def target(self) -> tuple[int, ...]:
        return self.target_output if self.target_output is not None else self.input_state


def _coincidence_pair(config: MCConfig) -> tuple[int, int]:
    occupied = [i for i, n in enumerate(config.input_state) if n > 0]
    if len(occupied) != 2:
        raise ValueError("coincidence observable needs photons in exactly two modes")
    return occupied[0], occupied[1]


def _element_program(circuit: Circuit) -> list[tuple]:
    """Elements flattened to (is_phase, indices...) tuples for the hot loop."""
    program = []
    for el in circuit.elements:
        if isinstance(el, PhaseShifter):
            program.append((True, el.mode, el.theta))
        else:
            program.append((False, el.modes[0], el.modes[1]))
    return program


def _evolve_columns(
    program: list[tuple], mode_count: int, columns: list[int], phases: np.ndarray
) -> np.ndarray:
    """Batched evolution of selected input columns.

    Args:
        program: flattened element list.
        mode_count: total modes of the flat circuit.
        columns: input mode indices whose matrix columns are needed.
        phases: (batch, shifters) array of complex phase factors.

    Returns:
        (batch, mode_count, len(columns)) amplitudes.
    """
    batch = phases.shape[0]
    v = np.zeros((batch, mode_count, len(columns)), dtype=np.complex128)
    for pos, col in enumerate(columns):
        v[:, col, pos] = 1.0
    p = 0
    for entry in program:
        if entry[0]:
            _, mode, _theta = entry
            v[:, mode, :] *= phases[:, p, np.newaxis]
            p += 1
        else:
            _, i, j = entry
            vi = v[:, i, :].copy()
            vj = v[:, j, :]
            v[:, i, :] = (vi + vj) * INV_SQRT2
            v[:, j, :] = (vi - vj) * INV_SQRT2
    return v


def _kept_outcome_amplitudes(
    v: np.ndarray, kept: tuple[int, ...], input_occ: tuple[int, ...], outcomes: list[tuple[int, ...]]
) -> np.ndarray:
    """Amplitudes of every kept-supported outcome, per trial.

    ``input_occ`` is over base modes; outcomes are occupation vectors over
    the kept modes.  Handles one photon and the three two-photon patterns.
    """
    photons = sum(input_occ)
    batch = v.shape[0]
    amps = np.empty((batch, len(outcomes)), dtype=np.complex128)
    if photons == 0:
        amps[:] = 1.0
        return amps
    if photons == 1:
        col = v[:, :, 0]
        for idx, occ in enumerate(outcomes):
            mode = kept[occ.index(1)]
            amps[:, idx] = col[:, mode]
        return amps
    occupied = [i for i, n in enumerate(input_occ) if n > 0]
    if len(occupied) == 1:
        col = v[:, :, 0]
        for idx, occ in enumerate(outcomes):
            modes = [kept[i] for i, n in enumerate(occ) for _ in range(n)]
            a, b = modes
            if a == b:
                amps[:, idx] = col[:, a] * col[:, a]
            else:
                amps[:, idx] = SQRT2 * col[:, a] * col[:, b]
        return amps
    c0, c1 = v[:, :, 0], v[:, :, 1]
    for idx, occ in enumerate(outcomes):
        modes = [kept[i] for i, n in enumerate(occ) for _ in range(n)]
        a, b = modes
        if a == b:
            amps[:, idx] = SQRT2 * c0[:, a] * c1[:, a]
        else:
            amps[:, idx] = c0[:, a] * c1[:, b] + c0[:, b] * c1[:, a]
    return amps


def _trial_values(config: MCConfig, probs: np.ndarray, outcomes) -> dict[str, np.ndarray]:
    """Per-trial primitive observables from kept-outcome probabilities."""
    values: dict[str, np.ndarray] = {}
    values["p_success"] = probs.sum(axis=1)
    target_kept = tuple(config.target())
    if target_kept in outcomes:
        values["correct"] = probs[:, outcomes.index(target_kept)]
    else:
        values["correct"] = np.zeros(probs.shape[0])
    needed = set(config.observables)
    if "coincidence" in needed or "coincidence_post" in needed:
        a, b = _coincidence_pair(config)
        weights = np.array([occ[a] * occ[b] for occ in outcomes], dtype=np.float64)
        values["coincidence"] = probs @ weights
    for obs in needed:
        if obs.startswith("n:"):
            mode = int(obs[2:])
            weights = np.array([occ[mode] for occ in outcomes], dtype=np.float64)
            values[obs] = probs @ weights
    return values


def _accumulate(config: MCConfig, values: dict[str, np.ndarray], scalars, pairs) -> None:
    for obs in config.observables:
        if obs in ("correct_post", "coincidence_post"):
            numerator = values["correct" if obs == "correct_post" else "coincidence"]
            pairs[obs].add_batch(numerator, values["p_success"])
        else:
            scalars[obs].add_batch(values[obs])


def _finalize(config: MCConfig, scalars, pairs) -> dict[str, MCEstimate]:
    out: dict[str, MCEstimate] = {}
    for obs in config.observables:
        if obs in pairs:
            ratio, stderr = pairs[obs].ratio()
            out[obs] = MCEstimate(ratio, stderr, pairs[obs].count)
        else:
            acc = scalars[obs]
            out[obs] = MCEstimate(acc.mean, acc.stderr, acc.count)
    return out


def _prob_chunks_batched(config: MCConfig, outcomes):
    """Yield per-chunk (trials x outcomes) probability arrays, fast path."""
    flat = config.flat_circuit()
    kept = config.kept_modes()
    program = _element_program(flat)
    thetas = np.array([el[2] for el in program if el[0]], dtype=np.float64)
    sigmas = flat.phase_sigmas()
    columns: list[int] = []
    for base_mode, n in enumerate(config.input_state):
        if n > 0:
            columns.append(kept[base_mode])
    streams = _TrialStreams(config.master_seed)

    start = 0
    while start < config.trials:
        stop = min(start + config.chunk_size, config.trials)
        deltas = np.empty((stop - start, len(sigmas)))
        for t in range(start, stop):
            deltas[t - start] = streams.standard_normal(t, len(sigmas))
        deltas *= sigmas
        phases = np.exp(1j * (thetas + deltas))
        v = _evolve_columns(program, flat.mode_count, columns, phases)
        amps = _kept_outcome_amplitudes(v, kept, config.input_state, outcomes)
        yield np.abs(amps) ** 2
        start = stop


def _prob_chunks_general(config: MCConfig, outcomes):
    """Reference path: full compile and full output distribution per trial.

    Exact for any photon number within the Fock cap; used for more than two
    photons and as an independent cross-check of the batched path.
    """
    flat = config.flat_circuit()
    kept = config.kept_modes()
    sigmas = flat.phase_sigmas()
    full_input = [0] * flat.mode_count
    for base_mode, n in enumerate(config.input_state):
        full_input[kept[base_mode]] = n

    start = 0
    while start < config.trials:
        stop = min(start + config.chunk_size, config.trials)
        probs = np.zeros((stop - start, len(outcomes)))
        for t in range(start, stop):
            deltas = trial_rng(config.master_seed, t).standard_normal(len(sigmas)) * sigmas
            u = compile_circuit(flat, deltas)
            dist = output_distribution(u, tuple(full_input))
            result = postselect(dist, kept)
            if result.conditional is not None:
                for idx, occ in enumerate(outcomes):
                    probs[t - start, idx] = result.conditional.entries.get(occ, 0.0) * result.p_success
        yield probs
        start = stop


def _prob_chunks(config: MCConfig, outcomes, force_general: bool = False):
    if force_general or sum(config.input_state) > 2:
        return _prob_chunks_general(config, outcomes)
    return _prob_chunks_batched(config, outcomes)


def run(config: MCConfig, force_general: bool = False) -> dict[str, MCEstimate]:
    """Run the Monte Carlo ensemble and return one estimate per observable.

    Re-running an identical config is bit-identical.
    """
    outcomes = enumerate_fock_states(len(config.kept_modes()), sum(config.input_state))
    scalars = {obs: RunningMoments() for obs in config.observables if not obs.endswith("_post")}
    pairs = {obs: PairedMoments() for obs in config.observables if obs.endswith("_post")}
    for probs in _prob_chunks(config, outcomes, force_general):
        values = _trial_values(config, probs, outcomes)
        _accumulate(config, values, scalars, pairs)
    return _finalize(config, scalars, pairs)


@dataclass(frozen=True)
class OutcomeEstimates:
    """Per-outcome probability estimates plus the post-selection summaries."""

    outcomes: tuple[tuple[int, ...], ...]
    estimates: dict[tuple[int, ...], MCEstimate]
    p_success: MCEstimate
    correct_post: MCEstimate


def run_outcomes(config: MCConfig, force_general: bool = False) -> OutcomeEstimates:
    """Estimate every kept-supported outcome probability in one ensemble.

    Outcome probabilities here are unconditional (joint with success); the
    ``correct_post`` summary is the ratio estimate correct/success.
    """
    outcomes = enumerate_fock_states(len(config.kept_modes()), sum(config.input_state))
    per_outcome = [RunningMoments() for _ in outcomes]
    success = RunningMoments()
    post = PairedMoments()
    target = tuple(config.target())
    target_idx = outcomes.index(target) if target in outcomes else None
    for probs in _prob_chunks(config, outcomes, force_general):
        for idx in range(len(outcomes)):
            per_outcome[idx].add_batch(probs[:, idx])
        p_success = probs.sum(axis=1)
        success.add_batch(p_success)
        if target_idx is not None:
            post.add_batch(probs[:, target_idx], p_success)
    estimates = {
        occ: MCEstimate(acc.mean, acc.stderr, acc.count)
        for occ, acc in zip(outcomes, per_outcome)
    }
    ratio, ratio_err = post.ratio()
    return OutcomeEstimates(
        outcomes=tuple(outcomes),
        estimates=estimates,
        p_success=MCEstimate(success.mean, success.stderr, success.count),
        correct_post=MCEstimate(ratio, ratio_err, post.count),
    )


def variance_scan(
    target: Circuit,
    v: float | None,
    n_list,
    seeds: int,
    master_seed: int,
) -> dict[int, dict[str, np.ndarray]]:
    """Empirical per-entry variance of the averaged matrix M_N across seeds.

    For each N, every seed samples N independent noisy compilations of the
    target and averages them; the returned tables hold the variance of the
    real and imaginary part of each entry, which scale as 1/N.

    Args:
        v: optional override applied to every phase shifter's variance.
    """
    circuit = target
    if v is not None:
        elements = tuple(
            PhaseShifter(el.mode, el.theta, v) if isinstance(el, PhaseShifter) else el
            for el in target.elements
        )
        circuit = Circuit(target.mode_count, elements)
    sigmas = circuit.phase_sigmas()
    result: dict[int, dict[str, np.ndarray]] = {}
    for n in n_list:
        samples = np.empty((seeds, circuit.mode_count, circuit.mode_count), dtype=np.complex128)
        for s in range(seeds):
            rng = trial_rng(master_seed + n, s)
            copies = [
                compile_circuit(circuit, rng.standard_normal(len(sigmas)) * sigmas)
                for _ in range(n)
            ]
            samples[s] = effective_matrix(copies)
        result[n] = {
            "var_re": samples.real.var(axis=0, ddof=1),
            "var_im": samples.imag.var(axis=0, ddof=1),
        }
    return result


def estimates_csv_rows(results: dict[str, MCEstimate], seed: int) -> list[list]:
    """Rows (observable, mean, stderr, trials, seed) in observable order."""
    return [[obs, est.mean, est.stderr, est.trials, seed] for obs, est in results.items()]


def estimates_to_json(results: dict[str, MCEstimate], seed: int) -> str:
    payload = {
        "seed": seed,
        "estimates": {
            obs: {"mean": est.mean, "stderr": est.stderr, "trials": est.trials}
            for obs, est in results.items()
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True)
