"""Noisy photonic circuits built from fixed 50:50 beam splitters and phase
shifters, and their compilation to network matrices.

Conventions (fixed so that the Mach-Zehnder block reproduces the standard
tunable beam-splitter coefficients):

* beam splitter on (i, j): H = (1/sqrt2) [[1, 1], [1, -1]] acting on rows i, j;
* phase shifter on mode i: multiplies row i by exp(i(theta + delta));
* a circuit compiles to the ordered product of its element matrices, first
  element applied first (output = U @ input).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from erravg.linalg import ComplexMatrix

INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class PhaseShifter:
    """Tunable phase exp(i(theta + delta)) with delta ~ Normal(0, variance)."""

    mode: int
    theta: float
    variance: float = 0.0

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("phase variance must be >= 0")
        if not (math.isfinite(self.theta) and math.isfinite(self.variance)):
            raise ValueError("phase parameters must be finite")


@dataclass(frozen=True)
class FixedBeamSplitter:
    """Noiseless 50:50 beam splitter on an ordered mode pair."""

    modes: tuple[int, int]

    def __post_init__(self):
        i, j = self.modes
        if i == j:
            raise ValueError("beam splitter needs two distinct modes")


Element = PhaseShifter | FixedBeamSplitter


@dataclass(frozen=True)
class Circuit:
    """Ordered list of optical elements on a fixed number of modes."""

    mode_count: int
    elements: tuple[Element, ...]

    def __post_init__(self):
        if self.mode_count < 1:
            raise ValueError("mode_count must be positive")
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            modes = (el.mode,) if isinstance(el, PhaseShifter) else el.modes
            for m in modes:
                if not 0 <= m < self.mode_count:
                    raise ValueError(f"element mode {m} out of range for {self.mode_count} modes")

    def phase_shifters(self) -> list[PhaseShifter]:
        return [el for el in self.elements if isinstance(el, PhaseShifter)]

    def phase_sigmas(self) -> np.ndarray:
        """Per-shifter noise standard deviations, in element order."""
        return np.sqrt([ps.variance for ps in self.phase_shifters()])


def mz_tunable_bs(i: int, j: int, theta: float, variance: float = 0.0) -> list[Element]:
    """Mach-Zehnder tunable beam splitter: BS(i,j), phase on arm i, BS(i,j).

    With delta = 0 the compiled 2x2 block on (i, j) is
    (1/2) [[e^it + 1, e^it - 1], [e^it - 1, e^it + 1]].
    """
    if i == j:
        raise ValueError("MZ interferometer needs two distinct modes")
    return [
        FixedBeamSplitter((i, j)),
        PhaseShifter(i, theta, variance),
        FixedBeamSplitter((i, j)),
    ]


def mz_circuit(theta: float, variance: float = 0.0) -> Circuit:
    """Two-mode circuit containing a single MZ tunable beam splitter."""
    return Circuit(2, tuple(mz_tunable_bs(0, 1, theta, variance)))


def sample_realization(circuit: Circuit, rng: np.random.Generator) -> np.ndarray:
    """Draw one delta per phase shifter, independently Normal(0, variance).

    Deltas are not wrapped: exp(i*delta) is 2pi-periodic so the compiled
    matrix is unaffected.
    """
    sigmas = circuit.phase_sigmas()
    return rng.standard_normal(len(sigmas)) * sigmas


def _apply_elements(circuit: Circuit, phases: np.ndarray) -> ComplexMatrix:
    """Product of element matrices with given per-shifter phase factors."""
    u = np.eye(circuit.mode_count, dtype=np.complex128)
    p = 0
    for el in circuit.elements:
        if isinstance(el, PhaseShifter):
            u[el.mode, :] *= phases[p]
            p += 1
        else:
            i, j = el.modes
            ri = u[i, :].copy()
            rj = u[j, :]
            u[i, :] = (ri + rj) * INV_SQRT2
            u[j, :] = (ri - rj) * INV_SQRT2
    return u


def compile_circuit(circuit: Circuit, deltas) -> ComplexMatrix:
    """Network matrix for one noise realization.

    Args:
        circuit: the circuit to compile.
        deltas: one phase error per phase shifter, in element order.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    shifters = circuit.phase_shifters()
    if deltas.shape != (len(shifters),):
        raise ValueError(f"expected {len(shifters)} deltas, got shape {deltas.shape}")
    thetas = np.array([ps.theta for ps in shifters])
    return _apply_elements(circuit, np.exp(1j * (thetas + deltas)))


def mean_matrix(circuit: Circuit) -> ComplexMatrix:
    """Noise-averaged network matrix E[compile(circuit, .)].

    Each phase factor enters the product multilinearly, so the expectation
    replaces exp(i(theta + delta)) by its Gaussian characteristic value
    exp(i*theta) * exp(-variance/2).
    """
    shifters = circuit.phase_shifters()
    factors = np.array([np.exp(1j * ps.theta) * np.exp(-ps.variance / 2.0) for ps in shifters])
    return _apply_elements(circuit, factors)


def circuit_to_dict(circuit: Circuit) -> dict:
    """JSON-ready netlist: {mode_count, elements: [{kind, modes, theta, variance}]}."""
    elements = []
    for el in circuit.elements:
        if isinstance(el, PhaseShifter):
            elements.append(
                {"kind": "ps", "modes": [el.mode], "theta": el.theta, "variance": el.variance}
            )
        else:
            elements.append({"kind": "bs", "modes": list(el.modes)})
    return {"mode_count": circuit.mode_count, "elements": elements}


def circuit_from_dict(data: dict) -> Circuit:
    elements: list[Element] = []
    for entry in data["elements"]:
        kind = entry["kind"]
        if kind == "ps":
            (mode,) = entry["modes"]
            elements.append(PhaseShifter(mode, entry["theta"], entry.get("variance", 0.0)))
        elif kind == "bs":
            i, j = entry["modes"]
            elements.append(FixedBeamSplitter((i, j)))
        else:
            raise ValueError(f"unknown element kind {kind!r}")
    return Circuit(data["mode_count"], tuple(elements))


def save_circuit(circuit: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit_to_dict(circuit), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return circuit_from_dict(json.load(fh))
