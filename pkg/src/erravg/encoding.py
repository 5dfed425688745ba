"""Redundant encodings that average N noisy copies of a network.

Two encoder constructions:

* ``dft``: matrix-level reference using the unitary DFT;
* ``tree``: recursive 50:50 beam-splitter fanout (N a power of two), the
  construction used for circuit-level experiments.

For both, conjugating the interleaved copies by the encoder leaves exactly
the arithmetic mean (1/N) sum_k U_k on the kept (copy-0) block; the encoder
phase pattern cancels because only |column 0|^2 = 1/N enters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from erravg.circuit import Circuit, Element, FixedBeamSplitter, PhaseShifter
from erravg.linalg import ComplexMatrix, as_complex_matrix, dft_matrix


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class EncodingScheme:
    """Redundancy factor, encoder construction, and averaging strategy.

    strategy 'whole' clones the full circuit N times inside one
    encoder/decoder pair; 'each' wraps every phase shifter in its own
    fanout gadget.
    """

    redundancy: int
    encoder: str = "tree"
    strategy: str = "whole"

    def __post_init__(self):
        if self.redundancy < 1:
            raise ValueError("redundancy must be >= 1")
        if self.encoder not in ("tree", "dft"):
            raise ValueError(f"unknown encoder {self.encoder!r}")
        if self.strategy not in ("whole", "each"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.encoder == "tree" and not _is_power_of_two(self.redundancy):
            raise ValueError("tree encoder requires redundancy to be a power of two")


@dataclass(frozen=True)
class EncodedCircuit:
    """A redundantly encoded circuit plus its post-selection bookkeeping.

    ``scheme`` and ``base`` are construction metadata; circuits loaded from a
    netlist carry only the flat circuit and the kept/error mode split.
    """

    circuit: Circuit
    kept_modes: tuple[int, ...]
    error_modes: tuple[int, ...]
    scheme: EncodingScheme | None = None
    base: Circuit | None = None

    def to_dict(self) -> dict:
        from erravg.circuit import circuit_to_dict

        data = circuit_to_dict(self.circuit)
        data["kept_modes"] = list(self.kept_modes)
        return data


def encoded_from_dict(data: dict) -> EncodedCircuit:
    """Rebuild an encoded circuit from a netlist with a kept_modes entry."""
    from erravg.circuit import circuit_from_dict

    circuit = circuit_from_dict(data)
    kept = tuple(data["kept_modes"])
    error = tuple(i for i in range(circuit.mode_count) if i not in set(kept))
    return EncodedCircuit(circuit, kept, error)


def fanout_tree_elements(modes: list[int]) -> list[FixedBeamSplitter]:
    """Beam-splitter sequence fanning modes[0] equally over all listed modes.

    Recursive: split between the two halves first, then fan out each half.
    len(modes) must be a power of two.
    """
    n = len(modes)
    if not _is_power_of_two(n):
        raise ValueError("fanout tree requires a power-of-two mode count")
    if n == 1:
        return []
    half = n // 2
    root = FixedBeamSplitter((modes[0], modes[half]))
    return [root] + fanout_tree_elements(modes[:half]) + fanout_tree_elements(modes[half:])


def fanout_tree(n: int) -> ComplexMatrix:
    """Matrix of the recursive H-tree on n = 2^k modes.

    Every entry of column 0 has magnitude 1/sqrt(n).
    """
    from erravg.circuit import compile_circuit

    elements = fanout_tree_elements(list(range(n)))
    return compile_circuit(Circuit(n, tuple(elements)), np.zeros(0))


def effective_matrix(u_list) -> ComplexMatrix:
    """Arithmetic mean (1/N) sum_k U_k of same-shaped blocks.

    The mean of unitaries is in general not unitary; its departure from
    unitarity carries the post-selection success probability.
    """
    mats = [as_complex_matrix(u) for u in u_list]
    if not mats:
        raise ValueError("effective_matrix requires at least one block")
    dim = mats[0].shape[0]
    for u in mats:
        if u.shape[0] != dim:
            raise ValueError("all blocks must have the same dimension")
    return sum(mats) / len(mats)


def _encoder_matrix(n: int, encoder: str) -> ComplexMatrix:
    if encoder == "dft":
        return dft_matrix(n)
    if encoder == "tree":
        return fanout_tree(n)
    raise ValueError(f"unknown encoder {encoder!r}")


def encode_matrix(u_list, encoder: str = "tree") -> ComplexMatrix:
    """Full (N*m) matrix of the encoded network for given copy matrices.

    Layout: (original mode j, copy k) -> index j*N + k; kept modes are the
    k = 0 slots.  Returns E^dag . D . E with E = I_m (x) F and D the
    copy-interleaved block matrix.
    """
    mats = [as_complex_matrix(u) for u in u_list]
    if not mats:
        raise ValueError("encode_matrix requires at least one copy")
    n = len(mats)
    m = mats[0].shape[0]
    for u in mats:
        if u.shape[0] != m:
            raise ValueError("all copies must have the same dimension")
    f = _encoder_matrix(n, encoder)
    e = np.kron(np.eye(m), f)
    d = np.zeros((n * m, n * m), dtype=np.complex128)
    for k, u in enumerate(mats):
        d[k :: n, k :: n] = u
    return e.conj().T @ d @ e


def _clone_element(el: Element, offset_map) -> Element:
    if isinstance(el, PhaseShifter):
        return PhaseShifter(offset_map(el.mode), el.theta, el.variance)
    i, j = el.modes
    return FixedBeamSplitter((offset_map(i), offset_map(j)))


def encode_average_whole(circuit: Circuit, scheme: EncodingScheme) -> EncodedCircuit:
    """Encoder fanout, N independently noisy clones of the full circuit,
    inverse encoder.

    Mode layout (j, copy k) -> j*N + k; kept modes are {j*N}.  Clones carry
    their own phase shifters so each draws fresh noise.
    """
    if scheme.strategy != "whole":
        raise ValueError("scheme strategy must be 'whole'")
    if scheme.encoder != "tree":
        raise ValueError("circuit-level encoding uses the tree encoder")
    n = scheme.redundancy
    m = circuit.mode_count
    elements: list[Element] = []
    encoder: list[FixedBeamSplitter] = []
    for j in range(m):
        encoder.extend(fanout_tree_elements([j * n + k for k in range(n)]))
    elements.extend(encoder)
    for k in range(n):
        elements.extend(_clone_element(el, lambda i, k=k: i * n + k) for el in circuit.elements)
    elements.extend(reversed(encoder))
    kept = tuple(j * n for j in range(m))
    error = tuple(i for i in range(m * n) if i % n != 0)
    return EncodedCircuit(Circuit(m * n, tuple(elements)), kept, error, scheme, circuit)


def encode_average_each(circuit: Circuit, scheme: EncodingScheme) -> EncodedCircuit:
    """Wrap every phase shifter in its own fanout/N-copies/inverse gadget.

    Original modes stay at 0..m-1 (all kept); each gadget gets N-1 fresh
    ancilla modes appended after them.
    """
    if scheme.strategy != "each":
        raise ValueError("scheme strategy must be 'each'")
    if scheme.encoder != "tree":
        raise ValueError("circuit-level encoding uses the tree encoder")
    n = scheme.redundancy
    m = circuit.mode_count
    elements: list[Element] = []
    next_ancilla = m
    for el in circuit.elements:
        if isinstance(el, FixedBeamSplitter):
            elements.append(el)
            continue
        gadget_modes = [el.mode] + list(range(next_ancilla, next_ancilla + n - 1))
        next_ancilla += n - 1
        fan = fanout_tree_elements(gadget_modes)
        elements.extend(fan)
        elements.extend(PhaseShifter(g, el.theta, el.variance) for g in gadget_modes)
        elements.extend(reversed(fan))
    kept = tuple(range(m))
    error = tuple(range(m, next_ancilla))
    return EncodedCircuit(Circuit(next_ancilla, tuple(elements)), kept, error, scheme, circuit)


def encode_circuit(circuit: Circuit, scheme: EncodingScheme) -> EncodedCircuit:
    """Dispatch on the scheme's averaging strategy."""
    if scheme.strategy == "whole":
        return encode_average_whole(circuit, scheme)
    return encode_average_each(circuit, scheme)
