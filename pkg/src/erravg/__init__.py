"""Error averaging for noisy linear-optical networks.

Redundantly encode a photonic circuit N times, post-select on vacuum in the
redundant output modes, and the effective transformation becomes the
arithmetic mean of the noisy copies.  This package builds such encodings,
evolves few-photon Fock states through them exactly, and cross-checks the
Monte Carlo results against closed-form predictions.
"""

__version__ = "0.1.0"

from erravg.circuit import (
    Circuit,
    FixedBeamSplitter,
    PhaseShifter,
    compile_circuit,
    mean_matrix,
    mz_circuit,
    mz_tunable_bs,
    sample_realization,
)
from erravg.encoding import (
    EncodedCircuit,
    EncodingScheme,
    effective_matrix,
    encode_circuit,
    encode_matrix,
    fanout_tree,
)
from erravg.fock import (
    OutputDistribution,
    PostselectionResult,
    output_distribution,
    postselect,
    transition_amplitude,
)
from erravg.linalg import dft_matrix, direct_sum, is_unitary
from erravg.montecarlo import MCConfig, MCEstimate, run, trial_rng, variance_scan
from erravg.permanent import ResourceLimitError, permanent
from erravg.permanent import backend as permanent_backend

__all__ = [
    "Circuit",
    "EncodedCircuit",
    "EncodingScheme",
    "FixedBeamSplitter",
    "MCConfig",
    "MCEstimate",
    "OutputDistribution",
    "PhaseShifter",
    "PostselectionResult",
    "ResourceLimitError",
    "__version__",
    "compile_circuit",
    "dft_matrix",
    "direct_sum",
    "effective_matrix",
    "encode_circuit",
    "encode_matrix",
    "fanout_tree",
    "is_unitary",
    "mean_matrix",
    "mz_circuit",
    "mz_tunable_bs",
    "output_distribution",
    "permanent",
    "permanent_backend",
    "postselect",
    "run",
    "sample_realization",
    "transition_amplitude",
    "trial_rng",
    "variance_scan",
]
