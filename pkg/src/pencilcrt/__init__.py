"""Dual-rate sub-Nyquist super-resolution frequency estimation.

Two channels sample a multifrequency complex signal far below its Nyquist
rate. Per channel, a shifted Hankel matrix pencil recovers the aliased
frequency, amplitude and phase of every component; components are then paired
across channels by amplitude/phase and de-aliased to their true frequencies
through a Chinese-Remainder fold-index search. A compressed-sensing baseline
(row-orthonormal Gaussian sensing + OMP on the DFT grid) and a Monte Carlo
RMSE harness support method comparisons.
"""

__version__ = "0.1.0"

from .bench import (
    BenchmarkResult,
    ExperimentConfig,
    TrialRecord,
    compute_rmse,
    default_experiment,
    default_signal_spec,
    run_sweep,
    run_trial,
)
from .cs_baseline import (
    CsConfig,
    SparseRecovery,
    extract_tones,
    make_sensing_matrix,
    min_measurements,
    omp_recover,
)
from .dealias import (
    DealiasConfig,
    PairedComponent,
    ResolvedTone,
    crt_integer,
    pair_components,
    resolve_frequency,
    unambiguous_range,
)
from .errors import (
    AmbiguousFrequencyError,
    DegenerateBasisError,
    EstimationError,
    InsufficientSamplesError,
    InvalidComponentError,
    NoCandidateError,
    OrderDeficientError,
    PairingSizeError,
)
from .matrix_pencil import (
    AliasedComponent,
    HankelPencil,
    PencilConfig,
    build_pencil,
    estimate_amplitudes,
    solve_pencil,
)
from .model_order import OrderConfig, combine_order, estimate_order
from .signal_model import (
    SampledStream,
    SignalSpec,
    Tone,
    add_awgn,
    alias_of,
    synthesize,
    wrap_phase,
)

__all__ = [
    "__version__",
    "Tone",
    "SignalSpec",
    "SampledStream",
    "synthesize",
    "add_awgn",
    "alias_of",
    "wrap_phase",
    "HankelPencil",
    "PencilConfig",
    "AliasedComponent",
    "build_pencil",
    "solve_pencil",
    "estimate_amplitudes",
    "PairedComponent",
    "DealiasConfig",
    "ResolvedTone",
    "pair_components",
    "resolve_frequency",
    "crt_integer",
    "unambiguous_range",
    "OrderConfig",
    "estimate_order",
    "combine_order",
    "CsConfig",
    "SparseRecovery",
    "min_measurements",
    "make_sensing_matrix",
    "omp_recover",
    "extract_tones",
    "ExperimentConfig",
    "TrialRecord",
    "BenchmarkResult",
    "run_trial",
    "run_sweep",
    "compute_rmse",
    "default_signal_spec",
    "default_experiment",
    "EstimationError",
    "InsufficientSamplesError",
    "OrderDeficientError",
    "DegenerateBasisError",
    "PairingSizeError",
    "InvalidComponentError",
    "NoCandidateError",
    "AmbiguousFrequencyError",
]
