"""
Core module for eigensense.

This module provides the fundamental building blocks:
- Types: value case, scenario, detector and hypothesis tags
- Signal model: received-sample generation under S0 and S1
- Eigen engine: covariance matrices, ordered eigenvalues, multiplicities
- Streams: per-run random generators
- Errors: Custom exceptions
"""

from .types import ValueCase, Scenario, DetectorKind, Hypothesis
from .streams import (
    run_stream,
    table_stream,
    PHASE_S0,
    PHASE_S1,
    PHASE_CHANNEL,
    DEFAULT_SEED,
)
from .signal_model import (
    ScenarioConfig,
    SampleMatrix,
    generate_noise,
    generate_received,
    generate,
    compute_snr,
    compute_snr_db,
    to_db,
    from_db,
    scale_channel_to_snr,
    default_channel,
    draw_channel,
)
from .eigen_engine import (
    CovarianceMatrix,
    EigenSpectrum,
    MultiplicityPartition,
    is_hermitian,
    sample_covariance,
    batch_sample_covariance,
    population_covariance,
    eigenvalues,
    batch_eigenvalues,
    multiplicity_partition,
    DEFAULT_REL_TOL,
)
from .errors import (
    EigenSenseError,
    ConfigError,
    SignalModelError,
    EigenError,
    DistributionError,
    TableCacheError,
    DetectionError,
    BaselineError,
    ExperimentError,
)


__all__ = [
    # Types
    'ValueCase',
    'Scenario',
    'DetectorKind',
    'Hypothesis',

    # Streams
    'run_stream',
    'table_stream',
    'PHASE_S0',
    'PHASE_S1',
    'PHASE_CHANNEL',
    'DEFAULT_SEED',

    # Signal model
    'ScenarioConfig',
    'SampleMatrix',
    'generate_noise',
    'generate_received',
    'generate',
    'compute_snr',
    'compute_snr_db',
    'to_db',
    'from_db',
    'scale_channel_to_snr',
    'default_channel',
    'draw_channel',

    # Eigen engine
    'CovarianceMatrix',
    'EigenSpectrum',
    'MultiplicityPartition',
    'is_hermitian',
    'sample_covariance',
    'batch_sample_covariance',
    'population_covariance',
    'eigenvalues',
    'batch_eigenvalues',
    'multiplicity_partition',
    'DEFAULT_REL_TOL',

    # Errors
    'EigenSenseError',
    'ConfigError',
    'SignalModelError',
    'EigenError',
    'DistributionError',
    'TableCacheError',
    'DetectionError',
    'BaselineError',
    'ExperimentError',
]


# Version info
__version__ = '0.1.0'
