"""
Experiment harness for eigensense.

This module provides:
- ExperimentSpec: pydantic experiment configuration with YAML round trip
- The Monte Carlo runner (per-run streams, joblib worker pool)
- The cdf, threshold, detection and sweep experiments
- CSV and JSON result serializers
"""

from .config import (
    ExperimentSpec,
    DEFAULT_PFA_GRID,
    build_spec,
    load_spec,
    load_spec_data,
    dump_spec,
    save_spec,
    spec_to_dict,
    apply_overrides,
)
from .runner import simulate_eigenvalues, simulate_chunk, chunk_bounds
from .experiments import (
    ExperimentResult,
    run_cdf_experiment,
    run_threshold_experiment,
    run_detection_experiment,
    run_sweep_experiment,
    run_experiment,
    prebuild_tables,
    CDF_COLUMNS,
    THRESHOLD_COLUMNS,
    DETECTION_COLUMNS,
)
from .emit import (
    ResultSerializer,
    CSVResultSerializer,
    JSONResultSerializer,
    SERIALIZERS,
    serialize,
    emit,
    sidecar_path,
)


__all__ = [
    # Configuration
    'ExperimentSpec',
    'DEFAULT_PFA_GRID',
    'build_spec',
    'load_spec',
    'load_spec_data',
    'dump_spec',
    'save_spec',
    'spec_to_dict',
    'apply_overrides',

    # Runner
    'simulate_eigenvalues',
    'simulate_chunk',
    'chunk_bounds',

    # Experiments
    'ExperimentResult',
    'run_cdf_experiment',
    'run_threshold_experiment',
    'run_detection_experiment',
    'run_sweep_experiment',
    'run_experiment',
    'prebuild_tables',
    'CDF_COLUMNS',
    'THRESHOLD_COLUMNS',
    'DETECTION_COLUMNS',

    # Output
    'ResultSerializer',
    'CSVResultSerializer',
    'JSONResultSerializer',
    'SERIALIZERS',
    'serialize',
    'emit',
    'sidecar_path',
]


__version__ = '0.1.0'
