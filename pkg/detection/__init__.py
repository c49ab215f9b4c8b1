"""
Detection module for eigensense.

This module provides:
- MED and CND test statistics, thresholds and decisions
- Theoretical and empirical false-alarm and detection probabilities
- The large-(K, N) Tracy-Widom comparison baseline
"""

from .detectors import (
    Decision,
    med_statistic,
    cnd_statistic,
    statistic,
    batch_statistics,
    regulated_statistic,
    s0_law,
    threshold_for_pfa,
    decide,
)
from .evaluation import (
    RatePoint,
    EmpiricalRate,
    S1LawParams,
    theoretical_pfa,
    s1_params,
    s1_law,
    theoretical_pd,
    s1_fluctuations,
    block_fluctuations,
    rate_from_counts,
    empirical_rate,
    ks_distance,
    signed_error,
)
from .baseline import (
    TracyWidomTable,
    load_tracy_widom,
    large_k_baseline_threshold,
    large_k_cdf,
    large_k_pd,
    deterministic_cnd_ratio,
    formula,
    DEFAULT_TABLE_PATH,
)


__all__ = [
    # Detectors
    'Decision',
    'med_statistic',
    'cnd_statistic',
    'statistic',
    'batch_statistics',
    'regulated_statistic',
    's0_law',
    'threshold_for_pfa',
    'decide',

    # Evaluation
    'RatePoint',
    'EmpiricalRate',
    'S1LawParams',
    'theoretical_pfa',
    's1_params',
    's1_law',
    'theoretical_pd',
    's1_fluctuations',
    'block_fluctuations',
    'rate_from_counts',
    'empirical_rate',
    'ks_distance',
    'signed_error',

    # Large-(K, N) baseline
    'TracyWidomTable',
    'load_tracy_widom',
    'large_k_baseline_threshold',
    'large_k_cdf',
    'large_k_pd',
    'deterministic_cnd_ratio',
    'formula',
    'DEFAULT_TABLE_PATH',
]


__version__ = '0.1.0'
