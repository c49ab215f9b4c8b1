"""
Fixed-K random matrix laws for eigensense.

This package provides:
- Joint fluctuation densities and Wigner samplers
- DistributionTable: tabulated PDF/CDF with quantile inversion
- Law builders for the MED and CND statistics under S0 and S1
- An on-disk table cache
"""

from .joint import (
    FluctuationVector,
    S1FluctuationPair,
    log_normalizing_constant,
    normalizing_constant,
    density_array,
    joint_density,
    wigner_matrices,
    sample_wigner_batch,
    sample_wigner,
    monte_carlo_mass,
)
from .tables import (
    DistributionTable,
    TableMeta,
    quantile,
    CDF_TOL,
)
from .cache import TableCache, CACHE_FORMAT_VERSION
from .laws import (
    TableSettings,
    configure,
    configure_cache,
    current_settings,
    clear_memory,
    gaussian_law,
    marginal,
    cnd_s0_law,
    cnd_s0_joint_extremes,
    s1_med_law,
    s1_cnd_law,
)


__all__ = [
    # Fluctuation laws
    'FluctuationVector',
    'S1FluctuationPair',
    'log_normalizing_constant',
    'normalizing_constant',
    'density_array',
    'joint_density',

    # Samplers
    'wigner_matrices',
    'sample_wigner_batch',
    'sample_wigner',
    'monte_carlo_mass',

    # Tables
    'DistributionTable',
    'TableMeta',
    'quantile',
    'CDF_TOL',
    'TableCache',
    'CACHE_FORMAT_VERSION',

    # Laws
    'TableSettings',
    'configure',
    'configure_cache',
    'current_settings',
    'clear_memory',
    'gaussian_law',
    'marginal',
    'cnd_s0_law',
    'cnd_s0_joint_extremes',
    's1_med_law',
    's1_cnd_law',
]


__version__ = '0.1.0'
