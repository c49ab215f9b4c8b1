"""
Limiting laws of the regulated test statistics, delivered as tables.

  - marginal(K, i):       law of beta_i (the S0 MED law when i = 1)
  - cnd_s0_law(K):        law of beta_1 - beta_K (the S0 CND law)
  - s1_med_law(q1):       S1 MED law, the largest-eigenvalue marginal of the leading block
  - s1_cnd_law(q1, qr):   S1 CND law, convolution of two independent block extremes

Small K is handled exactly (closed forms, then nested adaptive quadrature
of the joint density); larger K falls back to Wigner sampling. Built
tables are memoized in memory and, when a cache is configured, on disk.
"""

import logging
import math
import time
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import quad_vec
from scipy.signal import fftconvolve
from scipy.special import erf
from scipy.stats import norm

from core.errors import DistributionError
from core.streams import DEFAULT_SEED, table_stream
from core.types import ValueCase
from .cache import TableCache
from .joint import density_array, sample_wigner_batch
from .tables import DistributionTable, TableMeta

logger = logging.getLogger(__name__)


class TableSettings(BaseModel):
    grid_points: int = Field(
        default=4001,
        description="Uniform grid points per table."
    )
    truncation: float = Field(
        default=8.0,
        description="Infinite ranges are cut at +/- truncation * sqrt(K)."
    )
    quad_epsabs: float = Field(
        default=1e-8,
        description="Absolute tolerance of each adaptive inner integral."
    )
    quadrature_max_K: int = Field(
        default=3,
        description="Largest K tabulated by quadrature; larger K is sampled."
    )
    sampling_draws: int = Field(
        default=1_000_000,
        description="Wigner draws behind a sampling-based table."
    )
    sampling_chunk: int = Field(
        default=100_000,
        description="Wigner draws generated per batch."
    )
    sampling_seed: int = Field(
        default=DEFAULT_SEED,
        description="Seed for sampling-based tables, so they are reproducible."
    )

    def fingerprint(self) -> str:
        """Key suffix covering every setting that changes a table's numbers."""
        return (
            f"n{self.grid_points}_t{self.truncation:g}_e{self.quad_epsabs:g}"
            f"_q{self.quadrature_max_K}_d{self.sampling_draws}_c{self.sampling_chunk}"
            f"_s{self.sampling_seed}"
        )


_settings = TableSettings()
_cache: Optional[TableCache] = None
_memo: Dict[str, DistributionTable] = {}


def configure(settings: Optional[TableSettings] = None,
              cache: Optional[TableCache] = None) -> None:
    """Install table settings and/or a disk cache for every law builder."""
    global _settings, _cache
    if settings is not None:
        _settings = settings
        _memo.clear()
    if cache is not None:
        _cache = cache


def configure_cache(directory) -> Optional[TableCache]:
    """Attach a disk cache at directory, or detach it when directory is None."""
    global _cache
    if directory is None:
        _cache = None
        return None
    cache = TableCache(directory)
    configure(cache=cache)
    return cache


def current_settings() -> TableSettings:
    return _settings


def clear_memory() -> None:
    _memo.clear()


def _lookup(key: str, builder: Callable[[], DistributionTable]) -> DistributionTable:
    key = f"{key}_{_settings.fingerprint()}"
    table = _memo.get(key)
    if table is not None:
        # a cache attached after the table was built still gets a copy
        if _cache is not None and not _cache.exists(key):
            _cache.save(key, table)
        return table

    started = time.perf_counter()
    if _cache is not None:
        table = _cache.get_or_build(key, builder)
    else:
        table = builder()
    logger.debug(
        f"Table {key} ready in {time.perf_counter() - started:.2f}s "
        f"({table.meta.method})"
    )
    _memo[key] = table
    return table


def _half_width(K: int) -> float:
    return _settings.truncation * math.sqrt(K)


def _symmetric_grid(K: int) -> np.ndarray:
    width = _half_width(K)
    return np.linspace(-width, width, _settings.grid_points)


# -------------------------
# GAUSSIAN SPECIAL CASES
# -------------------------

def gaussian_law(variance: float, meta: TableMeta) -> DistributionTable:
    """Exact N(0, variance) table on +/- truncation standard deviations."""
    sd = math.sqrt(variance)
    width = _settings.truncation * sd * math.sqrt(2.0)
    grid = np.linspace(-width, width, _settings.grid_points)
    return DistributionTable(
        grid=grid,
        pdf=norm.pdf(grid, scale=sd),
        cdf=norm.cdf(grid, scale=sd),
        meta=meta,
    )


def _single_variance(case: ValueCase) -> float:
    return 2.0 if case is ValueCase.REAL else 1.0


# -------------------------
# NESTED QUADRATURE HELPERS
# -------------------------

def _nested_gaps(func, n_gaps: int, upper: float, prefix: Tuple[float, ...] = ()):
    """Integrate func(gaps) over n_gaps independent gaps in [0, upper]."""
    if n_gaps == 0:
        return func(prefix)
    inner = lambda s: _nested_gaps(func, n_gaps - 1, upper, prefix + (s,))
    value, _ = quad_vec(inner, 0.0, upper, epsabs=_settings.quad_epsabs,
                        epsrel=0.0, norm="max")
    return value


def _nested_unit_ordered(func, depth: int, upper: float = 1.0,
                         prefix: Tuple[float, ...] = ()):
    """Integrate func(u) over 1 >= u_1 >= u_2 >= ... >= u_depth >= 0."""
    if depth == 0:
        return func(prefix)
    inner = lambda u: _nested_unit_ordered(func, depth - 1, u, prefix + (u,))
    value, _ = quad_vec(inner, 0.0, upper, epsabs=_settings.quad_epsabs,
                        epsrel=0.0, norm="max")
    return value


def _marginal_pdf_by_quadrature(K: int, i: int, case: ValueCase,
                                grid: np.ndarray) -> np.ndarray:
    above = i - 1
    below = K - i

    def integrand(gaps: Tuple[float, ...]) -> np.ndarray:
        B = np.empty((grid.size, K))
        B[:, i - 1] = grid
        level = grid
        for offset in range(above):
            level = level + gaps[offset]
            B[:, i - 2 - offset] = level
        level = grid
        for offset in range(below):
            level = level - gaps[above + offset]
            B[:, i + offset] = level
        return density_array(B, case)

    return _nested_gaps(integrand, K - 1, _half_width(K))


# -------------------------
# MARGINALS
# -------------------------

def marginal(K: int, i: int, case: ValueCase) -> DistributionTable:
    """Law of the i-th largest fluctuation beta_i."""
    case = ValueCase.parse(case)
    if K < 1 or not 1 <= i <= K:
        raise DistributionError(f"Marginal index must satisfy 1 <= i <= K, got i={i}, K={K}")
    return _lookup(f"marginal_K{K}_i{i}_{case.value}", lambda: _build_marginal(K, i, case))


def _build_marginal(K: int, i: int, case: ValueCase) -> DistributionTable:
    if K == 1:
        meta = TableMeta(law="marginal", K=1, case=case, index=1, method="closed_form")
        return gaussian_law(_single_variance(case), meta)

    grid = _symmetric_grid(K)
    if K <= _settings.quadrature_max_K:
        pdf = _marginal_pdf_by_quadrature(K, i, case, grid)
        meta = TableMeta(law="marginal", K=K, case=case, index=i, method="quadrature")
        return DistributionTable.from_pdf(grid, pdf, meta)

    draws = _sampled_fluctuations(K, case, f"marginal_K{K}_{case.value}")[:, i - 1]
    meta = TableMeta(law="marginal", K=K, case=case, index=i, method="sampling",
                     params={"draws": int(draws.size)})
    return _empirical_table(draws, grid, meta)


def _sampled_fluctuations(K: int, case: ValueCase, key: str) -> np.ndarray:
    rng = table_stream(_settings.sampling_seed, key)
    remaining = _settings.sampling_draws
    chunks = []
    while remaining > 0:
        size = min(remaining, _settings.sampling_chunk)
        chunks.append(sample_wigner_batch(K, case, rng, size))
        remaining -= size
    return np.concatenate(chunks, axis=0)


def _empirical_table(draws: np.ndarray, grid: np.ndarray,
                     meta: TableMeta) -> DistributionTable:
    """Histogram density on cells centred at the grid points."""
    half = 0.5 * np.diff(grid)
    edges = np.concatenate([[grid[0] - half[0]], grid[:-1] + half, [grid[-1] + half[-1]]])
    counts, _ = np.histogram(np.clip(draws, edges[0], edges[-1]), bins=edges)
    pdf = counts / (draws.size * np.diff(edges))
    return DistributionTable.from_pdf(grid, pdf, meta, normalize=True)


# -------------------------
# CONDITION NUMBER UNDER S0
# -------------------------

def cnd_s0_law(K: int, case: ValueCase, method: str = "auto") -> DistributionTable:
    """
    Law of z = lim sqrt(N)(T_c - 1) = beta_1 - beta_K under S0, on x >= 0.

    method: auto, closed_form (K = 2 only), quadrature or sampling.
    """
    case = ValueCase.parse(case)
    if K < 2:
        raise DistributionError(f"The condition number needs K >= 2, got K={K}")
    if method == "auto":
        if K == 2:
            method = "closed_form"
        elif K <= _settings.quadrature_max_K:
            method = "quadrature"
        else:
            method = "sampling"
    if method == "closed_form" and K != 2:
        raise DistributionError("Closed-form condition-number law exists only for K = 2")
    if method not in ("closed_form", "quadrature", "sampling"):
        raise DistributionError(f"Unknown table method: {method!r}")

    return _lookup(f"cnd_s0_K{K}_{case.value}_{method}",
                   lambda: _build_cnd_s0(K, case, method))


def _cnd_grid(K: int) -> np.ndarray:
    return np.linspace(0.0, 1.5 * _half_width(K), _settings.grid_points)


def _build_cnd_s0(K: int, case: ValueCase, method: str) -> DistributionTable:
    grid = _cnd_grid(K)
    meta = TableMeta(law="cnd_s0", K=K, case=case, method=method)

    if method == "closed_form":
        if case is ValueCase.REAL:
            pdf = 0.25 * grid * np.exp(-grid ** 2 / 8.0)
            cdf = 1.0 - np.exp(-grid ** 2 / 8.0)
        else:
            pdf = grid ** 2 * np.exp(-grid ** 2 / 4.0) / (2.0 * math.sqrt(math.pi))
            cdf = erf(grid / 2.0) - grid * np.exp(-grid ** 2 / 4.0) / math.sqrt(math.pi)
        return DistributionTable(grid=grid, pdf=pdf, cdf=cdf, meta=meta)

    if method == "quadrature":
        pdf = _cnd_pdf_by_quadrature(K, case, grid)
        return DistributionTable.from_pdf(grid, pdf, meta)

    draws = _sampled_fluctuations(K, case, f"marginal_K{K}_{case.value}")
    spread = draws[:, 0] - draws[:, -1]
    meta = TableMeta(law="cnd_s0", K=K, case=case, method="sampling",
                     params={"draws": int(spread.size)})
    return _empirical_table(spread, grid, meta)


def _cnd_pdf_by_quadrature(K: int, case: ValueCase, grid: np.ndarray) -> np.ndarray:
    """
    f(x) = int db  x^(K-2) int_{ordered u in [0,1]} g(b + x, b + x u_1, ..., b)

    The middle coordinates are written as b + x u with 1 >= u_1 >= ... >= 0.
    """
    width = _half_width(K)
    middle = K - 2

    def over_middle(b: float) -> np.ndarray:
        def integrand(us: Tuple[float, ...]) -> np.ndarray:
            B = np.empty((grid.size, K))
            B[:, 0] = b + grid
            for offset, u in enumerate(us):
                B[:, 1 + offset] = b + grid * u
            B[:, K - 1] = b
            return density_array(B, case) * grid ** middle
        return _nested_unit_ordered(integrand, middle)

    value, _ = quad_vec(over_middle, -width, width, epsabs=_settings.quad_epsabs,
                        epsrel=0.0, norm="max")
    return value


def cnd_s0_joint_extremes(K: int, case: ValueCase,
                          points: int = 201) -> Tuple[np.ndarray, np.ndarray]:
    """
    Joint density of (beta_1, beta_K) on a square grid, for K <= quadrature_max_K.

    Returns (axis, density) where density[a, b] is the value at
    (beta_1 = axis[a], beta_K = axis[b]); zero off the ordered region.
    """
    case = ValueCase.parse(case)
    if not 2 <= K <= _settings.quadrature_max_K:
        raise DistributionError(
            f"Joint extremes are tabulated for 2 <= K <= {_settings.quadrature_max_K}, got {K}"
        )
    axis = np.linspace(-_half_width(K), _half_width(K), points)
    top, bottom = np.meshgrid(axis, axis, indexing="ij")
    top = top.ravel()
    bottom = bottom.ravel()
    spread = np.clip(top - bottom, 0.0, None)
    middle = K - 2

    def integrand(us: Tuple[float, ...]) -> np.ndarray:
        B = np.empty((top.size, K))
        B[:, 0] = top
        for offset, u in enumerate(us):
            B[:, 1 + offset] = bottom + spread * u
        B[:, K - 1] = bottom
        return density_array(B, case) * spread ** middle

    density = _nested_unit_ordered(integrand, middle)
    density = np.where(top >= bottom, density, 0.0)
    return axis, density.reshape(points, points)


# -------------------------
# SCENARIO S1
# -------------------------

def s1_med_law(q1: int, case: ValueCase) -> DistributionTable:
    """Law of sqrt(N)(alpha_m T_m - 1) under S1: the largest-eigenvalue marginal of size q1."""
    case = ValueCase.parse(case)
    if q1 < 1:
        raise DistributionError(f"Multiplicity q1 must be >= 1, got {q1}")
    return marginal(q1, 1, case).relabel(law="s1_med", params={"q1": q1})


def s1_cnd_law(q1: int, qr: int, case: ValueCase,
               leading: str = "general") -> DistributionTable:
    """
    Law of sqrt(N)(alpha_c T_c - 1) under S1.

    The statistic behaves like gamma_1 - gamma_K with gamma_1 and gamma_K
    asymptotically independent, so its density is the convolution of the
    leading block's largest-eigenvalue law with the reflected law of the
    trailing block's smallest eigenvalue. ``leading="printed"`` uses the
    size-one leading law whatever q1 is; ``"general"`` uses size q1.
    """
    case = ValueCase.parse(case)
    if q1 < 1 or qr < 1:
        raise DistributionError(f"Multiplicities must be >= 1, got q1={q1}, qr={qr}")
    if leading not in ("general", "printed"):
        raise DistributionError(f"leading must be 'general' or 'printed', got {leading!r}")
    lead = q1 if leading == "general" else 1
    return _lookup(f"s1_cnd_q{q1}_r{qr}_{case.value}_{leading}",
                   lambda: _build_s1_cnd(q1, lead, qr, case, leading))


def _build_s1_cnd(q1: int, lead: int, qr: int, case: ValueCase,
                  leading: str) -> DistributionTable:
    params = {"q1": q1, "qr": qr, "leading": leading}
    if lead == 1 and qr == 1:
        meta = TableMeta(law="s1_cnd", K=q1 + qr, case=case, method="gaussian",
                         params=params)
        return gaussian_law(2.0 * _single_variance(case), meta)

    top = marginal(lead, 1, case)
    flipped_bottom = marginal(qr, qr, case).reflected()

    width = max(abs(top.grid[0]), abs(top.grid[-1]),
                abs(flipped_bottom.grid[0]), abs(flipped_bottom.grid[-1]))
    step = min(top.step, flipped_bottom.step)
    count = int(math.ceil(2.0 * width / step)) + 1
    common = np.linspace(-width, width, count)
    h = common[1] - common[0]

    density = fftconvolve(top.pdf_at(common), flipped_bottom.pdf_at(common)) * h
    support = -2.0 * width + h * np.arange(density.size)

    grid = np.linspace(-2.0 * width, 2.0 * width, _settings.grid_points)
    pdf = np.clip(np.interp(grid, support, density), 0.0, None)
    meta = TableMeta(law="s1_cnd", K=q1 + qr, case=case, method="convolution",
                     params=params)
    return DistributionTable.from_pdf(grid, pdf, meta, normalize=True)
