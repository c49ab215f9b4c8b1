"""
The Monte Carlo experiments.

  cdf        simulated vs. fixed-K vs. large-(K, N) CDF of the regulated statistic
  threshold  fixed-K, large-(K, N) and simulation-calibrated thresholds under S0
  detection  detection probability at calibrated thresholds under S1
  sweep      detection probability along an SNR or N axis

Every experiment returns an ExperimentResult whose records carry only
numbers recomputable from the spec; wall time is kept on the result and
written out only on request.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from core import __version__
from core.eigen_engine import eigenvalues, population_covariance
from core.errors import ExperimentError
from core.signal_model import (
    ScenarioConfig,
    compute_snr_db,
    default_channel,
    draw_channel,
    scale_channel_to_snr,
)
from core.streams import PHASE_CHANNEL, PHASE_S0, PHASE_S1, run_stream
from core.types import Scenario, ValueCase
from detection.baseline import (
    TracyWidomTable,
    formula,
    large_k_baseline_threshold,
    large_k_cdf,
    large_k_pd,
    load_tracy_widom,
)
from detection.detectors import batch_statistics, regulated_statistic, s0_law, threshold_for_pfa
from detection.evaluation import (
    RatePoint,
    S1LawParams,
    ks_distance,
    rate_from_counts,
    s1_law,
    s1_params,
    signed_error,
    theoretical_pd,
)
from rmt.laws import cnd_s0_law, marginal, s1_cnd_law, s1_med_law
from .config import ExperimentSpec, spec_to_dict
from .runner import simulate_eigenvalues

logger = logging.getLogger(__name__)

CDF_COLUMNS = ["x", "empirical_cdf", "fixedk_cdf", "largek_cdf"]
THRESHOLD_COLUMNS = ["target_pfa", "eps_fixedk", "eps_largek", "eps_simulated"]
DETECTION_COLUMNS = ["target_pfa", "eps_sim", "pd_empirical", "pd_ci_low", "pd_ci_high",
                     "pd_fixedk", "pd_largek"]
SWEEP_RATE_COLUMNS = ["eps_fixedk", "pd_empirical", "pd_ci_low", "pd_ci_high",
                      "pd_fixedk", "pd_largek"]


@dataclass
class ExperimentResult:
    """Spec echo, one record per output row and run metadata."""

    spec: ExperimentSpec
    columns: List[str]
    records: List[Dict[str, Any]]
    metadata: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def __post_init__(self):
        for record in self.records:
            if list(record) != self.columns:
                raise ExperimentError(
                    f"Record keys {list(record)} do not match columns {self.columns}"
                )

    def column(self, name: str) -> np.ndarray:
        return np.array([record[name] for record in self.records], dtype=np.float64)

    def spec_dict(self) -> Dict[str, Any]:
        return spec_to_dict(self.spec)


# -------------------------
# SHARED SETUP
# -------------------------

def _resolve_channel(spec: ExperimentSpec,
                     snr_db: Optional[float]) -> Tuple[np.ndarray, Dict[str, Any]]:
    if spec.channel == "random":
        channel = draw_channel(spec.K, spec.t, run_stream(spec.seed, PHASE_CHANNEL, 0))
        policy = "random, drawn once and held fixed across runs"
    elif spec.channel is not None:
        channel = np.array(spec.channel, dtype=np.float64)
        policy = "fixed, from config"
    else:
        channel = default_channel(spec.K, spec.t)
        policy = "fixed, all ones"

    if snr_db is not None:
        channel = scale_channel_to_snr(channel, spec.sigma_s2, spec.sigma_u2, spec.K, snr_db)

    info = {
        "channel_policy": policy,
        "channel": channel.tolist(),
        "snr_db": compute_snr_db(channel, spec.sigma_s2, spec.sigma_u2, spec.K),
    }
    return channel, info


def _scenario(spec: ExperimentSpec, scenario: Scenario, N: Optional[int] = None,
              snr_db: Optional[float] = None) -> Tuple[ScenarioConfig, Dict[str, Any]]:
    N = spec.N if N is None else int(N)
    if scenario is Scenario.S0:
        cfg = ScenarioConfig(K=spec.K, N=N, case=spec.case, scenario=Scenario.S0,
                             sigma_u2=spec.sigma_u2, seed=spec.seed)
        return cfg, {}

    channel, info = _resolve_channel(spec, spec.snr_db if snr_db is None else snr_db)
    cfg = ScenarioConfig(K=spec.K, N=N, case=spec.case, scenario=Scenario.S1, t=spec.t,
                         sigma_s2=spec.sigma_s2, sigma_u2=spec.sigma_u2, channel=channel,
                         seed=spec.seed)
    return cfg, info


def _s1_params(spec: ExperimentSpec, cfg: ScenarioConfig) -> S1LawParams:
    pop = eigenvalues(population_covariance(cfg.channel, cfg.sigma_s2, cfg.sigma_u2))
    return s1_params(pop, cfg.sigma_u2, spec.rel_tol)


def _simulate_statistics(spec: ExperimentSpec, cfg: ScenarioConfig, phase: int,
                         show_progress: bool) -> np.ndarray:
    label = f"{cfg.scenario.value} runs (N={cfg.N})"
    values = simulate_eigenvalues(cfg, phase, spec.n_runs, workers=spec.workers,
                                  chunk_size=spec.chunk_size, label=label,
                                  show_progress=show_progress)
    return batch_statistics(spec.detector, values, cfg.sigma_u2)


def _base_metadata(spec: ExperimentSpec, tw: Optional[TracyWidomTable]) -> Dict[str, Any]:
    metadata = {
        "version": f"eigensense {__version__}",
        "experiment": spec.experiment,
        "seed": spec.seed,
        "n_runs": spec.n_runs,
        "detector": spec.detector.value,
        "case": spec.case.value,
        "K": spec.K,
        "N": spec.N,
    }
    if tw is not None:
        metadata["largek_formula"] = formula(spec.detector)
        metadata["tracy_widom_source"] = spec.tracy_widom or "bundled"
        metadata["tracy_widom_provenance"] = tw.provenance
    return metadata


def _simulated_threshold(T: np.ndarray, target_pfa: float) -> float:
    """Empirical (1 - pfa)-quantile of the S0 statistic."""
    return float(np.quantile(T, 1.0 - target_pfa))


def _finish(result: ExperimentResult, started: float) -> ExperimentResult:
    result.wall_time = time.perf_counter() - started
    logger.info(
        f"{result.spec.experiment} experiment finished: {len(result.records)} rows "
        f"in {result.wall_time:.1f}s"
    )
    return result


# -------------------------
# EXPERIMENTS
# -------------------------

def run_cdf_experiment(spec: ExperimentSpec, show_progress: bool = False) -> ExperimentResult:
    if spec.experiment != "cdf":
        raise ExperimentError(f"Expected a cdf experiment, got {spec.experiment}")
    started = time.perf_counter()
    logger.info(f"cdf experiment: {spec.detector.value}, K={spec.K}, N={spec.N}, "
                f"{spec.case.value}, {spec.scenario.value}, {spec.n_runs} runs")

    tw = load_tracy_widom(spec.tracy_widom)
    metadata = _base_metadata(spec, tw)
    metadata["scenario"] = spec.scenario.value

    if spec.scenario is Scenario.S0:
        cfg, _ = _scenario(spec, Scenario.S0)
        T = _simulate_statistics(spec, cfg, PHASE_S0, show_progress)
        alpha = 1.0
        law = s0_law(spec.detector, spec.K, spec.case)
    else:
        cfg, info = _scenario(spec, Scenario.S1)
        params = _s1_params(spec, cfg)
        T = _simulate_statistics(spec, cfg, PHASE_S1, show_progress)
        alpha = params.alpha(spec.detector)
        law = s1_law(spec.detector, params, spec.case, spec.leading)
        metadata.update(info)
        metadata["alpha"] = alpha
        metadata["q1"], metadata["qr"] = params.q1, params.qr

    x = np.sort(regulated_statistic(T, spec.N, alpha))
    n = x.size
    empirical = np.arange(1, n + 1) / n
    fixedk = law.cdf_at(x)
    largek = large_k_cdf(spec.detector, spec.K, spec.N, spec.case, x, tw)

    metadata["fixedk_law"] = law.meta.describe()
    if n >= 2:
        metadata["ks_fixedk"] = ks_distance(x, law)
        metadata["ks_largek"] = ks_distance(
            x, lambda s: large_k_cdf(spec.detector, spec.K, spec.N, spec.case, s, tw)
        )
    else:
        metadata["ks_fixedk"] = None
        metadata["ks_largek"] = None

    records = [
        {"x": float(x[i]), "empirical_cdf": float(empirical[i]),
         "fixedk_cdf": float(fixedk[i]), "largek_cdf": float(largek[i])}
        for i in range(n)
    ]
    result = ExperimentResult(spec=spec, columns=list(CDF_COLUMNS), records=records,
                              metadata=metadata)
    return _finish(result, started)


def run_threshold_experiment(spec: ExperimentSpec,
                             show_progress: bool = False) -> ExperimentResult:
    if spec.experiment != "threshold":
        raise ExperimentError(f"Expected a threshold experiment, got {spec.experiment}")
    started = time.perf_counter()
    logger.info(f"threshold experiment: {spec.detector.value}, K={spec.K}, N={spec.N}, "
                f"{spec.case.value}, {len(spec.pfa_grid)} grid points, {spec.n_runs} runs")

    tw = load_tracy_widom(spec.tracy_widom)
    cfg, _ = _scenario(spec, Scenario.S0)
    T = _simulate_statistics(spec, cfg, PHASE_S0, show_progress)

    records = []
    calibration = []
    for p in spec.pfa_grid:
        eps_fixedk = threshold_for_pfa(spec.detector, spec.K, spec.N, spec.case, p)
        eps_largek = large_k_baseline_threshold(spec.detector, spec.K, spec.N, p, tw, spec.case)
        records.append({
            "target_pfa": p,
            "eps_fixedk": eps_fixedk,
            "eps_largek": eps_largek,
            "eps_simulated": _simulated_threshold(T, p),
        })
        rate = rate_from_counts(int(np.count_nonzero(T > eps_fixedk)), T.size)
        calibration.append({
            "target_pfa": p,
            "pfa_empirical": rate.rate,
            "pfa_ci_low": rate.ci_low,
            "pfa_ci_high": rate.ci_high,
        })

    metadata = _base_metadata(spec, tw)
    metadata["fixedk_law"] = s0_law(spec.detector, spec.K, spec.case).meta.describe()
    metadata["fixedk_calibration"] = calibration
    result = ExperimentResult(spec=spec, columns=list(THRESHOLD_COLUMNS), records=records,
                              metadata=metadata)
    return _finish(result, started)


def _detection_point(spec: ExperimentSpec, T1: np.ndarray, eps: float, N: int,
                     params: S1LawParams, tw: TracyWidomTable,
                     target_pfa: float) -> Tuple[RatePoint, float]:
    rate = rate_from_counts(int(np.count_nonzero(T1 > eps)), T1.size)
    point = RatePoint(
        target_pfa=target_pfa,
        threshold=eps,
        empirical_rate=rate.rate,
        ci_low=rate.ci_low,
        ci_high=rate.ci_high,
        theoretical_rate=theoretical_pd(spec.detector, spec.K, N, spec.case, eps,
                                        params, spec.leading),
        n_runs=rate.n_runs,
    )
    pd_largek = large_k_pd(spec.detector, spec.K, N, spec.case, eps,
                           params.alpha(spec.detector), tw)
    return point, pd_largek


def run_detection_experiment(spec: ExperimentSpec,
                             show_progress: bool = False) -> ExperimentResult:
    if spec.experiment != "detection":
        raise ExperimentError(f"Expected a detection experiment, got {spec.experiment}")
    started = time.perf_counter()
    logger.info(f"detection experiment: {spec.detector.value}, K={spec.K}, N={spec.N}, "
                f"{spec.case.value}, calibration by {spec.calibration}, {spec.n_runs} runs")

    tw = load_tracy_widom(spec.tracy_widom)
    s1_cfg, info = _scenario(spec, Scenario.S1)
    params = _s1_params(spec, s1_cfg)

    if spec.calibration == "simulation":
        s0_cfg, _ = _scenario(spec, Scenario.S0)
        T0 = _simulate_statistics(spec, s0_cfg, PHASE_S0, show_progress)
        thresholds = [_simulated_threshold(T0, p) for p in spec.pfa_grid]
        eps_column = "eps_sim"
    else:
        thresholds = [threshold_for_pfa(spec.detector, spec.K, spec.N, spec.case, p)
                      for p in spec.pfa_grid]
        eps_column = "eps_fixedk"

    T1 = _simulate_statistics(spec, s1_cfg, PHASE_S1, show_progress)

    columns = [eps_column if c == "eps_sim" else c for c in DETECTION_COLUMNS]
    records = []
    errors_fixedk, errors_largek = [], []
    for p, eps in zip(spec.pfa_grid, thresholds):
        point, pd_largek = _detection_point(spec, T1, eps, spec.N, params, tw, p)
        records.append(dict(zip(columns, [
            p, eps, point.empirical_rate, point.ci_low, point.ci_high,
            point.theoretical_rate, pd_largek,
        ])))
        errors_fixedk.append(point.signed_error)
        errors_largek.append(signed_error(pd_largek, point.empirical_rate))

    metadata = _base_metadata(spec, tw)
    metadata.update(info)
    metadata["calibration"] = spec.calibration
    metadata["leading"] = spec.leading
    metadata["s1_params"] = {
        "mu1": params.mu1, "mur": params.mur, "q1": params.q1, "qr": params.qr,
        "alpha_m": params.alpha_m, "alpha_c": params.alpha_c,
    }
    metadata["fixedk_law"] = s1_law(spec.detector, params, spec.case, spec.leading).meta.describe()
    metadata["signed_error_fixedk"] = errors_fixedk
    metadata["signed_error_largek"] = errors_largek
    metadata["max_abs_error_fixedk"] = max(abs(e) for e in errors_fixedk)
    metadata["max_abs_error_largek"] = max(abs(e) for e in errors_largek)

    result = ExperimentResult(spec=spec, columns=columns, records=records, metadata=metadata)
    return _finish(result, started)


def run_sweep_experiment(spec: ExperimentSpec, show_progress: bool = False) -> ExperimentResult:
    """Detection along sweep_axis at the first grid P_fa, with fixed-K thresholds."""
    if spec.experiment != "sweep":
        raise ExperimentError(f"Expected a sweep experiment, got {spec.experiment}")
    started = time.perf_counter()
    axis = spec.sweep_axis
    target_pfa = spec.pfa_grid[0]
    logger.info(f"sweep experiment: {spec.detector.value} over {axis} "
                f"({len(spec.sweep_values)} points), P_fa={target_pfa}")

    tw = load_tracy_widom(spec.tracy_widom)
    columns = [axis] + list(SWEEP_RATE_COLUMNS)
    records = []
    points = []
    for value in spec.sweep_values:
        N = int(value) if axis == "N" else spec.N
        snr_db = float(value) if axis == "snr_db" else None
        cfg, info = _scenario(spec, Scenario.S1, N=N, snr_db=snr_db)
        params = _s1_params(spec, cfg)
        eps = threshold_for_pfa(spec.detector, spec.K, N, spec.case, target_pfa)
        T1 = _simulate_statistics(spec, cfg, PHASE_S1, show_progress)
        point, pd_largek = _detection_point(spec, T1, eps, N, params, tw, target_pfa)

        records.append(dict(zip(columns, [
            int(value) if axis == "N" else float(value), eps, point.empirical_rate,
            point.ci_low, point.ci_high, point.theoretical_rate, pd_largek,
        ])))
        points.append({axis: records[-1][axis], "snr_db": info["snr_db"],
                       "alpha": params.alpha(spec.detector)})

    metadata = _base_metadata(spec, tw)
    metadata["calibration"] = "theory"
    metadata["target_pfa"] = target_pfa
    metadata["leading"] = spec.leading
    metadata["points"] = points
    result = ExperimentResult(spec=spec, columns=columns, records=records, metadata=metadata)
    return _finish(result, started)


EXPERIMENTS = {
    "cdf": run_cdf_experiment,
    "threshold": run_threshold_experiment,
    "detection": run_detection_experiment,
    "sweep": run_sweep_experiment,
}


def run_experiment(spec: ExperimentSpec, show_progress: bool = False) -> ExperimentResult:
    return EXPERIMENTS[spec.experiment](spec, show_progress=show_progress)


# -------------------------
# TABLE PRE-BUILDING
# -------------------------

def prebuild_tables(Ks: List[int], cases: List[ValueCase],
                    leading: str = "general") -> List[str]:
    """Build (and cache, if a cache is configured) every table the experiments use."""
    built = []
    for case in cases:
        case = ValueCase.parse(case)
        for K in Ks:
            for i in range(1, K + 1):
                built.append(marginal(K, i, case).meta.describe())
            if K >= 2:
                built.append(cnd_s0_law(K, case).meta.describe())
                for q1 in range(1, K):
                    built.append(s1_cnd_law(q1, K - q1, case, leading=leading).meta.describe())
            built.append(s1_med_law(K, case).meta.describe())
            logger.info(f"Tables ready for K={K}, {case.value}")
    return built
