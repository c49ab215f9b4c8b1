"""
Theoretical and empirical false-alarm and detection probabilities.

Under S1 the population covariance has distinct eigenvalues
mu_1 > ... > mu_r with multiplicities q_1, ..., q_r. With
alpha_m = sigma_u2 / mu_1 and alpha_c = mu_r / mu_1,

    sqrt(N)(alpha_m T_med - 1)  ->  largest eigenvalue law of size q_1
    sqrt(N)(alpha_c T_cnd - 1)  ->  convolution of the two block extremes

and P_d = 1 - F(sqrt(N)(alpha eps - 1)).
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Union

import numpy as np
from scipy.stats import binomtest, kstest

from core.eigen_engine import (
    DEFAULT_REL_TOL,
    EigenSpectrum,
    MultiplicityPartition,
    multiplicity_partition,
)
from core.errors import DetectionError, DistributionError
from core.types import DetectorKind, ValueCase
from rmt.joint import FluctuationVector, S1FluctuationPair
from rmt.laws import s1_cnd_law, s1_med_law
from rmt.tables import DistributionTable
from .detectors import Decision, s0_law

CONFIDENCE_LEVEL = 0.95


@dataclass(frozen=True)
class RatePoint:
    """A measured rate, its Wilson interval and the matching prediction."""

    target_pfa: float
    threshold: float
    empirical_rate: float
    ci_low: float
    ci_high: float
    theoretical_rate: float
    n_runs: int

    def __post_init__(self):
        for name in ("target_pfa", "empirical_rate", "ci_low", "ci_high", "theoretical_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DetectionError(f"{name} must lie in [0, 1], got {value}")
        if not self.ci_low <= self.empirical_rate <= self.ci_high:
            raise DetectionError(
                f"Interval [{self.ci_low}, {self.ci_high}] does not contain "
                f"the rate {self.empirical_rate}"
            )
        if self.n_runs < 1:
            raise DetectionError(f"n_runs must be >= 1, got {self.n_runs}")

    @property
    def signed_error(self) -> float:
        return signed_error(self.theoretical_rate, self.empirical_rate)


@dataclass(frozen=True)
class EmpiricalRate:
    rate: float
    ci_low: float
    ci_high: float
    n_runs: int
    hits: int


@dataclass(frozen=True)
class S1LawParams:
    """Population-side constants of the S1 limit laws."""

    mu1: float
    mur: float
    q1: int
    qr: int
    alpha_m: float
    alpha_c: float

    def __post_init__(self):
        if not (self.mu1 >= self.mur > 0):
            raise DetectionError(f"Need mu1 >= mur > 0, got mu1={self.mu1}, mur={self.mur}")
        if not 0.0 < self.alpha_c <= 1.0:
            raise DetectionError(f"alpha_c must lie in (0, 1], got {self.alpha_c}")
        if not self.alpha_m > 0:
            raise DetectionError(f"alpha_m must be positive, got {self.alpha_m}")
        if self.q1 < 1 or self.qr < 1:
            raise DetectionError(f"Multiplicities must be >= 1, got q1={self.q1}, qr={self.qr}")

    def alpha(self, kind: DetectorKind) -> float:
        return self.alpha_m if DetectorKind.parse(kind) is DetectorKind.MED else self.alpha_c


# -------------------------
# FALSE ALARM
# -------------------------

def theoretical_pfa(kind: DetectorKind, K: int, N: int, case: ValueCase,
                    eps: float) -> float:
    law = s0_law(kind, K, case)
    return float(1.0 - law.cdf_at(math.sqrt(N) * (eps - 1.0)))


# -------------------------
# DETECTION
# -------------------------

def s1_params(pop: EigenSpectrum, sigma_u2: float,
              rel_tol: float = DEFAULT_REL_TOL) -> S1LawParams:
    if not sigma_u2 > 0:
        raise DetectionError(f"sigma_u2 must be > 0, got {sigma_u2}")
    partition = multiplicity_partition(pop, rel_tol)
    if partition.r < 2:
        raise DetectionError(
            "All population eigenvalues are identical; the signal is not "
            "identifiable from the spectrum"
        )
    mu1, mur = partition.mus[0], partition.mus[-1]
    return S1LawParams(
        mu1=mu1,
        mur=mur,
        q1=partition.qs[0],
        qr=partition.qs[-1],
        alpha_m=sigma_u2 / mu1,
        alpha_c=mur / mu1,
    )


def s1_law(kind: DetectorKind, params: S1LawParams, case: ValueCase,
           leading: str = "general") -> DistributionTable:
    """Limit law of sqrt(N)(alpha T - 1) under S1."""
    if DetectorKind.parse(kind) is DetectorKind.MED:
        return s1_med_law(params.q1, case)
    return s1_cnd_law(params.q1, params.qr, case, leading=leading)


def theoretical_pd(kind: DetectorKind, K: int, N: int, case: ValueCase, eps: float,
                   params: S1LawParams, leading: str = "general") -> float:
    law = s1_law(kind, params, case, leading)
    x = math.sqrt(N) * (params.alpha(kind) * eps - 1.0)
    return float(1.0 - law.cdf_at(x))


def s1_fluctuations(spec: EigenSpectrum, params: S1LawParams, N: int) -> S1FluctuationPair:
    root_n = math.sqrt(N)
    return S1FluctuationPair(
        gamma1=root_n * (spec.largest / params.mu1 - 1.0),
        gammaK=root_n * (spec.smallest / params.mur - 1.0),
    )


def block_fluctuations(spec: EigenSpectrum, partition: MultiplicityPartition,
                       N: int) -> List[FluctuationVector]:
    """sqrt(N)(lambda_hat / mu_k - 1) over the sample eigenvalues of each block."""
    if len(spec) != partition.K:
        raise DetectionError(
            f"Spectrum has {len(spec)} values but the partition covers K={partition.K}"
        )
    root_n = math.sqrt(N)
    blocks = []
    for mu, block in zip(partition.mus, partition.block_slices()):
        blocks.append(FluctuationVector(
            tuple(root_n * (v / mu - 1.0) for v in spec.values[block])
        ))
    return blocks


# -------------------------
# EMPIRICAL RATES
# -------------------------

def rate_from_counts(hits: int, n_runs: int,
                     confidence: float = CONFIDENCE_LEVEL) -> EmpiricalRate:
    """Fraction of hits with a Wilson score interval."""
    if n_runs < 1:
        raise DetectionError("Cannot compute a rate from zero runs")
    if not 0 <= hits <= n_runs:
        raise DetectionError(f"hits must lie in [0, {n_runs}], got {hits}")
    interval = binomtest(int(hits), int(n_runs)).proportion_ci(
        confidence_level=confidence, method="wilson"
    )
    rate = hits / n_runs
    return EmpiricalRate(
        rate=rate,
        ci_low=max(0.0, min(float(interval.low), rate)),
        ci_high=min(1.0, max(float(interval.high), rate)),
        n_runs=int(n_runs),
        hits=int(hits),
    )


def empirical_rate(decisions: Union[Sequence[Decision], np.ndarray]) -> EmpiricalRate:
    """
    Fraction of H1 decisions with a 95% Wilson interval.

    Accepts Decision objects or a boolean array of detections.
    """
    if len(decisions) == 0:
        raise DetectionError("Cannot compute a rate from an empty set of decisions")
    if isinstance(decisions, np.ndarray):
        hits = int(np.count_nonzero(decisions))
    else:
        hits = sum(1 for d in decisions if d.detected)
    return rate_from_counts(hits, len(decisions))


def ks_distance(samples, law: Union[DistributionTable, Callable]) -> float:
    """
    Sup-norm gap between the empirical CDF of the samples and a law.

    The law is a DistributionTable or any vectorized CDF callable.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 2:
        raise DistributionError(f"KS distance needs at least two samples, got {samples.size}")
    cdf = law.cdf_at if isinstance(law, DistributionTable) else law
    return float(kstest(samples, cdf).statistic)


def signed_error(theory: float, empirical: float) -> float:
    """theory - empirical; positive when the prediction overshoots."""
    return float(theory) - float(empirical)
