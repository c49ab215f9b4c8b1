"""
Maximum-eigenvalue (MED) and condition-number (CND) detectors.

  MED:  T = lambda_hat_1 / sigma_u2     (needs the noise power)
  CND:  T = lambda_hat_1 / lambda_hat_K  (noise-power free)

A threshold for a target false-alarm probability p comes from the
fixed-K limiting S0 law F of sqrt(N)(T - 1):

    eps = 1 + F^{-1}(1 - p) / sqrt(N)

The decision rule is strict: H1 iff T > eps, so a tie goes to H0.
"""

import math
from dataclasses import dataclass

import numpy as np

from core.eigen_engine import EigenSpectrum
from core.errors import DetectionError, DistributionError
from core.types import DetectorKind, Hypothesis, ValueCase
from rmt.laws import cnd_s0_law, marginal
from rmt.tables import DistributionTable


@dataclass(frozen=True)
class Decision:
    """One sensing decision and the numbers behind it."""

    statistic: float
    threshold: float
    hypothesis: Hypothesis

    def __post_init__(self):
        expected = Hypothesis.H1 if self.statistic > self.threshold else Hypothesis.H0
        if Hypothesis(self.hypothesis) is not expected:
            raise DetectionError(
                f"Decision {self.hypothesis} contradicts T={self.statistic} "
                f"against eps={self.threshold}"
            )

    @property
    def detected(self) -> bool:
        return self.hypothesis is Hypothesis.H1


# -------------------------
# TEST STATISTICS
# -------------------------

def med_statistic(spec: EigenSpectrum, sigma_u2: float) -> float:
    if not sigma_u2 > 0:
        raise DetectionError(f"MED needs a positive noise variance, got {sigma_u2}")
    return spec.largest / sigma_u2


def cnd_statistic(spec: EigenSpectrum) -> float:
    if not spec.smallest > 0:
        raise DetectionError(
            f"Smallest sample eigenvalue is {spec.smallest}; the sample covariance "
            f"is rank deficient (is N < K?)"
        )
    return spec.largest / spec.smallest


def statistic(kind: DetectorKind, spec: EigenSpectrum, sigma_u2: float = 1.0) -> float:
    kind = DetectorKind.parse(kind)
    if kind is DetectorKind.MED:
        return med_statistic(spec, sigma_u2)
    return cnd_statistic(spec)


def batch_statistics(kind: DetectorKind, values: np.ndarray,
                     sigma_u2: float = 1.0) -> np.ndarray:
    """Statistics for an m x K array of descending eigenvalues."""
    kind = DetectorKind.parse(kind)
    values = np.asarray(values, dtype=np.float64)
    if kind is DetectorKind.MED:
        if not sigma_u2 > 0:
            raise DetectionError(f"MED needs a positive noise variance, got {sigma_u2}")
        return values[:, 0] / sigma_u2

    smallest = values[:, -1]
    if np.any(smallest <= 0):
        bad = int(np.sum(smallest <= 0))
        raise DetectionError(
            f"{bad} sample covariance(s) are rank deficient; CND is undefined (is N < K?)"
        )
    return values[:, 0] / smallest


def regulated_statistic(T, N: int, alpha: float = 1.0):
    """sqrt(N)(alpha T - 1), the quantity whose limit law is tabulated."""
    values = math.sqrt(N) * (alpha * np.asarray(T, dtype=np.float64) - 1.0)
    return float(values) if values.ndim == 0 else values


# -------------------------
# CALIBRATION
# -------------------------

def s0_law(kind: DetectorKind, K: int, case: ValueCase) -> DistributionTable:
    """Limit law of sqrt(N)(T - 1) under S0."""
    kind = DetectorKind.parse(kind)
    if kind is DetectorKind.MED:
        return marginal(K, 1, case)
    if K < 2:
        raise DetectionError(f"CND needs K >= 2 antennas, got K={K}")
    return cnd_s0_law(K, case)


def threshold_for_pfa(kind: DetectorKind, K: int, N: int, case: ValueCase,
                      target_pfa: float) -> float:
    if not 0.0 < target_pfa < 1.0:
        raise DetectionError(f"Target false-alarm probability must lie in (0, 1), got {target_pfa}")
    if N < 1:
        raise DetectionError(f"N must be >= 1, got {N}")
    law = s0_law(kind, K, case)
    try:
        q = law.quantile(1.0 - target_pfa)
    except DistributionError as e:
        raise DetectionError(str(e)) from e
    return 1.0 + q / math.sqrt(N)


def decide(T: float, eps: float) -> Decision:
    hypothesis = Hypothesis.H1 if T > eps else Hypothesis.H0
    return Decision(statistic=float(T), threshold=float(eps), hypothesis=hypothesis)
