"""
Large-(K, N) comparison baseline.

When K and N grow together the largest eigenvalue of N * R_hat / sigma_u2
centres at mu = (sqrt(N) + sqrt(K))^2 with spread
nu = (sqrt(N) + sqrt(K)) (1/sqrt(N) + 1/sqrt(K))^(1/3), and the centred,
scaled value follows a Tracy-Widom law (order 1 real, order 2 complex).
The smallest eigenvalue is pinned at sigma_u2 (1 - sqrt(K/N))^2.

The Tracy-Widom percentiles are read from a YAML table; nothing here
evaluates the Tracy-Widom law from first principles.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
import yaml
from scipy.interpolate import PchipInterpolator

from core.errors import BaselineError
from core.types import DetectorKind, ValueCase

logger = logging.getLogger(__name__)

DEFAULT_TABLE_PATH = Path(__file__).resolve().parent.parent / "data" / "tracy_widom.yaml"

MED_FORMULA = "eps = ((sqrt(N)+sqrt(K))^2 + (sqrt(N)+sqrt(K))(1/sqrt(N)+1/sqrt(K))^(1/3) * TW^-1(1-pfa)) / N"
CND_FORMULA = ("eps = (sqrt(N)+sqrt(K))^2/(sqrt(N)-sqrt(K))^2 * "
               "(1 + (sqrt(N)+sqrt(K))^(-2/3) (NK)^(-1/6) * TW^-1(1-pfa))")


@dataclass(frozen=True, eq=False)
class TracyWidomTable:
    """Tabulated Tracy-Widom percentiles per order, with provenance."""

    probabilities: Tuple[float, ...]
    orders: Dict[int, Tuple[float, ...]]
    provenance: str = ""
    source: Optional[str] = None
    _quantile_fns: Dict[int, PchipInterpolator] = field(default_factory=dict, init=False, repr=False)
    _cdf_fns: Dict[int, PchipInterpolator] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 2:
            raise BaselineError("Tracy-Widom table needs at least two probabilities")
        if np.any(np.diff(probs) <= 0) or probs[0] <= 0 or probs[-1] >= 1:
            raise BaselineError("Tracy-Widom probabilities must increase strictly inside (0, 1)")
        if not self.orders:
            raise BaselineError("Tracy-Widom table has no orders")

        for order, values in self.orders.items():
            quantiles = np.asarray(values, dtype=np.float64)
            if quantiles.shape != probs.shape:
                raise BaselineError(
                    f"Tracy-Widom order {order}: expected {probs.size} quantiles, "
                    f"got {quantiles.size}"
                )
            if np.any(np.diff(quantiles) <= 0):
                raise BaselineError(f"Tracy-Widom order {order}: quantiles must increase strictly")
            self._quantile_fns[int(order)] = PchipInterpolator(probs, quantiles)
            self._cdf_fns[int(order)] = PchipInterpolator(quantiles, probs)

    def _check_order(self, order: int):
        if order not in self._quantile_fns:
            raise BaselineError(
                f"Tracy-Widom order {order} is not tabulated "
                f"(available: {sorted(self._quantile_fns)})"
            )

    def quantile(self, p: float, order: int) -> float:
        self._check_order(order)
        lo, hi = self.probabilities[0], self.probabilities[-1]
        if not lo <= p <= hi:
            raise BaselineError(
                f"Tracy-Widom quantile requested at p={p}, outside the tabulated "
                f"range [{lo}, {hi}]"
            )
        return float(self._quantile_fns[order](p))

    def cdf(self, s, order: int):
        """CDF by monotone interpolation, clamped to 0 and 1 outside the table."""
        self._check_order(order)
        quantiles = self.orders[order]
        s_arr = np.asarray(s, dtype=np.float64)
        values = self._cdf_fns[order](np.clip(s_arr, quantiles[0], quantiles[-1]))
        values = np.where(s_arr < quantiles[0], 0.0, values)
        values = np.where(s_arr > quantiles[-1], 1.0, values)
        values = np.clip(values, 0.0, 1.0)
        return float(values) if values.ndim == 0 else values


def load_tracy_widom(path: Optional[Path] = None) -> TracyWidomTable:
    """Load a Tracy-Widom table from YAML (the bundled table by default)."""
    path = Path(path) if path is not None else DEFAULT_TABLE_PATH
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise BaselineError(f"Cannot read Tracy-Widom table {path}: {e}")
    except yaml.YAMLError as e:
        raise BaselineError(f"Invalid YAML in Tracy-Widom table {path}: {e}")

    if not isinstance(data, dict) or "probabilities" not in data or "orders" not in data:
        raise BaselineError(
            f"Tracy-Widom table {path} must define 'probabilities' and 'orders'"
        )

    logger.debug(f"Loaded Tracy-Widom table from {path}")
    return TracyWidomTable(
        probabilities=tuple(float(p) for p in data["probabilities"]),
        orders={int(k): tuple(float(v) for v in vs) for k, vs in data["orders"].items()},
        provenance=str(data.get("provenance", "")).strip(),
        source=str(path),
    )


# -------------------------
# CENTRING AND SCALING
# -------------------------

def tw_order(case: ValueCase) -> int:
    return 1 if ValueCase.parse(case) is ValueCase.REAL else 2


def centering(K: int, N: int) -> float:
    return (math.sqrt(N) + math.sqrt(K)) ** 2


def scaling(K: int, N: int) -> float:
    return (math.sqrt(N) + math.sqrt(K)) * (1.0 / math.sqrt(N) + 1.0 / math.sqrt(K)) ** (1.0 / 3.0)


def edge_ratio(K: int, N: int) -> float:
    """(1 - sqrt(K/N))^2, the pinned smallest eigenvalue over sigma_u2."""
    return (1.0 - math.sqrt(K / N)) ** 2


def deterministic_cnd_ratio(K: int, N: int) -> float:
    """(sqrt(N) + sqrt(K))^2 / (sqrt(N) - sqrt(K))^2."""
    if K >= N:
        raise BaselineError(f"The large-(K, N) condition-number baseline needs K < N, got K={K}, N={N}")
    return (math.sqrt(N) + math.sqrt(K)) ** 2 / (math.sqrt(N) - math.sqrt(K)) ** 2


def formula(kind: DetectorKind) -> str:
    return MED_FORMULA if DetectorKind.parse(kind) is DetectorKind.MED else CND_FORMULA


# -------------------------
# THRESHOLD, CDF, DETECTION
# -------------------------

def _require_table(tw: Optional[TracyWidomTable]) -> TracyWidomTable:
    if tw is None:
        raise BaselineError("The large-(K, N) baseline needs a Tracy-Widom table")
    return tw


def large_k_baseline_threshold(kind: DetectorKind, K: int, N: int, target_pfa: float,
                               tw: Optional[TracyWidomTable],
                               case: ValueCase = ValueCase.REAL) -> float:
    kind = DetectorKind.parse(kind)
    tw = _require_table(tw)
    if not 0.0 < target_pfa < 1.0:
        raise BaselineError(f"Target false-alarm probability must lie in (0, 1), got {target_pfa}")
    q = tw.quantile(1.0 - target_pfa, tw_order(case))

    if kind is DetectorKind.MED:
        return (centering(K, N) + scaling(K, N) * q) / N

    spread = (math.sqrt(N) + math.sqrt(K)) ** (-2.0 / 3.0) * (N * K) ** (-1.0 / 6.0)
    return deterministic_cnd_ratio(K, N) * (1.0 + spread * q)


def large_k_cdf(kind: DetectorKind, K: int, N: int, case: ValueCase, x,
                tw: Optional[TracyWidomTable]):
    """Baseline CDF of the regulated statistic sqrt(N)(T - 1) at x."""
    kind = DetectorKind.parse(kind)
    tw = _require_table(tw)
    T = 1.0 + np.asarray(x, dtype=np.float64) / math.sqrt(N)
    scaled = N * T
    if kind is DetectorKind.CND:
        if K >= N:
            raise BaselineError(f"The large-(K, N) condition-number baseline needs K < N, got K={K}, N={N}")
        scaled = scaled * edge_ratio(K, N)
    return tw.cdf((scaled - centering(K, N)) / scaling(K, N), tw_order(case))


def large_k_pd(kind: DetectorKind, K: int, N: int, case: ValueCase, eps: float,
               alpha: float, tw: Optional[TracyWidomTable]) -> float:
    """
    Baseline detection probability.

    The S1 statistic alpha * T is read against the baseline S0 law, so
    P_d = 1 - CDF(sqrt(N)(alpha eps - 1)).
    """
    x = math.sqrt(N) * (alpha * eps - 1.0)
    return float(1.0 - large_k_cdf(kind, K, N, case, x, tw))
