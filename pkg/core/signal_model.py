"""
Received-sample generation for multi-antenna spectrum sensing.

Scenario S0 produces noise only, x(n) = u(n). Scenario S1 adds t primary
signals through a K x t channel, x(n) = H s(n) + u(n). Signal and noise
are zero-mean Gaussian, i.i.d. over antennas and time. In the complex
case both are circularly symmetric: the total variance is split evenly
between real and imaginary parts.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import ConfigError, SignalModelError
from .streams import DEFAULT_SEED
from .types import Scenario, ValueCase


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """
    Everything needed to draw one K x N block of received samples.

    Attributes:
        K: Number of antennas
        N: Samples per antenna
        case: Real or complex Gaussian model
        scenario: S0 (noise only) or S1 (signal present)
        t: Number of active primary users (S1 only)
        sigma_s2: Per-element signal variance
        sigma_u2: Per-element noise variance
        channel: K x t channel matrix (S1 only)
        seed: Master seed recorded alongside the draws
    """

    K: int
    N: int
    case: ValueCase = ValueCase.REAL
    scenario: Scenario = Scenario.S0
    t: int = 1
    sigma_s2: float = 1.0
    sigma_u2: float = 1.0
    channel: Optional[np.ndarray] = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, "case", ValueCase.parse(self.case))
        object.__setattr__(self, "scenario", Scenario.parse(self.scenario))
        if self.channel is not None:
            channel = np.array(self.channel)
            if channel.ndim == 1:
                channel = channel.reshape(-1, 1)
            channel.setflags(write=False)
            object.__setattr__(self, "channel", channel)

        errors = self._collect_errors()
        if errors:
            raise ConfigError("Invalid scenario configuration", errors=errors)

    def _collect_errors(self) -> List[str]:
        errors = []
        if self.K < 1:
            errors.append(f"K: must be >= 1, got {self.K}")
        if self.N < 1:
            errors.append(f"N: must be >= 1, got {self.N}")
        if not self.sigma_u2 > 0:
            errors.append(f"sigma_u2: must be > 0, got {self.sigma_u2}")
        if self.sigma_s2 < 0:
            errors.append(f"sigma_s2: must be >= 0, got {self.sigma_s2}")
        if self.scenario is Scenario.S1:
            if self.t < 1:
                errors.append(f"t: must be >= 1 under S1, got {self.t}")
            if self.channel is None:
                errors.append("channel: required under S1")
            else:
                if self.channel.shape != (self.K, self.t):
                    errors.append(
                        f"channel: expected shape ({self.K}, {self.t}), "
                        f"got {self.channel.shape}"
                    )
                if not np.any(self.channel != 0):
                    errors.append("channel: must have at least one nonzero entry")
        return errors

    @property
    def dtype(self):
        return np.complex128 if self.case is ValueCase.COMPLEX else np.float64


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """K x N block of received samples X = [x(0), ..., x(N-1)]."""

    data: np.ndarray
    case: ValueCase = ValueCase.REAL
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "case", ValueCase.parse(self.case))
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise SignalModelError(f"Sample matrix must be 2-D, got shape {data.shape}")
        if np.iscomplexobj(data) and self.case is ValueCase.REAL:
            raise SignalModelError("Complex samples supplied for a real-valued model")
        object.__setattr__(self, "data", data)

    @property
    def K(self) -> int:
        return self.data.shape[0]

    @property
    def N(self) -> int:
        return self.data.shape[1]


def _gaussian(rng: np.random.Generator, shape, variance: float,
              case: ValueCase) -> np.ndarray:
    if case is ValueCase.COMPLEX:
        scale = math.sqrt(variance / 2.0)
        real = rng.standard_normal(shape)
        imag = rng.standard_normal(shape)
        return scale * (real + 1j * imag)
    return math.sqrt(variance) * rng.standard_normal(shape)


def generate_noise(cfg: ScenarioConfig, rng: np.random.Generator) -> SampleMatrix:
    """Draw X under S0: every entry is an independent noise sample."""
    if cfg.scenario is not Scenario.S0:
        raise SignalModelError(
            f"generate_noise requires scenario S0, got {cfg.scenario.value}"
        )
    data = _gaussian(rng, (cfg.K, cfg.N), cfg.sigma_u2, cfg.case)
    return SampleMatrix(data=data, case=cfg.case)


def generate_received(cfg: ScenarioConfig, rng: np.random.Generator) -> SampleMatrix:
    """Draw X under S1: column n equals H s(n) + u(n)."""
    if cfg.scenario is not Scenario.S1:
        raise SignalModelError(
            f"generate_received requires scenario S1, got {cfg.scenario.value}"
        )
    channel = cfg.channel
    if channel is None:
        raise SignalModelError("generate_received requires a channel matrix")
    if channel.shape != (cfg.K, cfg.t):
        raise SignalModelError(
            f"Channel shape {channel.shape} does not match (K, t) = ({cfg.K}, {cfg.t})"
        )

    signal = _gaussian(rng, (cfg.t, cfg.N), cfg.sigma_s2, cfg.case)
    noise = _gaussian(rng, (cfg.K, cfg.N), cfg.sigma_u2, cfg.case)
    data = channel @ signal + noise
    if cfg.case is ValueCase.REAL:
        data = np.real(data)
    return SampleMatrix(data=data, case=cfg.case)


def generate(cfg: ScenarioConfig, rng: np.random.Generator) -> SampleMatrix:
    """Draw X for whichever scenario the config names."""
    if cfg.scenario is Scenario.S0:
        return generate_noise(cfg, rng)
    return generate_received(cfg, rng)


# -------------------------
# CHANNEL / SNR BOOKKEEPING
# -------------------------

def compute_snr(channel, sigma_s2: float, sigma_u2: float, K: int) -> float:
    """
    Average received SNR, sum_l ||h_l||^2 sigma_s2 / (K sigma_u2), as a linear ratio.
    """
    if not sigma_u2 > 0:
        raise SignalModelError(f"sigma_u2 must be > 0, got {sigma_u2}")
    channel = np.asarray(channel)
    power = float(np.sum(np.abs(channel) ** 2))
    return power * sigma_s2 / (K * sigma_u2)


def to_db(ratio: float) -> float:
    if ratio <= 0:
        return float("-inf")
    return 10.0 * math.log10(ratio)


def from_db(db: float) -> float:
    return 10.0 ** (db / 10.0)


def compute_snr_db(channel, sigma_s2: float, sigma_u2: float, K: int) -> float:
    return to_db(compute_snr(channel, sigma_s2, sigma_u2, K))


def scale_channel_to_snr(channel, sigma_s2: float, sigma_u2: float, K: int,
                         target_snr_db: float) -> np.ndarray:
    """Rescale a channel so that compute_snr hits the target exactly."""
    if not math.isfinite(target_snr_db):
        raise SignalModelError(
            f"Target SNR must be a finite number of dB, got {target_snr_db}"
        )
    if not sigma_s2 > 0:
        raise SignalModelError("Cannot reach a target SNR with zero signal power")
    channel = np.asarray(channel)
    current = compute_snr(channel, sigma_s2, sigma_u2, K)
    if current == 0:
        raise SignalModelError("Cannot scale an all-zero channel to a target SNR")
    factor = math.sqrt(from_db(target_snr_db) / current)
    return channel * factor


def default_channel(K: int, t: int = 1) -> np.ndarray:
    """All-ones channel; its direction is fixed and only the SNR scaling matters."""
    return np.ones((K, t))


def draw_channel(K: int, t: int, rng: np.random.Generator) -> np.ndarray:
    """One real N(0, 1) channel draw, held fixed for a whole experiment."""
    return rng.standard_normal((K, t))
