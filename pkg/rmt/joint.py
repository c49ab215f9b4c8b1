"""
Fixed-K eigenvalue fluctuation laws and their Wigner samplers.

Under S0 the normalized sample eigenvalues lambda_i = lambda_hat_i / sigma_u2
satisfy beta_i = sqrt(N) (lambda_i - 1) -> the ordered eigenvalues of a
Gaussian orthogonal (real case) or unitary (complex case) matrix. The
joint densities on the ordered cone beta_1 >= ... >= beta_K are

    real:    C1(K) exp(-sum beta^2 / 4) prod_{i<j} (beta_i - beta_j)
    complex: C2(K) exp(-sum beta^2 / 2) prod_{i<j} (beta_i - beta_j)^2
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from core.eigen_engine import EigenSpectrum
from core.errors import DistributionError
from core.types import ValueCase


@dataclass(frozen=True)
class FluctuationVector:
    """Ordered beta_1 >= ... >= beta_K."""

    betas: Tuple[float, ...]

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if not betas:
            raise DistributionError("A fluctuation vector needs at least one value")
        if any(a < b for a, b in zip(betas, betas[1:])):
            raise DistributionError(
                f"Fluctuations must be in descending order, got {betas}"
            )
        object.__setattr__(self, "betas", betas)

    def __len__(self):
        return len(self.betas)

    @classmethod
    def from_spectrum(cls, spec: EigenSpectrum, sigma_u2: float,
                      N: int) -> "FluctuationVector":
        root_n = math.sqrt(N)
        return cls(tuple(root_n * (v / sigma_u2 - 1.0) for v in spec.values))


@dataclass(frozen=True)
class S1FluctuationPair:
    """gamma_1 = sqrt(N)(lambda_hat_1/mu_1 - 1), gamma_K = sqrt(N)(lambda_hat_K/mu_r - 1)."""

    gamma1: float
    gammaK: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma1) and math.isfinite(self.gammaK)):
            raise DistributionError("S1 fluctuations must be finite")


# -------------------------
# DENSITIES
# -------------------------

def log_normalizing_constant(K: int, case: ValueCase) -> float:
    """log C1(K) (real) or log C2(K) (complex)."""
    if K < 1:
        raise DistributionError(f"K must be >= 1, got {K}")
    case = ValueCase.parse(case)
    if case is ValueCase.REAL:
        halves = np.array([(K + 1 - i) / 2.0 for i in range(1, K + 1)])
        return -(K * (K + 3) / 4.0) * math.log(2.0) - float(np.sum(gammaln(halves)))
    js = np.arange(1, K + 1, dtype=np.float64)
    return (float(gammaln(K + 1.0)) - (K / 2.0) * math.log(2.0 * math.pi)
            - float(np.sum(gammaln(1.0 + js))))


def normalizing_constant(K: int, case: ValueCase) -> float:
    return math.exp(log_normalizing_constant(K, case))


def density_array(B: np.ndarray, case: ValueCase) -> np.ndarray:
    """
    Joint density at each row of an m x K array of ordered fluctuations.

    Ordering is not checked here; callers build rows on the ordered cone.
    """
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    K = B.shape[1]
    case = ValueCase.parse(case)
    power = 1 if case is ValueCase.REAL else 2
    weight = 0.25 if case is ValueCase.REAL else 0.5

    vandermonde = np.ones(B.shape[0])
    for i in range(K):
        for j in range(i + 1, K):
            vandermonde = vandermonde * (B[:, i] - B[:, j]) ** power

    gaussian = np.exp(-weight * np.sum(B * B, axis=1))
    return math.exp(log_normalizing_constant(K, case)) * gaussian * vandermonde


def joint_density(betas: Union[FluctuationVector, Sequence[float]],
                  case: ValueCase) -> float:
    """Limiting joint density of the ordered fluctuations (defined on the ordered cone only)."""
    if not isinstance(betas, FluctuationVector):
        betas = FluctuationVector(tuple(betas))
    return float(density_array(np.array(betas.betas), case)[0])


# -------------------------
# SAMPLERS
# -------------------------

def wigner_matrices(K: int, case: ValueCase, rng: np.random.Generator,
                    size: int) -> np.ndarray:
    """
    size x K x K Gaussian Wigner matrices with the fluctuation-limit scaling.

    Real: diagonal N(0, 2), off-diagonal N(0, 1).
    Complex: diagonal N(0, 1), off-diagonal parts independent N(0, 1/2).
    """
    case = ValueCase.parse(case)
    if case is ValueCase.REAL:
        Z = rng.standard_normal((size, K, K))
        return (Z + np.swapaxes(Z, 1, 2)) / math.sqrt(2.0)
    Z = (rng.standard_normal((size, K, K))
         + 1j * rng.standard_normal((size, K, K))) / math.sqrt(2.0)
    return (Z + np.conj(np.swapaxes(Z, 1, 2))) / math.sqrt(2.0)


def sample_wigner_batch(K: int, case: ValueCase, rng: np.random.Generator,
                        size: int) -> np.ndarray:
    """size x K array of descending Wigner eigenvalues."""
    if K < 1:
        raise DistributionError(f"K must be >= 1, got {K}")
    values = np.linalg.eigvalsh(wigner_matrices(K, case, rng, size))
    return values[:, ::-1]


def sample_wigner(K: int, case: ValueCase, rng: np.random.Generator) -> FluctuationVector:
    """One draw of ordered eigenvalues from the GOE/GUE fluctuation limit."""
    return FluctuationVector(tuple(sample_wigner_batch(K, case, rng, 1)[0]))


def monte_carlo_mass(K: int, case: ValueCase, rng: np.random.Generator,
                     draws: int = 200_000) -> float:
    """
    Monte Carlo estimate of the joint density's mass over the ordered cone.

    Uses a wider i.i.d. Gaussian proposal; sorting maps K! unordered points
    onto each ordered point, so the proposal density on the cone is
    K! prod phi(z_i).
    """
    case = ValueCase.parse(case)
    proposal_var = 4.0 if case is ValueCase.REAL else 2.0
    z = math.sqrt(proposal_var) * rng.standard_normal((draws, K))
    ordered = -np.sort(-z, axis=1)
    log_phi = (-0.5 * np.sum(z * z, axis=1) / proposal_var
               - 0.5 * K * math.log(2.0 * math.pi * proposal_var))
    proposal = math.factorial(K) * np.exp(log_phi)
    weights = density_array(ordered, case) / proposal
    return float(np.mean(weights))
