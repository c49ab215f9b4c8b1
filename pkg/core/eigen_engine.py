"""
Covariance matrices and their ordered eigenvalues for small K.

Only eigenvalues are exposed. K = 2 uses the closed form of a 2 x 2
Hermitian matrix; K >= 3 uses cyclic Jacobi rotations, which keep the
eigenvalues real and accurate to high relative precision for the tiny
matrices this package deals with. Complex Hermitian input is handled by
the real-symmetric embedding [[A, -B], [B, A]] of A + iB, whose
spectrum is that of the original with every eigenvalue doubled.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import EigenError
from .signal_model import SampleMatrix
from .types import ValueCase

logger = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12
PSD_SLACK = 1e-10
DEFAULT_REL_TOL = 1e-9

_JACOBI_MAX_SWEEPS = 60
_JACOBI_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """K x K Hermitian (symmetric when real) positive semidefinite matrix."""

    data: np.ndarray
    case: ValueCase = ValueCase.REAL

    def __post_init__(self):
        object.__setattr__(self, "case", ValueCase.parse(self.case))
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[0] != data.shape[1] or data.size == 0:
            raise EigenError(f"Covariance matrix must be square and nonempty, got {data.shape}")
        if not is_hermitian(data):
            raise EigenError("Covariance matrix is not Hermitian within tolerance")
        if self.case is ValueCase.REAL:
            data = np.real(data)
        data = np.array(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def K(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))


@dataclass(frozen=True)
class EigenSpectrum:
    """Eigenvalues of a K x K covariance matrix in descending order."""

    values: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise EigenError("An eigen spectrum needs at least one value")
        if any(a < b for a, b in zip(values, values[1:])):
            raise EigenError(f"Eigenvalues must be in descending order, got {values}")
        largest = values[0]
        if largest > 0 and values[-1] < -PSD_SLACK * largest:
            raise EigenError(
                f"Spectrum is not positive semidefinite: smallest value {values[-1]}"
            )
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, index):
        return self.values[index]

    @property
    def largest(self) -> float:
        return self.values[0]

    @property
    def smallest(self) -> float:
        return self.values[-1]

    def scaled(self, factor: float) -> "EigenSpectrum":
        if factor <= 0:
            raise EigenError(f"Scale factor must be positive, got {factor}")
        return EigenSpectrum(tuple(factor * v for v in self.values))


@dataclass(frozen=True)
class MultiplicityPartition:
    """Distinct population eigenvalues mu_1 > ... > mu_r with multiplicities q_k."""

    mus: Tuple[float, ...]
    qs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.mus) != len(self.qs) or not self.mus:
            raise EigenError("mus and qs must be nonempty and of equal length")
        if any(a <= b for a, b in zip(self.mus, self.mus[1:])):
            raise EigenError(f"Distinct eigenvalues must strictly decrease, got {self.mus}")
        if any(q < 1 for q in self.qs):
            raise EigenError(f"Multiplicities must be positive, got {self.qs}")

    @property
    def r(self) -> int:
        return len(self.mus)

    @property
    def K(self) -> int:
        return sum(self.qs)

    def block_slices(self):
        """Index ranges of each block within a descending spectrum."""
        start = 0
        for q in self.qs:
            yield slice(start, start + q)
            start += q


# -------------------------
# COVARIANCE CONSTRUCTION
# -------------------------

def is_hermitian(data: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    scale = float(np.max(np.abs(data))) if data.size else 0.0
    if scale == 0.0:
        return True
    return float(np.max(np.abs(data - data.conj().T))) <= rtol * scale


def sample_covariance(X: SampleMatrix) -> CovarianceMatrix:
    """(1/N) X X^H, symmetrized exactly."""
    data = np.asarray(X.data)
    if data.size == 0:
        raise EigenError("Cannot form a sample covariance from an empty matrix")
    cov = data @ data.conj().T / data.shape[1]
    cov = 0.5 * (cov + cov.conj().T)
    return CovarianceMatrix(cov, X.case)


def batch_sample_covariance(X: np.ndarray) -> np.ndarray:
    """Sample covariances of an m x K x N stack of sample matrices."""
    X = np.asarray(X)
    if X.ndim != 3 or X.shape[2] == 0:
        raise EigenError(f"Expected an m x K x N stack, got shape {X.shape}")
    cov = X @ np.conj(np.swapaxes(X, 1, 2)) / X.shape[2]
    cov = 0.5 * (cov + np.conj(np.swapaxes(cov, 1, 2)))
    if not np.iscomplexobj(X):
        cov = np.real(cov)
    return cov


def population_covariance(channel, sigma_s2: float, sigma_u2: float) -> CovarianceMatrix:
    """R_x = sigma_s2 H H^H + sigma_u2 I."""
    H = np.asarray(channel)
    if H.ndim == 1:
        H = H.reshape(-1, 1)
    cov = sigma_s2 * (H @ H.conj().T) + sigma_u2 * np.eye(H.shape[0])
    case = ValueCase.COMPLEX if np.iscomplexobj(H) else ValueCase.REAL
    return CovarianceMatrix(cov, case)


# -------------------------
# EIGENVALUES
# -------------------------

def eigenvalues(C: CovarianceMatrix) -> EigenSpectrum:
    """Ordered eigenvalues of a single covariance matrix."""
    values = batch_eigenvalues(C.data[np.newaxis, ...])[0]
    return EigenSpectrum(tuple(values))


def batch_eigenvalues(C: np.ndarray) -> np.ndarray:
    """
    Descending eigenvalues of an m x K x K stack of Hermitian matrices.

    Returns an m x K real array.
    """
    C = np.asarray(C)
    if C.ndim != 3 or C.shape[1] != C.shape[2]:
        raise EigenError(f"Expected an m x K x K stack, got shape {C.shape}")
    K = C.shape[1]

    if K == 1:
        values = np.real(C[:, :, 0])
    elif K == 2:
        values = _closed_form_2x2(C)
    elif np.iscomplexobj(C):
        embedded = _real_embedding(C)
        doubled = np.sort(_jacobi(embedded), axis=1)[:, ::-1]
        values = doubled[:, ::2]
    else:
        values = _jacobi(np.array(C, dtype=np.float64))

    return np.sort(values, axis=1)[:, ::-1]


def _closed_form_2x2(C: np.ndarray) -> np.ndarray:
    a = np.real(C[:, 0, 0])
    d = np.real(C[:, 1, 1])
    b = np.abs(C[:, 0, 1])
    half_trace = 0.5 * (a + d)
    radius = np.hypot(0.5 * (a - d), b)
    return np.stack([half_trace + radius, half_trace - radius], axis=1)


def _real_embedding(C: np.ndarray) -> np.ndarray:
    A = np.real(C)
    B = np.imag(C)
    top = np.concatenate([A, -B], axis=2)
    bottom = np.concatenate([B, A], axis=2)
    return np.concatenate([top, bottom], axis=1)


def _jacobi(A: np.ndarray) -> np.ndarray:
    """Cyclic Jacobi on a stack of real symmetric matrices; unsorted eigenvalues."""
    A = np.array(A, dtype=np.float64)
    n = A.shape[1]
    scale = np.sqrt(np.sum(A * A, axis=(1, 2)))
    scale = np.where(scale == 0.0, 1.0, scale)
    off_mask = ~np.eye(n, dtype=bool)

    for sweep in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(A[:, off_mask] ** 2, axis=1))
        # converged matrices stay frozen; each result is independent of its batch
        pending = off > _JACOBI_TOL * scale
        if not np.any(pending):
            logger.debug(f"Jacobi converged after {sweep} sweeps on {A.shape[0]} matrices")
            return np.diagonal(A, axis1=1, axis2=2).copy()

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                active = (np.abs(apq) > 0.0) & pending
                if not np.any(active):
                    continue
                safe_apq = np.where(active, apq, 1.0)
                tau = (A[:, q, q] - A[:, p, p]) / (2.0 * safe_apq)
                t = np.where(
                    tau >= 0.0,
                    1.0 / (tau + np.sqrt(1.0 + tau * tau)),
                    -1.0 / (-tau + np.sqrt(1.0 + tau * tau)),
                )
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p = A[:, :, p].copy()
                col_q = A[:, :, q].copy()
                A[:, :, p] = c[:, None] * col_p - s[:, None] * col_q
                A[:, :, q] = s[:, None] * col_p + c[:, None] * col_q

                row_p = A[:, p, :].copy()
                row_q = A[:, q, :].copy()
                A[:, p, :] = c[:, None] * row_p - s[:, None] * row_q
                A[:, q, :] = s[:, None] * row_p + c[:, None] * row_q

                A[:, p, q] = np.where(active, 0.0, A[:, p, q])
                A[:, q, p] = np.where(active, 0.0, A[:, q, p])

    raise EigenError(f"Jacobi iteration did not converge in {_JACOBI_MAX_SWEEPS} sweeps")


# -------------------------
# MULTIPLICITIES
# -------------------------

def multiplicity_partition(spec: EigenSpectrum,
                           rel_tol: float = DEFAULT_REL_TOL) -> MultiplicityPartition:
    """Group consecutive eigenvalues whose relative gap is at most rel_tol."""
    groups = [[spec.values[0]]]
    for previous, value in zip(spec.values, spec.values[1:]):
        reference = max(abs(previous), abs(value))
        if reference == 0.0 or (previous - value) <= rel_tol * reference:
            groups[-1].append(value)
        else:
            groups.append([value])

    mus = tuple(float(np.mean(group)) for group in groups)
    qs = tuple(len(group) for group in groups)
    return MultiplicityPartition(mus=mus, qs=qs)
