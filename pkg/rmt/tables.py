"""
Tabulated distributions.

A DistributionTable holds a PDF and CDF on a strictly increasing grid.
Tables are immutable once built and can be shared freely between
threads. Every limiting law in this package is delivered as one.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from core.errors import DistributionError
from core.types import ValueCase

CDF_TOL = 1e-4


@dataclass(frozen=True)
class TableMeta:
    """
    Describes which law a table holds and how it was obtained.

    Attributes:
        law: Law name (marginal, cnd_s0, s1_med, s1_cnd, gaussian, empirical)
        K: Dimension the law belongs to
        case: Real or complex model
        index: Eigenvalue index for marginals
        method: closed_form, quadrature, sampling, convolution or gaussian
        params: Extra law parameters (multiplicities, draw counts, ...)
    """

    law: str
    K: int
    case: ValueCase = ValueCase.REAL
    index: Optional[int] = None
    method: str = "quadrature"
    params: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "law": self.law,
            "K": self.K,
            "case": ValueCase.parse(self.case).value,
            "index": self.index,
            "method": self.method,
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TableMeta":
        return cls(
            law=data["law"],
            K=int(data["K"]),
            case=ValueCase.parse(data["case"]),
            index=data.get("index"),
            method=data.get("method", "quadrature"),
            params=dict(data.get("params", {})),
        )

    def describe(self) -> str:
        label = f"{self.law}(K={self.K}"
        if self.index is not None:
            label += f", i={self.index}"
        for name, value in sorted(self.params.items()):
            label += f", {name}={value}"
        return label + f", {ValueCase.parse(self.case).value}) via {self.method}"


def _readonly(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """PDF and CDF of a scalar law tabulated on a grid."""

    grid: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray
    meta: TableMeta

    def __post_init__(self):
        grid = _readonly(self.grid)
        pdf = _readonly(self.pdf)
        cdf = _readonly(self.cdf)

        if grid.ndim != 1 or grid.size < 2:
            raise DistributionError("A table needs a 1-D grid of at least two points")
        if pdf.shape != grid.shape or cdf.shape != grid.shape:
            raise DistributionError("grid, pdf and cdf must have the same length")
        if np.any(np.diff(grid) <= 0):
            raise DistributionError("Table grid must be strictly increasing")
        if np.any(pdf < 0):
            raise DistributionError("Table pdf must be nonnegative")
        if np.any(np.diff(cdf) < 0) or cdf[0] < 0 or cdf[-1] > 1 + 1e-12:
            raise DistributionError("Table cdf must be nondecreasing within [0, 1]")
        if abs(cdf[-1] - 1.0) > CDF_TOL:
            raise DistributionError(
                f"Table cdf ends at {cdf[-1]:.6g}; the grid does not cover the law "
                f"({self.meta.describe()})"
            )

        integrated = cdf[0] + cumulative_trapezoid(pdf, grid, initial=0.0)
        drift = float(np.max(np.abs(integrated - cdf)))
        if drift > CDF_TOL:
            raise DistributionError(
                f"Table cdf disagrees with the integrated pdf by {drift:.3g} "
                f"({self.meta.describe()})"
            )

        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "pdf", pdf)
        object.__setattr__(self, "cdf", cdf)

    @classmethod
    def from_pdf(cls, grid, pdf, meta: TableMeta,
                 normalize: bool = False) -> "DistributionTable":
        """Build a table whose CDF is the cumulative trapezoid of the PDF."""
        grid = np.asarray(grid, dtype=np.float64)
        pdf = np.clip(np.asarray(pdf, dtype=np.float64), 0.0, None)
        cdf = cumulative_trapezoid(pdf, grid, initial=0.0)
        if normalize:
            total = cdf[-1]
            if total <= 0:
                raise DistributionError(f"Cannot normalize an empty density ({meta.describe()})")
            pdf = pdf / total
            cdf = cdf / total
        cdf = np.clip(np.maximum.accumulate(cdf), 0.0, 1.0)
        return cls(grid=grid, pdf=pdf, cdf=cdf, meta=meta)

    @property
    def step(self) -> float:
        return float(np.max(np.diff(self.grid)))

    def relabel(self, **changes) -> "DistributionTable":
        """Same numbers, different metadata."""
        return replace(self, meta=replace(self.meta, **changes))

    def cdf_at(self, x):
        """CDF by linear interpolation; 0 left of the grid, 1 right of it."""
        values = np.interp(x, self.grid, self.cdf, left=0.0, right=1.0)
        return float(values) if np.ndim(values) == 0 else values

    def pdf_at(self, x):
        values = np.interp(x, self.grid, self.pdf, left=0.0, right=0.0)
        return float(values) if np.ndim(values) == 0 else values

    def quantile(self, p):
        return quantile(self, p)

    def mean(self) -> float:
        return float(trapezoid(self.grid * self.pdf, self.grid))

    def variance(self) -> float:
        centre = self.mean()
        return float(trapezoid((self.grid - centre) ** 2 * self.pdf, self.grid))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF draws from the tabulated law."""
        u = rng.random(size)
        u = np.clip(u, 1e-15, 1.0 - 1e-15)
        return quantile(self, u)

    def reflected(self) -> "DistributionTable":
        """Law of -X when this table holds the law of X."""
        return DistributionTable(
            grid=-self.grid[::-1],
            pdf=self.pdf[::-1],
            cdf=1.0 - self.cdf[::-1],
            meta=replace(self.meta, params={**self.meta.params, "reflected": True}),
        )


def quantile(table: DistributionTable, p):
    """
    Inverse CDF by monotone piecewise-linear interpolation.

    For each p the result is the smallest grid abscissa where the
    tabulated CDF reaches p, refined linearly within the bracketing cell.
    """
    p_arr = np.asarray(p, dtype=np.float64)
    if np.any(~(p_arr > 0.0)) or np.any(~(p_arr < 1.0)):
        raise DistributionError(f"Quantile probability must lie in (0, 1), got {p}")

    cdf = table.cdf
    grid = table.grid
    idx = np.searchsorted(cdf, p_arr, side="left")
    idx = np.clip(idx, 1, grid.size - 1)
    lo_c = cdf[idx - 1]
    hi_c = cdf[idx]
    lo_x = grid[idx - 1]
    hi_x = grid[idx]
    span = hi_c - lo_c
    frac = np.where(span > 0, (p_arr - lo_c) / np.where(span > 0, span, 1.0), 1.0)
    frac = np.clip(frac, 0.0, 1.0)
    result = lo_x + frac * (hi_x - lo_x)
    return float(result) if result.ndim == 0 else result
