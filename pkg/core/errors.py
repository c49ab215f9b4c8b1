"""
Custom exceptions for eigensense.
"""

from typing import List, Optional


class EigenSenseError(Exception):
    """Base exception for all eigensense errors."""
    pass


class ConfigError(EigenSenseError):
    """Raised when a scenario or experiment configuration is invalid."""

    def __init__(self, message: str, errors: Optional[List[str]] = None):
        super().__init__(message)
        self.errors = errors or []

    def __str__(self):
        msg = super().__str__()
        if self.errors:
            msg += "\n\nErrors:"
            for error in self.errors:
                msg += f"\n  • {error}"
        return msg


class SignalModelError(EigenSenseError):
    """Raised when sample generation preconditions are violated."""
    pass


class EigenError(EigenSenseError):
    """Raised when a covariance matrix cannot be decomposed."""
    pass


class DistributionError(EigenSenseError):
    """Raised when a limiting law cannot be evaluated or tabulated."""
    pass


class TableCacheError(DistributionError):
    """Raised when a cached distribution table is missing, stale or unsafe."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path

    def __str__(self):
        msg = super().__str__()
        if self.path:
            msg += f" (cache file: {self.path})"
        return msg


class DetectionError(EigenSenseError):
    """Raised when a detector or its calibration receives invalid input."""
    pass


class BaselineError(DetectionError):
    """Raised when the large-(K, N) baseline lacks its Tracy-Widom input."""
    pass


class ExperimentError(EigenSenseError):
    """Raised when an experiment or its output fails at runtime."""
    pass
