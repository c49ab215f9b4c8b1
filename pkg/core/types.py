"""
Shared enumerations for eigensense.

Every sampler, law and detector branches on these tags, so they are
defined once here and imported wherever needed.
"""

from enum import Enum


class ValueCase(str, Enum):
    """Real- or complex-valued Gaussian sample model."""
    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def parse(cls, value) -> "ValueCase":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


class Scenario(str, Enum):
    """S0: noise only. S1: noise plus active primary signals."""
    S0 = "S0"
    S1 = "S1"

    @classmethod
    def parse(cls, value) -> "Scenario":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().upper())


class DetectorKind(str, Enum):
    """Maximum-eigenvalue or condition-number detection."""
    MED = "MED"
    CND = "CND"

    @classmethod
    def parse(cls, value) -> "DetectorKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().upper())


class Hypothesis(str, Enum):
    H0 = "H0"
    H1 = "H1"
