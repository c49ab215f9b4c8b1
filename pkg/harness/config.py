"""
Experiment configuration.

An ExperimentSpec is a flat YAML mapping with typed fields. Values are
resolved with this precedence:

    built-in defaults  <  config file  <  command-line flags
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from core.errors import ConfigError
from core.streams import DEFAULT_SEED
from core.types import DetectorKind, Scenario, ValueCase

DEFAULT_PFA_GRID = [round(0.02 * k, 10) for k in range(1, 11)]

ExperimentKind = Literal["cdf", "threshold", "detection", "sweep"]


class ExperimentSpec(BaseModel):
    experiment: ExperimentKind = Field(
        default="cdf",
        description="Which experiment to run: cdf, threshold, detection or sweep."
    )

    # Scenario
    K: int = Field(default=2, description="Number of antennas.")
    N: int = Field(default=1000, description="Samples per antenna.")
    case: ValueCase = Field(default=ValueCase.REAL, description="real or complex Gaussian model.")
    scenario: Scenario = Field(default=Scenario.S0, description="S0 (noise only) or S1 (signal present).")
    t: int = Field(default=1, description="Number of primary signals under S1.")
    sigma_s2: float = Field(default=1.0, description="Per-element signal variance.")
    sigma_u2: float = Field(default=1.0, description="Per-element noise variance.")
    channel: Optional[Union[Literal["random"], List[List[float]]]] = Field(
        default=None,
        description="K x t channel rows, 'random' for one N(0, 1) draw, or omitted for all ones."
    )
    snr_db: Optional[float] = Field(
        default=None,
        description="Target SNR in dB; the channel is rescaled to hit it."
    )
    seed: int = Field(default=DEFAULT_SEED, description="Master seed (unsigned 64-bit).")

    # Detection
    detector: DetectorKind = Field(default=DetectorKind.MED, description="MED or CND.")
    n_runs: int = Field(default=10000, description="Monte Carlo runs per scenario.")
    pfa_grid: List[float] = Field(
        default_factory=lambda: list(DEFAULT_PFA_GRID),
        description="Target false-alarm probabilities, strictly increasing in (0, 1)."
    )
    calibration: Literal["simulation", "theory"] = Field(
        default="simulation",
        description="Detection thresholds from S0 simulation or from the fixed-K law."
    )
    leading: Literal["general", "printed"] = Field(
        default="general",
        description="Leading-block law of the S1 condition-number convolution."
    )
    rel_tol: float = Field(
        default=1e-9,
        description="Relative gap below which population eigenvalues count as equal."
    )

    # Sweep
    sweep_axis: Optional[Literal["snr_db", "N"]] = Field(
        default=None,
        description="Quantity varied by a sweep experiment."
    )
    sweep_values: List[float] = Field(
        default_factory=list,
        description="Values taken by the sweep axis."
    )

    # Inputs and outputs
    tracy_widom: Optional[str] = Field(
        default=None,
        description="Tracy-Widom percentile table (YAML); the bundled table when omitted."
    )
    output_path: Optional[str] = Field(
        default=None,
        description="Where to write results; standard output when omitted."
    )
    emit: Literal["csv", "json"] = Field(default="csv", description="Output format.")
    workers: int = Field(default=1, description="Worker processes for Monte Carlo runs.")
    chunk_size: int = Field(
        default=250,
        description="Runs per work unit; fixed so results do not depend on the worker count."
    )

    @field_validator("case", mode="before")
    @classmethod
    def _parse_case(cls, value):
        return ValueCase.parse(value)

    @field_validator("scenario", mode="before")
    @classmethod
    def _parse_scenario(cls, value):
        return Scenario.parse(value)

    @field_validator("detector", mode="before")
    @classmethod
    def _parse_detector(cls, value):
        return DetectorKind.parse(value)

    @model_validator(mode="after")
    def _check(self) -> "ExperimentSpec":
        errors = collect_errors(self)
        if errors:
            raise ValueError("; ".join(errors))
        return self


def collect_errors(spec: ExperimentSpec) -> List[str]:
    errors = []

    if spec.K < 1:
        errors.append(f"K: must be >= 1, got {spec.K}")
    if spec.N < 1:
        errors.append(f"N: must be >= 1, got {spec.N}")
    if spec.t < 1:
        errors.append(f"t: must be >= 1, got {spec.t}")
    if not spec.sigma_u2 > 0:
        errors.append(f"sigma_u2: must be > 0, got {spec.sigma_u2}")
    if spec.sigma_s2 < 0:
        errors.append(f"sigma_s2: must be >= 0, got {spec.sigma_s2}")
    if not 0 <= spec.seed < 2 ** 64:
        errors.append(f"seed: must be an unsigned 64-bit integer, got {spec.seed}")
    if spec.n_runs < 1:
        errors.append(f"n_runs: must be >= 1, got {spec.n_runs}")
    if spec.workers < 1:
        errors.append(f"workers: must be >= 1, got {spec.workers}")
    if spec.chunk_size < 1:
        errors.append(f"chunk_size: must be >= 1, got {spec.chunk_size}")
    if not spec.rel_tol >= 0:
        errors.append(f"rel_tol: must be >= 0, got {spec.rel_tol}")

    if not spec.pfa_grid:
        errors.append("pfa_grid: must not be empty")
    elif any(not 0.0 < p < 1.0 for p in spec.pfa_grid):
        errors.append(f"pfa_grid: values must lie in (0, 1), got {spec.pfa_grid}")
    elif any(a >= b for a, b in zip(spec.pfa_grid, spec.pfa_grid[1:])):
        errors.append(f"pfa_grid: values must be strictly increasing, got {spec.pfa_grid}")

    if spec.detector is DetectorKind.CND and spec.K < 2:
        errors.append(f"detector: CND needs K >= 2, got K={spec.K}")

    if isinstance(spec.channel, list):
        shape_ok = len(spec.channel) == spec.K and all(len(row) == spec.t for row in spec.channel)
        if not shape_ok:
            errors.append(f"channel: expected {spec.K} rows of {spec.t} values")
        elif not any(v != 0 for row in spec.channel for v in row):
            errors.append("channel: must have at least one nonzero entry")

    if spec.experiment == "threshold" and spec.scenario is not Scenario.S0:
        errors.append("scenario: the threshold experiment runs under S0")

    if spec.experiment in ("detection", "sweep"):
        if spec.scenario is not Scenario.S1:
            errors.append(f"scenario: the {spec.experiment} experiment needs S1")
        if not spec.sigma_s2 > 0:
            errors.append("sigma_s2: must be > 0 under S1 (the signal must change the spectrum)")

    if spec.experiment == "sweep":
        if spec.sweep_axis is None:
            errors.append("sweep_axis: required for a sweep (snr_db or N)")
        if not spec.sweep_values:
            errors.append("sweep_values: required for a sweep")
        if spec.sweep_axis == "N" and any(v < 1 or v != int(v) for v in spec.sweep_values):
            errors.append(f"sweep_values: N values must be positive integers, got {spec.sweep_values}")

    return errors


# -------------------------
# LOADING AND SAVING
# -------------------------

def _config_error(e: ValidationError) -> ConfigError:
    messages = []
    for item in e.errors():
        location = ".".join(str(part) for part in item.get("loc", ()))
        text = item.get("msg", "invalid value")
        if text.startswith("Value error, "):
            text = text[len("Value error, "):]
        for piece in text.split("; "):
            messages.append(f"{location}: {piece}" if location else piece)
    return ConfigError("Invalid experiment configuration", errors=messages)


def build_spec(data: Dict[str, Any]) -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise _config_error(e) from e


def load_spec(path: Path) -> ExperimentSpec:
    """Read an ExperimentSpec from a YAML file."""
    return build_spec(load_spec_data(path))


def load_spec_data(path: Path) -> Dict[str, Any]:
    """Raw field mapping of a YAML config file, not yet validated."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in config file {path}", errors=[str(e)])

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a mapping of fields")
    return data


def spec_to_dict(spec: ExperimentSpec) -> Dict[str, Any]:
    return spec.model_dump(mode="json")


def dump_spec(spec: ExperimentSpec) -> str:
    return yaml.safe_dump(spec_to_dict(spec), sort_keys=False)


def save_spec(spec: ExperimentSpec, path: Path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_spec(spec))


def apply_overrides(spec: ExperimentSpec, **overrides) -> ExperimentSpec:
    """Return a new spec with every non-None override applied."""
    data = spec_to_dict(spec)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return build_spec(data)
