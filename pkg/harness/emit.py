"""
Serialization of experiment results.

CSV holds the records only, under a fixed header; JSON holds
{"spec", "metadata", "records"}. Floats are written with 12 significant
digits and keys keep their insertion order, so identical results give
identical bytes.

Serialization is intentionally dumb and deterministic.
"""

import csv
import json
import math
from io import StringIO
from pathlib import Path
from typing import Any, Dict, Optional

from core.errors import ExperimentError
from .experiments import ExperimentResult

FLOAT_FORMAT = ".12g"


def format_float(value: float) -> str:
    return format(value, FLOAT_FORMAT)


def _round(value: Any) -> Any:
    """Round every float in a nested structure to 12 significant digits."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(format_float(value))
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    return value


def _metadata(result: ExperimentResult, timing: bool) -> Dict[str, Any]:
    metadata = dict(result.metadata)
    if timing:
        metadata["wall_time_s"] = result.wall_time
    return metadata


class ResultSerializer:
    """Base serializer interface."""

    @staticmethod
    def serialize(result: ExperimentResult, timing: bool = False) -> str:
        raise NotImplementedError


# -------------------------
# CSV SERIALIZATION
# -------------------------

class CSVResultSerializer(ResultSerializer):
    """Records only; metadata goes to a JSON side file when writing to disk."""

    @staticmethod
    def _cell(value: Any) -> str:
        if value is None:
            return ""
        if isinstance(value, float):
            return format_float(value)
        return str(value)

    @staticmethod
    def serialize(result: ExperimentResult, timing: bool = False) -> str:
        output = StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(result.columns)
        for record in result.records:
            writer.writerow([CSVResultSerializer._cell(record[c]) for c in result.columns])
        return output.getvalue()

    @staticmethod
    def sidecar(result: ExperimentResult, timing: bool = False) -> Optional[str]:
        return json.dumps(_round(_metadata(result, timing)), indent=2, ensure_ascii=False) + "\n"


# -------------------------
# JSON SERIALIZATION
# -------------------------

class JSONResultSerializer(ResultSerializer):

    @staticmethod
    def serialize(result: ExperimentResult, timing: bool = False, indent: int = 2) -> str:
        document = {
            "spec": result.spec_dict(),
            "metadata": _metadata(result, timing),
            "records": result.records,
        }
        return json.dumps(_round(document), indent=indent, ensure_ascii=False) + "\n"

    @staticmethod
    def sidecar(result: ExperimentResult, timing: bool = False) -> Optional[str]:
        return None


# -------------------------
# FORMAT REGISTRY
# -------------------------

SERIALIZERS = {
    "csv": CSVResultSerializer,
    "json": JSONResultSerializer,
}


def _serializer(format: str):
    serializer = SERIALIZERS.get(format.lower())
    if not serializer:
        raise ExperimentError(
            f"Unknown format '{format}'. "
            f"Available formats: {', '.join(SERIALIZERS)}"
        )
    return serializer


def serialize(result: ExperimentResult, format: str = "csv", timing: bool = False) -> str:
    return _serializer(format).serialize(result, timing=timing)


def sidecar_path(filepath: Path) -> Path:
    return filepath.with_name(filepath.name + ".meta.json")


def emit(result: ExperimentResult, filepath: Path, format: Optional[str] = None,
         timing: bool = False) -> Path:
    """
    Write a result to filepath; the format defaults to the file suffix.

    CSV output gets a metadata side file next to it.
    """
    filepath = Path(filepath)
    fmt = format or filepath.suffix.lstrip(".") or "csv"
    serializer = _serializer(fmt)

    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, "w", encoding="utf-8", newline="") as f:
            f.write(serializer.serialize(result, timing=timing))
        side = serializer.sidecar(result, timing=timing)
        if side is not None:
            with open(sidecar_path(filepath), "w", encoding="utf-8") as f:
                f.write(side)
    except OSError as e:
        raise ExperimentError(f"Cannot write results to {filepath}: {e}")
    return filepath
