"""
CSV and JSON emission of run results.

Output is byte-stable for identical input: numbers are rounded to 12
significant digits, complex numbers become [re, im] pairs and non-finite
values are written as strings.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from ..models.data_models import DensityOperator, HermitianOperator, OutputFormat, Projector

SCHEMA_VERSION = 1
SIGNIFICANT_DIGITS = 12

PathLike = Union[str, Path]


def format_number(value: float) -> Union[float, str]:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    rounded = float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    return 0.0 if rounded == 0 else rounded


def to_plain(value: Any) -> Any:
    """Convert results into JSON-ready Python values."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (HermitianOperator, DensityOperator, Projector)):
        return to_plain(value.matrix)
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        if value.imag == 0:
            return format_number(float(value.real))
        return [format_number(float(value.real)), format_number(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        return format_number(float(value))
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    return value


class ResultWriter:
    """Writes payloads as JSON documents or row tables as CSV."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def _emit(self, text: str, path: Optional[PathLike]) -> None:
        if path is None:
            sys.stdout.write(text)
            return
        Path(path).write_text(text, encoding="utf-8")
        self.logger.info(f"Wrote {len(text)} characters to {path}")

    def json_text(self, payload: Dict[str, Any]) -> str:
        document = {"schema": SCHEMA_VERSION}
        document.update(to_plain(payload))
        return json.dumps(document, indent=2) + "\n"

    def csv_text(self, rows: Sequence[Dict[str, Any]], fieldnames: Optional[List[str]] = None) -> str:
        """Rows as CSV; columns default to the keys of the first row."""
        if fieldnames is None:
            fieldnames = list(rows[0].keys()) if rows else []
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(to_plain(v)) for k, v in row.items()})
        return buffer.getvalue()

    def write_json(self, payload: Dict[str, Any], path: Optional[PathLike] = None) -> None:
        self._emit(self.json_text(payload), path)

    def write_csv(self, rows: Sequence[Dict[str, Any]], path: Optional[PathLike] = None,
                  fieldnames: Optional[List[str]] = None) -> None:
        self._emit(self.csv_text(rows, fieldnames), path)

    def write(self, payload: Dict[str, Any], output_format: OutputFormat, path: Optional[PathLike] = None) -> None:
        """
        Write a command result.

        Payloads holding a "rows" table are written row by row in CSV; other
        payloads become a single CSV row of their scalar fields.
        """
        if output_format == "json":
            self.write_json(payload, path)
            return
        if "rows" in payload:
            self.write_csv(payload["rows"], path, payload.get("columns"))
            return
        scalars = {k: v for k, v in payload.items() if _is_scalar(v)}
        self.write_csv([scalars], path)


def _is_scalar(value: Any) -> bool:
    return isinstance(value, (str, bool, int, float, complex, np.generic, Enum)) or value is None


def _csv_cell(value: Any) -> Any:
    if isinstance(value, list):
        return json.dumps(value)
    if value is None:
        return ""
    return value
