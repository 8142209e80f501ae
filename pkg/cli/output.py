"""
Report writers. Numbers are rounded to the configured significant digits;
CSV always uses '.' as the decimal separator.
"""

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

import numpy as np

from core.settings_store import settings


def _digits() -> int:
    return int(settings.get("output.digits"))


def format_number(value: float, digits: Optional[int] = None) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{digits or _digits()}g")


def rounded(obj: Any, digits: Optional[int] = None) -> Any:
    """Deep copy with floats cut to `digits` significant digits; non-finite floats become strings."""
    digits = digits or _digits()
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return format_number(value)
        return float(format(value, f".{digits}g"))
    if isinstance(obj, dict):
        return {str(k): rounded(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return rounded(obj.tolist(), digits)
    return obj


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, 'w', encoding='utf-8', newline='') as f:
        f.write(text)


def json_text(payload: Any) -> str:
    return json.dumps(rounded(payload), indent=2, sort_keys=True) + "\n"


def write_json(payload: Any, out: Optional[Path] = None):
    _emit(json_text(payload), out)


def csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_number(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_cell(v) for v in value)
    return str(value)


def write_csv(header: Sequence[str], rows: List[Sequence[Any]], out: Optional[Path] = None):
    _emit(csv_text(header, rows), out)
