"""Deterministic JSON and CSV emission.

Floats are printed as decimals with 17 significant digits so doubles
round-trip exactly and identical inputs give byte-identical files.
Non-finite values become the strings "inf", "-inf" and "nan" in JSON,
which has no literals for them.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

__all__ = ["fmt_float", "json_text", "csv_text"]


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _json_value(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return fmt_float(x)
        return '"%s"' % fmt_float(x)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return '"%s"' % "".join(
            ch if ch >= " " else "\\u%04x" % ord(ch) for ch in out)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in obj:
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            items.append('%s%s: %s' % (inner, _json_value(key, 0),
                                       _json_value(obj[key], indent + 1)))
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [inner + _json_value(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, complex):
        return _json_value({"re": obj.real, "im": obj.imag}, indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def json_text(obj) -> str:
    """Render a report structure to a deterministic JSON document."""
    return _json_value(obj, 0) + "\n"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    if isinstance(v, str):
        if "," in v or '"' in v or "\n" in v:
            return '"%s"' % v.replace('"', '""')
        return v
    raise TypeError(f"cannot put {type(v).__name__} in CSV")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"
