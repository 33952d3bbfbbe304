"""Rendering of result rows as aligned text, CSV or versioned JSON."""
import csv
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
import io
import json
import math

SCHEMA_VERSION = 1
_Q = Decimal("0.0001")


def fmt4(v):
    """4-decimal half-up rendering; inf/nan/None get fixed spellings."""
    if v is None:
        return "NA"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, Enum):
        return str(v.value)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        # repr gives the shortest string that round-trips, so half-up acts on
        # the decimal the user would see rather than the binary expansion
        return str(Decimal(repr(v)).quantize(_Q, rounding=ROUND_HALF_UP))
    return str(v)


def render_text(columns, rows):
    cells = [[fmt4(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, Enum):
        return str(v.value)
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))
    return str(v)


def render_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_value(r.get(c)) for c in columns])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def render_json(command, params, rows, extra=None):
    doc = {"schema_version": SCHEMA_VERSION, "command": command,
           "params": _json_value(params), "rows": _json_value(rows)}
    if extra:
        doc.update(_json_value(extra))
    return json.dumps(doc, indent=2) + "\n"


def _decode(v):
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    if isinstance(v, dict):
        return {k: _decode(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


def load_json(text):
    """Parse a JSON report, restoring infinite values."""
    doc = json.loads(text)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    return _decode(doc)


def render(fmt, command, params, columns, rows, extra=None):
    if fmt == "json":
        return render_json(command, params, rows, extra)
    if fmt == "csv":
        return render_csv(columns, rows)
    return render_text(columns, rows)
