"""Delimited output.  Every file starts with a ``# revival <version> config=<hash>`` line."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def write_csv(path, stamp: str, header, rows, comments=()) -> Path:
    """Write ``rows`` under a stamp line and a header; ``comments`` go after the rows."""
    buf = io.StringIO()
    buf.write(f"# {stamp}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for c in comments:
        buf.write(f"# {c}\n")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_csv(path):
    """Return ``(stamp, header, rows)``; rows are lists of strings, comments dropped."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    stamp = lines[0][2:] if lines and lines[0].startswith("# ") else ""
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    if not body:
        return stamp, [], []
    rows = list(csv.reader(body))
    return stamp, rows[0], rows[1:]


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt(x) if math.isinf(x) or math.isnan(x) else x
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_json(path, stamp: str, payload: dict) -> Path:
    """Single-line JSON whose first key is the stamp, so line 1 carries it."""
    doc = {"stamp": stamp}
    doc.update(jsonable(payload))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")
    return path


def write_trace(path, stamp: str, trace) -> Path:
    rows = zip(trace.times, trace.values.real, trace.values.imag, trace.abs2, trace.norm_drift)
    return write_csv(path, stamp, ["t", "re_A", "im_A", "abs_A2", "norm_drift"], rows)


def aligned_table(header, rows) -> str:
    cells = [list(map(str, header))] + [[fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)
