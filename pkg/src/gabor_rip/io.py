"""CSV/JSON tables and the complex-vector/matrix text formats.

Tables are lists of flat dicts.  In CSV every number is written with six
significant digits; JSON keeps full precision.  Vector (``index,re,im``)
and matrix (``row,col,re,im``) files are data interchange and keep full
``repr`` precision so they round-trip exactly.
"""
import csv
import io
import json
import math

import numpy as np

from .errors import DimensionError


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_table(rows, columns, fmt="csv", header=True):
    """Serialize ``rows`` (dicts) restricted to ``columns``."""
    if fmt == "json":
        data = [{c: _json_value(r[c]) for c in columns} for r in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(columns)
    for r in rows:
        writer.writerow([format_value(r[c]) for c in columns])
    return buf.getvalue()


def parse_table(text):
    """Inverse of :func:`render_table` for CSV: ``(columns, rows)`` of strings."""
    reader = csv.reader(io.StringIO(text))
    try:
        columns = next(reader)
    except StopIteration:
        return [], []
    rows = [dict(zip(columns, rec)) for rec in reader if rec]
    return columns, rows


def render_vector(v, fmt="csv"):
    v = np.asarray(v, dtype=complex).ravel()
    rows = [{"index": i, "re": float(z.real), "im": float(z.imag)} for i, z in enumerate(v)]
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    lines = ["index,re,im"]
    lines += [f"{r['index']},{r['re']!r},{r['im']!r}" for r in rows]
    return "\n".join(lines) + "\n"


def parse_vector(text):
    columns, rows = parse_table(text)
    if columns[:3] != ["index", "re", "im"]:
        raise DimensionError(f"vector file needs header index,re,im, got {columns}")
    out = np.zeros(len(rows), dtype=complex)
    for expect, r in enumerate(rows):
        if int(r["index"]) != expect:
            raise DimensionError("vector indices must ascend from 0 without gaps")
        out[expect] = complex(float(r["re"]), float(r["im"]))
    return out


def render_matrix(M):
    M = np.asarray(M, dtype=complex)
    lines = ["row,col,re,im"]
    for (i, j), z in np.ndenumerate(M):
        lines.append(f"{i},{j},{float(z.real)!r},{float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def parse_matrix(text):
    columns, rows = parse_table(text)
    if columns[:4] != ["row", "col", "re", "im"]:
        raise DimensionError(f"matrix file needs header row,col,re,im, got {columns}")
    shape = (max(int(r["row"]) for r in rows) + 1, max(int(r["col"]) for r in rows) + 1)
    M = np.zeros(shape, dtype=complex)
    for r in rows:
        M[int(r["row"]), int(r["col"])] = complex(float(r["re"]), float(r["im"]))
    return M
