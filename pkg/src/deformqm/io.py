"""CSV/JSON output helpers.

All floats go out in 15-significant-digit scientific notation so that runs
with identical settings produce identical bytes.
"""

import csv
import json
import math

import numpy as np


def fmt(value):
    """Format one field for CSV output."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.14e}"
    return str(value)


def write_csv(stream, header, rows):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def read_csv(stream):
    """Return ``(header, rows)``; numeric fields are parsed as floats."""
    reader = csv.reader(stream)
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader if row]
    return header, rows


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        # 15 significant digits, matching the CSV output
        return float(f"{v:.14e}") if math.isfinite(v) else str(v)
    if isinstance(value, complex):
        return [_jsonable(value.real), _jsonable(value.imag)]
    return value


def dump_json(obj, stream):
    json.dump(_jsonable(obj), stream, indent=2, sort_keys=False)
    stream.write("\n")
