"""CSV and JSON readers/writers shared by the CLI and the harness."""

import csv
import json
import math

import numpy as np

from .errors import InvalidInput


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_csv_matrix(path):
    """Numeric CSV to a 2-d float array.

    A single header row is skipped when its first row is not entirely
    numeric.  Blank lines are ignored; ragged or non-numeric rows raise
    :class:`InvalidInput`.
    """
    with open(path, newline="") as fh:
        rows = [[tok.strip() for tok in row] for row in csv.reader(fh)]
    rows = [r for r in rows if any(r)]
    if rows and not all(_is_number(t) for t in rows[0]):
        rows = rows[1:]
    if not rows:
        raise InvalidInput(f"{path}: no numeric rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InvalidInput(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
        try:
            out[i] = [float(t) for t in row]
        except ValueError as exc:
            raise InvalidInput(f"{path}: row {i + 1}: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise InvalidInput(f"{path}: non-finite values")
    return out


def format_number(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else format(v, ".17g")
    return str(v)


def write_csv_matrix(fh, matrix):
    writer = csv.writer(fh, lineterminator="\n")
    for row in np.atleast_2d(np.asarray(matrix)):
        writer.writerow([format_number(v) for v in row])


def write_csv_rows(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(row[h]) for h in header])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError("non-finite number in JSON output")
        return v
    return obj


def dumps(obj):
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def read_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: invalid JSON: {exc}") from exc
