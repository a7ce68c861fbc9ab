"""CSV/JSON writers with fixed schemas and atomic replacement."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

STATE_COLUMNS = ("n", "re", "im", "mass")
PROBE_COLUMNS = ("t", "error")
QUADRATURE_COLUMNS = ("j", "lambda_j", "w_j")


def fmt(x) -> str:
    """17 significant digits for floats, plain text for integers."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_state_csv(path, state) -> Path:
    state = np.asarray(state, dtype=complex)
    mass = np.abs(state) ** 2
    rows = ((n, z.real, z.imag, m) for n, (z, m) in enumerate(zip(state, mass)))
    return atomic_write_text(path, csv_text(STATE_COLUMNS, rows))


def write_probe_csv(path, times, errors) -> Path:
    return atomic_write_text(path, csv_text(PROBE_COLUMNS, zip(times, errors)))


def write_quadrature_csv(path, nodes, weights) -> Path:
    rows = ((j, x, w) for j, (x, w) in enumerate(zip(nodes, weights)))
    return atomic_write_text(path, csv_text(QUADRATURE_COLUMNS, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, obj) -> Path:
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    return atomic_write_text(path, text)


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
