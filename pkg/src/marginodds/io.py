"""CSV and JSON output.  Every file is written to a temporary name and renamed."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .diagnostics import ConcentrationTable, DensityCurve, KsResult
from .errors import DomainError
from .samplers import WeightedSample
from .special import CFGrid

CF_COLUMNS = ("t", "re_u", "im_u", "re_c", "im_c", "abs_diff")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return write_atomic(path, csv_text(header, rows))


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [row for row in reader]
    cols = list(zip(*data)) if data else [()] * len(header)
    out = {}
    for name, col in zip(header, cols):
        try:
            out[name] = np.array(col, dtype=float)
        except ValueError:
            out[name] = np.array(col)
    return out


def cf_pair_rows(u: CFGrid, c: CFGrid):
    if u.t.shape != c.t.shape or np.any(u.t != c.t):
        raise DomainError("characteristic functions are on different grids")
    diff = np.abs(u.values - c.values)
    for t, vu, vc, d in zip(u.t, u.values, c.values, diff):
        yield (t, vu.real, vu.imag, vc.real, vc.imag, d)


def write_cf_pair(path, u: CFGrid, c: CFGrid) -> Path:
    return write_csv(path, CF_COLUMNS, cf_pair_rows(u, c))


def write_weighted_sample(path, s: WeightedSample) -> Path:
    if s.values.ndim != 1:
        raise DomainError("write one column of the sample at a time")
    return write_csv(path, ("value", "weight"), zip(s.values, s.weights))


def write_density(path, curve: DensityCurve) -> Path:
    return write_csv(path, ("grid", "density"), zip(curve.grid, curve.density))


def write_concentration(path, table: ConcentrationTable) -> Path:
    return write_csv(path, ("n", "variance"), table.rows())


def write_json(path, obj) -> Path:
    if isinstance(obj, KsResult):
        text = obj.to_json()
    else:
        text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default)
    return write_atomic(path, text + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, KsResult):
        return json.loads(o.to_json())
    raise TypeError(f"cannot serialize {type(o).__name__}")
