"""Flat-file datasets: fixed-column CSV and ``{"meta", "data"}`` JSON.

Reals are written with 17 significant digits so 64-bit floats round-trip
exactly. Quantities undefined at a sample (Frenet data at geodesic points)
are written as ``nan`` in CSV and ``null`` in JSON.
"""
import contextlib
import csv
import json
import math
import sys

import numpy as np

from . import geometry as geo
from .errors import ParseError
from .frames import CurveSeries

# The first twelve columns are the documented dataset; the rest carry the
# exact derivatives so that a re-parsed file reproduces the analysis.
DATASET_COLUMNS = (
    "s", "x", "y", "z", "a", "b", "v", "kappa", "tau", "eta_T", "eta_N", "eta_B",
    "da", "db", "dv", "dx", "dy", "dz", "ddx", "ddy", "ddz",
)


def fmt(value):
    if value is None:
        return "nan"
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".17g")


def series_columns(series, frames=None):
    """Column arrays for a curve dataset; Frenet columns need ``frames``."""
    n = len(series)
    T = series.tangent
    dT = series.tangent_derivative
    u = series.u if series.u is not None else geo.frame_to_coord(series.p, T)
    du = series.du if series.du is not None else geo.frame_to_coord(series.p, dT)
    frenet = {name: np.full(n, np.nan) for name in ("kappa", "tau", "eta_T", "eta_N", "eta_B")}
    frenet["eta_T"] = T[:, 2].copy()
    if frames is not None:
        idx = frames.index
        frenet["kappa"][idx] = frames.kappa
        frenet["tau"][idx] = frames.tau
        frenet["eta_N"][idx] = frames.eta_N
        frenet["eta_B"][idx] = frames.eta_B
    cols = {
        "s": series.s,
        "x": series.p[:, 0], "y": series.p[:, 1], "z": series.p[:, 2],
        "a": T[:, 0], "b": T[:, 1], "v": T[:, 2],
        **frenet,
        "da": dT[:, 0], "db": dT[:, 1], "dv": dT[:, 2],
        "dx": u[:, 0], "dy": u[:, 1], "dz": u[:, 2],
        "ddx": du[:, 0], "ddy": du[:, 1], "ddz": du[:, 2],
    }
    return {name: cols[name] for name in DATASET_COLUMNS}


def write_csv(stream, columns):
    names = list(columns)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(names)
    arrays = [np.asarray(columns[name]) for name in names]
    for row in zip(*arrays):
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return None if not math.isfinite(obj) else float(fmt(obj))
    return obj


def dumps_json(meta, data):
    return json.dumps({"meta": _jsonable(meta), "data": _jsonable(data)},
                      indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_json(stream, meta, data):
    stream.write(dumps_json(meta, data))


def flatten(obj, prefix=""):
    """Flatten nested dicts/lists into ``(key, value)`` rows for CSV reports."""
    rows = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            rows += flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            rows += flatten(v, f"{prefix}[{i}]")
    else:
        rows.append((prefix, obj))
    return rows


def write_report(stream, meta, data, fmt_name):
    if fmt_name == "json":
        write_json(stream, meta, data)
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in flatten(_jsonable({"meta": meta, "data": data})):
        if isinstance(value, float):
            value = fmt(value)
        writer.writerow([key, "" if value is None else value])


def open_output(path):
    if path in (None, "-"):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _parse_float(text, row, col):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ParseError(f"row {row}, column {col!r}: cannot parse {text!r} as a number")


def _to_series(cols, source):
    for name in ("s", "x", "y", "z"):
        if name not in cols:
            raise ParseError(f"missing required column {name!r}")

    def vec(a, b, c):
        if all(k in cols for k in (a, b, c)):
            return np.stack([cols[a], cols[b], cols[c]], axis=-1)
        return None

    p = vec("x", "y", "z")
    try:
        return CurveSeries(cols["s"], p, vec("dx", "dy", "dz"), vec("ddx", "ddy", "ddz"), None,
                           source, vec("a", "b", "v"), vec("da", "db", "dv"))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


_REQUIRED_FINITE = ("s", "x", "y", "z", "a", "b", "v", "da", "db", "dv",
                    "dx", "dy", "dz", "ddx", "ddy", "ddz")


def read_csv_series(stream, source="integrated"):
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file: a header row is required") from None
    header = [h.strip() for h in header]
    data = {name: [] for name in header}
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
        for name, text in zip(header, row):
            value = _parse_float(text, row_no, name)
            if name in _REQUIRED_FINITE and not math.isfinite(value):
                raise ParseError(f"row {row_no}, column {name!r}: non-finite value")
            data[name].append(value)
    cols = {k: np.array(v, dtype=float) for k, v in data.items()}
    return _to_series(cols, source)


def read_json_series(stream, source=None):
    try:
        doc = json.load(stream)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or "data" not in doc:
        raise ParseError("JSON dataset must be an object with 'meta' and 'data'")
    data = doc["data"]
    if source is None:
        source = doc.get("meta", {}).get("source", "integrated")
    cols = {}
    for name, values in data.items():
        if not isinstance(values, list):
            continue
        arr = []
        for row_no, v in enumerate(values):
            if v is None and name not in _REQUIRED_FINITE:
                arr.append(float("nan"))
            else:
                arr.append(_parse_float(v, row_no, name))
        cols[name] = np.array(arr, dtype=float)
    return _to_series(cols, source)


def read_series(path, source=None):
    with open(path, newline="") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == "{":
            return read_json_series(fh, source)
        return read_csv_series(fh, source or "integrated")
