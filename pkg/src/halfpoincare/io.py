"""
File formats: coefficient tables (CSV), structured reports (JSON) and run
configuration files (INI).
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .series import FourierSeries

CSV_HEADER = ("n", "re", "im")


def _g17(x: float) -> str:
    return "%.17g" % x


def coefficients_to_csv(series: FourierSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for n, a in zip(series.n.tolist(), series.coeffs.tolist()):
        w.writerow((n, _g17(a.real), _g17(a.imag)))
    return buf.getvalue()


def write_coefficients_csv(path, series: FourierSeries) -> None:
    Path(path).write_text(coefficients_to_csv(series))


def read_coefficients_csv(path, m: float, h: float = 1.0) -> FourierSeries:
    """Read a table with columns n, re, im; n must run 1..K without gaps."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or tuple(rows[0].keys()) != CSV_HEADER:
        raise ValueError(f"expected header {','.join(CSV_HEADER)}")
    n = np.array([int(r["n"]) for r in rows])
    if not np.array_equal(n, np.arange(1, len(n) + 1)):
        raise ValueError("coefficient indices must be 1..K")
    a = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
    return FourierSeries(m, h, a)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def to_report_text(data: dict) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, non-finite floats as strings."""
    return json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n"


CONFIG_SCHEMA = {
    "group": {"level": int, "weight_numerator": int, "character": str},
    "numeric": {"c_bound": float, "n_terms": int, "tol": float, "threads": int, "gauge": str},
    "output": {"out": str, "format": str},
}


def load_config(path) -> dict:
    """Read an INI file with the sections and keys of CONFIG_SCHEMA into a flat dict."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise ValueError(f"cannot read config file {path}")
    out = {}
    for section in cp.sections():
        if section not in CONFIG_SCHEMA:
            raise ValueError(f"unknown config section [{section}]")
        for key, raw in cp[section].items():
            if key not in CONFIG_SCHEMA[section]:
                raise ValueError(f"unknown key {key!r} in [{section}]")
            try:
                out[key] = CONFIG_SCHEMA[section][key](raw)
            except ValueError as exc:
                raise ValueError(f"bad value for {key}: {raw!r}") from exc
    return out
