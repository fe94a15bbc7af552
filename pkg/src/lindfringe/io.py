"""Readers and writers for the plain-text file formats.

* parameter files and geometry files: ``key = value`` lines, ``#`` comments
  (schemas in :mod:`lindfringe.generator` and :mod:`lindfringe.fringe`);
* datasets: comma-separated, ``#`` comment lines, header ``x_nm,counts,port``;
* fit reports: ``key = value`` text plus JSON (schema in :data:`REPORT_SCHEMA`).
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .constants import gev_to_per_second
from .fitting import FringeDataset
from .fringe import InstrumentGeometry
from .generator import PARAM_NAMES, LindbladParams
from .state import Port

UNITS = ("per_second", "GeV")

GEOMETRY_KEYS = {
    "kappa_per_m": "kappa",
    "t0_s": "t0",
    "bragg_angle_rad": "bragg_angle",
    "velocity_m_s": "velocity",
    "theta0_rad": "theta0",
}
GEOMETRY_OPTIONAL = {"x1_m": "x1", "x2_m": "x2", "x3_m": "x3"}

REPORT_SCHEMA = {
    "schema": "lindfringe.fit-report/1",
    "fields": {
        "dataset": "path of the fitted dataset",
        "t0_s": "flight time (s)",
        "fit": "FitResult: n0 (counts), P, Q (dimensionless), theta0 (rad), chi2, dof, "
               "covariance over [n0, P, Q], converged, port",
        "contrast_source": "'visibility' | 'user' | 'two-time'",
        "estimate": "DissipativeEstimate: alpha, omega in s^-1 and GeV with errors, "
                    "contrast, phase_2omega_t0 (rad), flags",
        "second_fit": "FitResult of the second dataset (two-time mode only)",
    },
}


class ParseError(ValueError):
    """Malformed input file; ``lineno`` is 1-based (0 when not line-specific)."""

    def __init__(self, path, lineno, msg):
        self.path, self.lineno = str(path), lineno
        where = f"{path}:{lineno}" if lineno else str(path)
        super().__init__(f"{where}: {msg}")


def read_key_values(path) -> dict:
    """Parse ``key = value`` lines; returns ``{key: (value_str, lineno)}``."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(path, lineno, f"expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ParseError(path, lineno, f"empty key or value in {raw.strip()!r}")
        if key in out:
            raise ParseError(path, lineno, f"duplicate key {key!r}")
        out[key] = (value, lineno)
    return out


def _float(path, kv, key):
    value, lineno = kv[key]
    try:
        return float(value)
    except ValueError:
        raise ParseError(path, lineno, f"{key}: {value!r} is not a number") from None


def read_params(path) -> LindbladParams:
    """Load generator parameters, converting GeV files to s^-1."""
    kv = read_key_values(path)
    if "units" not in kv:
        raise ParseError(path, 0, "missing 'units' (per_second | GeV)")
    units, lineno = kv.pop("units")
    if units not in UNITS:
        raise ParseError(path, lineno, f"units must be one of {UNITS}, got {units!r}")
    allowed = set(PARAM_NAMES) | {"energy"}
    for key, (_, ln) in kv.items():
        if key not in allowed:
            raise ParseError(path, ln, f"unknown key {key!r}")
    missing = [k for k in PARAM_NAMES if k not in kv]
    if missing:
        raise ParseError(path, 0, f"missing keys: {', '.join(missing)}")
    values = {k: _float(path, kv, k) for k in kv}
    if units == "GeV":
        values = {k: gev_to_per_second(v) for k, v in values.items()}
    return LindbladParams(**values)


def write_params(path, p: LindbladParams):
    lines = ["# generator parameters", "units = per_second"]
    lines += [f"{k} = {getattr(p, k)!r}" for k in PARAM_NAMES]
    if p.energy:
        lines.append(f"energy = {p.energy!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_geometry(path) -> InstrumentGeometry:
    kv = read_key_values(path)
    for key, (_, ln) in kv.items():
        if key not in GEOMETRY_KEYS and key not in GEOMETRY_OPTIONAL:
            raise ParseError(path, ln, f"unknown key {key!r}")
    missing = [k for k in GEOMETRY_KEYS if k not in kv]
    if missing:
        raise ParseError(path, 0, f"missing keys: {', '.join(missing)}")
    fields = {attr: _float(path, kv, key) for key, attr in GEOMETRY_KEYS.items()}
    fields.update({attr: _float(path, kv, key) for key, attr in GEOMETRY_OPTIONAL.items() if key in kv})
    try:
        return InstrumentGeometry(**fields)
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def write_geometry(path, g: InstrumentGeometry):
    lines = [f"{key} = {getattr(g, attr)!r}" for key, attr in GEOMETRY_KEYS.items()]
    lines += [f"{key} = {getattr(g, attr)!r}" for key, attr in GEOMETRY_OPTIONAL.items()
              if getattr(g, attr)]
    Path(path).write_text("\n".join(lines) + "\n")


def _fmt_count(c) -> str:
    c = float(c)
    return str(int(c)) if c.is_integer() else repr(c)


def format_dataset(ds: FringeDataset, comments=()) -> str:
    buf = _io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    buf.write("x_nm,counts,port\n")
    for x, c in zip(ds.x, ds.counts):
        buf.write(f"{x * 1e9:.9f},{_fmt_count(c)},{ds.port.value}\n")
    return buf.getvalue()


def write_dataset(path, ds: FringeDataset, comments=()):
    Path(path).write_text(format_dataset(ds, comments))


def read_dataset(path, geometry: InstrumentGeometry, port=None) -> FringeDataset:
    """Load a dataset; rows of other ports are skipped when ``port`` is given."""
    want = Port.parse(port) if port is not None else None
    xs, counts, ports = [], [], []
    header_seen = False
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            row = next(csv.reader([line]))
            if not header_seen:
                if [s.strip() for s in row] != ["x_nm", "counts", "port"]:
                    raise ParseError(path, lineno, "header must be 'x_nm,counts,port'")
                header_seen = True
                continue
            if len(row) != 3:
                raise ParseError(path, lineno, f"expected 3 columns, got {len(row)}")
            try:
                x = float(row[0]) * 1e-9
                c = float(row[1])
                pt = Port.parse(row[2])
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
            if c < 0 or not math.isfinite(c):
                raise ParseError(path, lineno, f"invalid count {row[1]!r}")
            if want is not None and pt is not want:
                continue
            xs.append(x)
            counts.append(c)
            ports.append(pt)
    if not header_seen:
        raise ParseError(path, 0, "missing header")
    if not xs:
        raise ParseError(path, 0, "no samples")
    if len(set(ports)) > 1:
        raise ParseError(path, 0, "dataset mixes ports; select one with port=")
    counts = np.asarray(counts)
    if np.all(counts == np.round(counts)):
        counts = counts.astype(np.int64)
    try:
        return FringeDataset(np.asarray(xs), counts, ports[0], geometry)
    except ValueError as exc:
        raise ParseError(path, 0, str(exc)) from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def format_key_values(pairs) -> str:
    return "".join(f"{k} = {v}\n" for k, v in pairs)
