"""CSV / JSON serialization of solution profiles and branches.

CSV files start with ``# key=value`` metadata lines, then a mandatory
header line, then one row per sample. Floats are written with 17
significant digits so that a round trip is bit-exact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import __version__

PROFILE_COLUMNS = ("x", "u")
BRANCH_COLUMNS = ("xi", "lambda", "b", "sup_norm", "residual_J", "residual_shoot")


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def _parse_scalar(text: str):
    text = text.strip()
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _flatten(meta: dict, prefix: str = "") -> list[tuple[str, object]]:
    out = []
    for key, val in meta.items():
        if isinstance(val, dict):
            out.extend(_flatten(val, f"{prefix}{key}."))
        else:
            out.append((prefix + key, val))
    return out


def _unflatten(pairs) -> dict:
    meta: dict = {}
    for key, val in pairs:
        node = meta
        *parents, leaf = key.split(".")
        for p in parents:
            node = node.setdefault(p, {})
        node[leaf] = val
    return meta


def _json_float(v):
    v = float(v)
    return v if math.isfinite(v) else None


def dumps_table(meta: dict, columns, rows, fmt_name: str) -> str:
    meta = {"version": __version__, **meta}
    if fmt_name == "csv":
        lines = [f"# {k}={fmt(v)}" for k, v in _flatten(meta)]
        lines.append(",".join(columns))
        lines.extend(",".join(fmt(float(x)) for x in row) for row in rows)
        return "\n".join(lines) + "\n"
    if fmt_name == "json":
        doc = {"meta": meta, "columns": list(columns),
               "rows": [[_json_float(x) for x in row] for row in rows]}
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt_name!r}")


def loads_table(text: str, fmt_name: str):
    """Inverse of :func:`dumps_table`: (meta, columns, 2-D float array)."""
    if fmt_name == "json":
        doc = json.loads(text)
        rows = [[math.nan if x is None else x for x in r] for r in doc["rows"]]
        arr = np.array(rows, dtype=float).reshape(len(rows), len(doc["columns"]))
        return doc["meta"], tuple(doc["columns"]), arr
    if fmt_name != "csv":
        raise ValueError(f"unknown format {fmt_name!r}")
    meta_pairs, data, columns = [], [], None
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta_pairs.append((key.strip(), _parse_scalar(val)))
        elif columns is None:
            columns = tuple(c.strip() for c in line.split(","))
        else:
            data.append([float(x) for x in line.split(",")])
    if columns is None:
        raise ValueError("missing header line")
    arr = np.array(data, dtype=float).reshape(len(data), len(columns))
    return _unflatten(meta_pairs), columns, arr


def format_for(path: str | Path, explicit: str | None = None) -> str:
    if explicit:
        return explicit
    return "json" if str(path).lower().endswith(".json") else "csv"


def write_table(path, meta, columns, rows, fmt_name=None) -> Path:
    path = Path(path)
    fmt_name = format_for(path, fmt_name)
    path.write_text(dumps_table(meta, columns, rows, fmt_name))
    return path


def read_table(path, fmt_name=None):
    path = Path(path)
    return loads_table(path.read_text(), format_for(path, fmt_name))
