"""File formats and deterministic serialisation.

Polygons are read from JSON ``{"closed": bool, "vertices": [[x, y, ...], ...]}``
or from CSV (one vertex per row, optional header). Manifold polygons use
JSON ``{"geometry": "sphere"|"disk", "closed": bool, "vertices": [...]}``.
Output floats carry 17 significant digits and exact rationals are written
as ``"n/d"``; every file is written to a temporary sibling and renamed into
place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import re
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from bhsubdiv.errors import InputError, UnknownSchemeError
from bhsubdiv.euclid import Polygon
from bhsubdiv.manifold import ManifoldPolygon
from bhsubdiv.rational import rat_from_str, rat_to_str
from bhsubdiv.stencils import BUILTIN_SCHEMES, RationalMask, builtin_mask, derive_hierarchy_mask

__all__ = [
    "MissingInputError",
    "MalformedInputError",
    "dumps_json",
    "fmt_float",
    "format_csv",
    "read_mask",
    "read_manifold_polygon",
    "read_polygon",
    "resolve_scheme",
    "write_atomic",
]


class MissingInputError(InputError):
    pass


class MalformedInputError(InputError):
    pass


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return format(x, ".17g")


def _plain(obj):
    """Convert to JSON-ready values, with floats pre-formatted as strings."""
    if isinstance(obj, Fraction):
        return rat_to_str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Raw(fmt_float(obj))
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


class _Raw(str):
    pass


def dumps_json(obj) -> str:
    """JSON text with floats printed to 17 significant digits."""

    def emit(v, indent):
        pad, inner = "  " * indent, "  " * (indent + 1)
        if isinstance(v, _Raw):
            return str(v)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{inner}{json.dumps(k)}: {emit(x, indent + 1)}" for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(not isinstance(x, (dict, list)) for x in v):
                return "[" + ", ".join(emit(x, indent + 1) for x in v) + "]"
            return "[\n" + ",\n".join(inner + emit(x, indent + 1) for x in v) + "\n" + pad + "]"
        return json.dumps(v)

    return emit(_plain(obj), 0) + "\n"


def format_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` (``None`` or ``"-"`` means stdout)."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    if not directory.is_dir():
        raise MissingInputError(f"output directory {directory} does not exist")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_text(path) -> str:
    path = Path(path)
    if not path.is_file():
        raise MissingInputError(f"input file {path} not found")
    return path.read_text(encoding="utf-8")


def _load_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _vertex_array(raw, path) -> np.ndarray:
    try:
        v = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise MalformedInputError(f"{path}: vertices must be a list of equal-length numeric rows") from None
    if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
        raise MalformedInputError(f"{path}: vertices must be a non-empty list of coordinate rows")
    if not np.all(np.isfinite(v)):
        raise MalformedInputError(f"{path}: vertices contain non-finite values")
    return v


def _read_csv_vertices(path) -> list[list[float]]:
    rows = [r for r in csv.reader(io.StringIO(_read_text(path))) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]  # header
    out = []
    for lineno, r in enumerate(rows, 1):
        try:
            out.append([float(c) for c in r])
        except ValueError:
            raise MalformedInputError(f"{path}: non-numeric value in data row {lineno}") from None
    return out


def read_polygon(path, closed: bool | None = None) -> Polygon:
    """Read a polygon; ``closed`` overrides the file (CSV defaults to closed)."""
    if str(path).lower().endswith(".json"):
        data = _load_json(path)
        if isinstance(data, list):
            data = {"vertices": data}
        if not isinstance(data, dict) or "vertices" not in data:
            raise MalformedInputError(f"{path}: expected an object with a 'vertices' list")
        file_closed = data.get("closed", True)
        if not isinstance(file_closed, bool):
            raise MalformedInputError(f"{path}: 'closed' must be true or false")
        raw = data["vertices"]
    else:
        raw, file_closed = _read_csv_vertices(path), True
    v = _vertex_array(raw, path)
    return Polygon(v, file_closed if closed is None else closed)


def read_manifold_polygon(path) -> ManifoldPolygon:
    data = _load_json(path)
    if not isinstance(data, dict) or "vertices" not in data or "geometry" not in data:
        raise MalformedInputError(f"{path}: expected an object with 'geometry' and 'vertices'")
    closed = data.get("closed", True)
    if not isinstance(closed, bool):
        raise MalformedInputError(f"{path}: 'closed' must be true or false")
    return ManifoldPolygon(_vertex_array(data["vertices"], path), closed, str(data["geometry"]))


def read_mask(path) -> RationalMask:
    """Mask file: JSON list of rationals, or an object with ``coefficients``."""
    data = _load_json(path)
    name = "custom"
    if isinstance(data, dict):
        name = str(data.get("scheme", name))
        data = data.get("coefficients")
    if not isinstance(data, list) or not data:
        raise MalformedInputError(f"{path}: expected a non-empty coefficient list")
    coeffs = []
    for c in data:
        if isinstance(c, bool) or not isinstance(c, (int, str)):
            raise MalformedInputError(f"{path}: coefficients must be integers or 'n/d' strings, got {c!r}")
        coeffs.append(rat_from_str(str(c)))
    return RationalMask.from_coefficients(coeffs, name)


_HIERARCHY_ID = re.compile(r"bh(\d+)")


def resolve_scheme(scheme_id: str) -> RationalMask:
    """Built-in scheme, or ``bh<2m>`` for any hierarchy member."""
    if scheme_id in BUILTIN_SCHEMES:
        return builtin_mask(scheme_id)
    match = _HIERARCHY_ID.fullmatch(scheme_id)
    if match and int(match.group(1)) % 2 == 0 and int(match.group(1)) >= 4:
        return derive_hierarchy_mask(int(match.group(1)) // 2)
    raise UnknownSchemeError(
        f"unknown scheme {scheme_id!r}; expected one of {', '.join(BUILTIN_SCHEMES)} or bh<2m>"
    )
