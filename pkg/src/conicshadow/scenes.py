"""Scene files: JSON schemas for cones, simplices and polytopes, plus named presets."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .cones import Cone, make_cone
from .errors import GeometryError, InputError
from .gram_euler import PolytopeFaceLattice, build_polygon_lattice, build_simplex_lattice, make_lattice
from .simplex import SimplexN, make_simplex

_PENTAGON = [[math.cos(2 * math.pi * i / 5), math.sin(2 * math.pi * i / 5)] for i in range(5)]

PRESETS = {
    "octant": {"generators": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
    "tetrahedral-corner": {"generators": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]},
    "square-cone": {"generators": [[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]]},
    "unit-triangle": {"vertices": [[0, 0], [1, 0], [0, 1]]},
    "regular-tetrahedron": {"vertices": [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]},
    "corner-simplex": {"vertices": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]},
    "unit-square": {"dim": 2, "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
    "regular-pentagon": {"dim": 2, "vertices": _PENTAGON},
    "cube": {
        "dim": 3,
        "vertices": [[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)],
        "facets": [
            {"normal": [1, 0, 0], "offset": 0}, {"normal": [-1, 0, 0], "offset": -1},
            {"normal": [0, 1, 0], "offset": 0}, {"normal": [0, -1, 0], "offset": -1},
            {"normal": [0, 0, 1], "offset": 0}, {"normal": [0, 0, -1], "offset": -1},
        ],
    },
}


def read_scene(source: str) -> dict:
    """Resolve a preset name, an inline JSON object, or a path to a JSON file."""
    if source in PRESETS:
        return json.loads(json.dumps(PRESETS[source]))
    if source.lstrip().startswith("{"):
        return _parse(source, "<inline>")
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{source}: cannot read scene file ({exc.strerror})") from exc
    return _parse(text, source)


def _parse(text: str, where: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{where}: top level must be a JSON object")
    data["_source"] = where
    return data


def _where(data, loc):
    return f"{data.get('_source', '<scene>')}: at {loc}"


def _points(data: dict, key: str, dim: int | None = None) -> list:
    if key not in data:
        raise InputError(f"{data.get('_source', '<scene>')}: missing required key {key!r}")
    rows = data[key]
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{_where(data, key)}: expected a non-empty list of coordinate lists")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise InputError(f"{_where(data, f'{key}[{i}]')}: expected a list of numbers")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise InputError(f"{_where(data, f'{key}[{i}][{j}]')}: expected a finite number, got {x!r}")
        if dim is not None and len(row) != dim:
            raise InputError(f"{_where(data, f'{key}[{i}]')}: expected {dim} coordinates, got {len(row)}")
        if i and len(row) != len(rows[0]):
            raise InputError(f"{_where(data, f'{key}[{i}]')}: coordinate count differs from {key}[0]")
        out.append([float(x) for x in row])
    return out


def _geometry(data, fn, *args):
    try:
        return fn(*args)
    except GeometryError as exc:
        raise InputError(f"{data.get('_source', '<scene>')}: {exc}") from exc


def load_cone(data: dict) -> Cone:
    return _geometry(data, make_cone, _points(data, "generators", 3))


def load_simplex(data: dict) -> SimplexN:
    pts = _points(data, "vertices")
    n = len(pts[0])
    if len(pts) != n + 1:
        raise InputError(f"{_where(data, 'vertices')}: an {n}-simplex needs {n + 1} vertices, got {len(pts)}")
    return _geometry(data, make_simplex, pts)


def load_polytope(data: dict) -> PolytopeFaceLattice:
    pts = _points(data, "vertices")
    dim = data.get("dim", len(pts[0]))
    if isinstance(dim, bool) or not isinstance(dim, int) or dim != len(pts[0]):
        raise InputError(f"{_where(data, 'dim')}: dim must equal the vertex coordinate count {len(pts[0])}")
    if "facets" not in data:
        if "faces" in data:
            raise InputError(f"{_where(data, 'faces')}: faces given without facets")
        if len(pts) == dim + 1:
            return _geometry(data, lambda: build_simplex_lattice(make_simplex(pts)))
        if dim == 2:
            return _geometry(data, build_polygon_lattice, pts)
        raise InputError(f"{data.get('_source', '<scene>')}: facets are required unless the polytope is a simplex or polygon")
    facets = data["facets"]
    if not isinstance(facets, list) or not facets:
        raise InputError(f"{_where(data, 'facets')}: expected a non-empty list")
    normals, offsets = [], []
    for i, f in enumerate(facets):
        if not isinstance(f, dict) or "normal" not in f or "offset" not in f:
            raise InputError(f"{_where(data, f'facets[{i}]')}: expected an object with 'normal' and 'offset'")
        normals.append(_points({"n": [f["normal"]], "_source": data.get("_source")}, "n", dim)[0])
        off = f["offset"]
        if isinstance(off, bool) or not isinstance(off, (int, float)):
            raise InputError(f"{_where(data, f'facets[{i}].offset')}: expected a number")
        offsets.append(float(off))
    faces = None
    if "faces" in data:
        faces = []
        for i, f in enumerate(data["faces"]):
            ok = (isinstance(f, dict) and isinstance(f.get("dim"), int)
                  and isinstance(f.get("vertices"), list)
                  and all(isinstance(v, int) and not isinstance(v, bool) for v in f["vertices"]))
            if not ok:
                raise InputError(f"{_where(data, f'faces[{i}]')}: expected {{'dim': int, 'vertices': [int, ...]}}")
            faces.append((f["dim"], f["vertices"]))
    return _geometry(data, make_lattice, dim, np.array(pts), normals, offsets, faces)
