"""Face lattices of convex polytopes, face solid angles, and the Gram-Euler sum.

Facets are half-spaces ``{x : normal . x >= offset}`` with unit inward normals.
Faces are recorded as ``(dim, vertex index set)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cones import EPSILON, make_cone, solid_angle_excess
from .errors import FaceNotFound, GeometryError, InvalidLattice
from .geometry import angle_between, as_vector, sphere_area
from .montecarlo import EstimatorReport, combine, derive_seed, estimate_solid_angle_at_point
from .simplex import SimplexN
from .spherical import edge_lune_measure

SLACK_TOL = 1e-9
EXACT_TOL = 1e-9


@dataclass(frozen=True, order=True)
class Face:
    dim: int
    vertices: tuple  # sorted vertex indices

    @classmethod
    def of(cls, dim, vertices):
        return cls(int(dim), tuple(sorted(int(v) for v in vertices)))

    def __str__(self):
        return f"{self.dim}:{{{','.join(map(str, self.vertices))}}}"


@dataclass(frozen=True, eq=False)
class PolytopeFaceLattice:
    dim: int
    vertices: np.ndarray  # (m, n)
    normals: np.ndarray  # (f, n) unit inward normals
    offsets: np.ndarray  # (f,)
    faces: tuple  # sorted Face records

    def slack(self, x) -> np.ndarray:
        return np.asarray(x) @ self.normals.T - self.offsets

    def active_facets(self, x) -> np.ndarray:
        """Indices of facets whose hyperplane passes through ``x`` (scale-aware threshold)."""
        return np.flatnonzero(np.abs(self.slack(x)) < SLACK_TOL * (1.0 + np.abs(self.offsets)))

    def f_vector(self) -> tuple:
        counts = [0] * self.dim
        for f in self.faces:
            counts[f.dim] += 1
        return tuple(counts)

    def find(self, face) -> Face:
        if isinstance(face, Face):
            key = face.vertices
        else:
            key = tuple(sorted(int(v) for v in face))
        for f in self.faces:
            if f.vertices == key:
                return f
        raise FaceNotFound(f"no face with vertex set {list(key)}")

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "vertices": self.vertices.tolist(),
            "facets": [{"normal": n.tolist(), "offset": float(b)} for n, b in zip(self.normals, self.offsets)],
            "faces": [{"dim": f.dim, "vertices": list(f.vertices)} for f in self.faces],
        }


def _affine_dim(points: np.ndarray) -> int:
    if len(points) == 1:
        return 0
    return int(np.linalg.matrix_rank(points[1:] - points[0], tol=1e-9))


def _normalize_facets(normals, offsets):
    normals = np.array([as_vector(n) for n in normals], dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    scale = np.linalg.norm(normals, axis=1)
    if np.any(scale == 0):
        raise InvalidLattice("facet normal is the zero vector")
    return normals / scale[:, None], offsets / scale


def faces_from_facets(vertices: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> tuple:
    """All proper faces, as intersections of facet vertex sets."""
    vertices = np.asarray(vertices, float)
    slack = vertices @ normals.T - offsets
    on = np.abs(slack) < SLACK_TOL * (1.0 + np.abs(offsets))
    sets = {frozenset(np.flatnonzero(on[:, j]).tolist()) for j in range(len(offsets))}
    frontier = set(sets)
    while frontier:
        new = set()
        for a, b in itertools.product(frontier, sets):
            c = a & b
            if c and c not in sets:
                new.add(c)
        sets |= new
        frontier = new
    return tuple(sorted(Face.of(_affine_dim(vertices[sorted(s)]), s) for s in sets))


def validate_lattice(p: PolytopeFaceLattice) -> None:
    n = p.dim
    if p.vertices.ndim != 2 or p.vertices.shape[1] != n:
        raise InvalidLattice(f"vertices must be points in R^{n}")
    if p.normals.shape[1:] != (n,):
        raise InvalidLattice(f"facet normals must be vectors in R^{n}")
    slack = p.slack(p.vertices)
    worst = slack.min() if slack.size else 0.0
    if worst < -SLACK_TOL:
        i, j = np.unravel_index(np.argmin(slack), slack.shape)
        raise InvalidLattice(f"vertex {i} violates facet {j} by {-worst:.3g}")
    tol = SLACK_TOL * (1.0 + np.abs(p.offsets))
    on = np.abs(slack) < tol
    faces = set(p.faces)
    for i in range(len(p.vertices)):
        if Face.of(0, [i]) not in faces:
            raise InvalidLattice(f"vertex {i} is missing from the face list")
    for j in range(len(p.offsets)):
        facet = Face.of(n - 1, np.flatnonzero(on[:, j]))
        if facet not in faces:
            raise InvalidLattice(f"facet {j} (vertices {list(facet.vertices)}) is missing from the face list")
    for f in p.faces:
        if not 0 <= f.dim <= n - 1:
            raise InvalidLattice(f"face {f} is not a proper face")
        if any(not 0 <= v < len(p.vertices) for v in f.vertices):
            raise InvalidLattice(f"face {f} references an unknown vertex")
        idx = list(f.vertices)
        if _affine_dim(p.vertices[idx]) != f.dim:
            raise InvalidLattice(f"face {f} has affine dimension {_affine_dim(p.vertices[idx])}")
        active = np.all(on[idx], axis=0)
        if not active.any():
            raise InvalidLattice(f"face {f} lies on no facet")
        closure = tuple(np.flatnonzero(np.all(on[:, active], axis=1)).tolist())
        if closure != f.vertices:
            raise InvalidLattice(f"face {f} is not cut out by its supporting facets (expected {list(closure)})")


def make_lattice(dim, vertices, normals, offsets, faces=None) -> PolytopeFaceLattice:
    vertices = np.array([as_vector(v) for v in vertices], dtype=float)
    normals, offsets = _normalize_facets(normals, offsets)
    if faces is None:
        faces = faces_from_facets(vertices, normals, offsets)
    else:
        faces = tuple(sorted(f if isinstance(f, Face) else Face.of(*f) for f in faces))
    p = PolytopeFaceLattice(int(dim), vertices, normals, offsets, faces)
    validate_lattice(p)
    return p


def build_simplex_lattice(s: SimplexN) -> PolytopeFaceLattice:
    x = s.vertices
    n = s.n
    normals, offsets = [], []
    for j in range(n + 1):
        others = [i for i in range(n + 1) if i != j]
        base = x[others]
        # normal = null vector of the facet's edge vectors
        _, _, vt = np.linalg.svd(base[1:] - base[0])
        nrm = vt[-1]
        if nrm @ (x[j] - base[0]) < 0:
            nrm = -nrm
        normals.append(nrm)
        offsets.append(nrm @ base.mean(axis=0))
    faces = [Face.of(k - 1, c) for k in range(1, n + 1) for c in itertools.combinations(range(n + 1), k)]
    return make_lattice(n, x, normals, offsets, faces)


def build_polygon_lattice(points) -> PolytopeFaceLattice:
    """Lattice of a convex polygon; points are reordered counter-clockwise."""
    pts = np.array([as_vector(v) for v in points], dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise InvalidLattice("a polygon needs at least three points in R^2")
    c = pts.mean(axis=0)
    order = np.argsort(np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0]), kind="stable")
    pts = pts[order]
    m = len(pts)
    normals, offsets = [], []
    for i in range(m):
        d = pts[(i + 1) % m] - pts[i]
        nrm = np.array([-d[1], d[0]])
        normals.append(nrm)
        offsets.append(nrm @ pts[i])
    for i in range(m):
        a, b, q = pts[i], pts[(i + 1) % m], pts[(i + 2) % m]
        if (b - a)[0] * (q - b)[1] - (b - a)[1] * (q - b)[0] <= 0:
            raise InvalidLattice("points are not in strictly convex position")
    faces = [Face.of(0, [i]) for i in range(m)] + [Face.of(1, [i, (i + 1) % m]) for i in range(m)]
    return make_lattice(2, pts, normals, offsets, faces)


def _incident_edges(p: PolytopeFaceLattice, face: Face):
    v = face.vertices[0]
    return [f for f in p.faces if f.dim == 1 and v in f.vertices]


def exact_face_angle(p: PolytopeFaceLattice, face: Face) -> float:
    n = p.dim
    if face.dim == n - 1:
        return sphere_area(n) / 2.0
    x = p.vertices
    if n == 2 and face.dim == 0:
        v = face.vertices[0]
        dirs = [x[w] - x[v] for e in _incident_edges(p, face) for w in e.vertices if w != v]
        return angle_between(dirs[0], dirs[1])
    if n == 3 and face.dim == 0:
        v = face.vertices[0]
        dirs = [x[w] - x[v] for e in _incident_edges(p, face) for w in e.vertices if w != v]
        return solid_angle_excess(make_cone(dirs))
    if n == 3 and face.dim == 1:
        active = p.active_facets(x[list(face.vertices)].mean(axis=0))
        if len(active) != 2:
            raise InvalidLattice(f"edge {face} lies on {len(active)} facets, expected 2")
        dihedral = math.pi - angle_between(p.normals[active[0]], p.normals[active[1]])
        return edge_lune_measure(dihedral)
    raise GeometryError(f"no closed-form angle for a {face.dim}-face in dimension {n}")


def face_direction_oracle(p: PolytopeFaceLattice, face: Face, eps: float = EPSILON):
    """Predicate: a small step from the face centroid along ``u`` stays in the polytope."""
    centroid = p.vertices[list(face.vertices)].mean(axis=0)
    a = p.normals[p.active_facets(centroid)]

    def oracle(u):
        return np.all(u @ a.T >= -eps, axis=1)

    return oracle


def face_solid_angle(p: PolytopeFaceLattice, face, mode: str = "exact", n_samples: int = 10**5,
                     seed: int = 0, eps: float = EPSILON, workers: int = 1):
    """Solid angle of ``p`` at the relative interior of ``face``.

    Exact mode returns a float; MC mode returns an ``EstimatorReport``.
    """
    face = p.find(face)
    if mode == "exact":
        return exact_face_angle(p, face)
    if mode == "mc":
        return estimate_solid_angle_at_point(face_direction_oracle(p, face, eps), p.dim, n_samples,
                                             seed, workers=workers)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class GramEulerReport:
    mode: str
    per_face_angles: dict  # Face -> float | EstimatorReport
    alternating_sum: float
    stderr: float
    target: float
    passed: bool

    def to_json(self) -> dict:
        def enc(a):
            return a.to_json() if isinstance(a, EstimatorReport) else a

        return {
            "mode": self.mode,
            "faces": [{"dim": f.dim, "vertices": list(f.vertices), "angle": enc(a)}
                      for f, a in self.per_face_angles.items()],
            "alternating_sum": self.alternating_sum,
            "stderr": self.stderr,
            "target": self.target,
            "pass": self.passed,
        }


def gram_euler_sum(p: PolytopeFaceLattice, mode: str = "exact", n_samples: int = 10**5,
                   seed: int = 0, eps: float = EPSILON, workers: int = 1) -> GramEulerReport:
    """Alternating sum of face angles over all proper faces, against (-1)^(n-1) n w_n."""
    n = p.dim
    target = (-1) ** (n - 1) * sphere_area(n)
    signs = [(-1) ** f.dim for f in p.faces]
    if mode == "exact":
        angles = {f: exact_face_angle(p, f) for f in p.faces}
        total = math.fsum(s * a for s, a in zip(signs, angles.values()))
        return GramEulerReport(mode, angles, total, 0.0, target, abs(total - target) <= EXACT_TOL)
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    angles = {f: face_solid_angle(p, f, "mc", n_samples, derive_seed(seed, i), eps, workers)
              for i, f in enumerate(p.faces)}
    total = combine(angles.values(), signs, seed=seed)
    passed = total.covers(target)
    return GramEulerReport(mode, angles, total.estimate, total.stderr, target, passed)
