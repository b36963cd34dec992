"""n-simplices in R^n: shadows under random projection and vertex solid angles.

Shadow classification has two implementations. ``classify_simplex_projection``
works in explicit coordinates of the projection hyperplane and solves one
convex-combination system per vertex. ``classify_simplex_batch`` uses the
affine dependence of the projected vertices: with ``w`` solving
``E w = u`` for the edge matrix ``E`` out of vertex 0, the coefficients
``c = (-sum(w), w)`` satisfy ``sum c_i p_i = 0`` and ``sum c_i = 0`` for the
projected points ``p_i``. A vertex lies inside the hull of the others exactly
when its coefficient's sign differs from all the rest.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cones import EPSILON, make_cone, solid_angle_excess
from .errors import DegenerateSimplex, ExcessiveDegeneracy, GeometryError
from .geometry import (
    angle_between, as_unit_vector, as_vector, complement_basis, unit_ball_volume, unit_vectors,
)
from .montecarlo import (
    CHUNK, GATE_SIGMAS, MAX_DEGENERATE_FRACTION, EstimatorReport, chunked_tally, combine,
    derive_seed, estimate_solid_angle_at_point,
)

DET_TOL = 1e-10


class ShadowKind(enum.Enum):
    IS_SIMPLEX = "IsSimplex"
    NOT_SIMPLEX = "NotSimplex"
    DEGENERATE = "Degenerate"


IS_SIMPLEX, NOT_SIMPLEX, DEGENERATE = 0, 1, 2


@dataclass(frozen=True)
class ShadowVerdict:
    kind: ShadowKind
    interior_vertex: int | None = None
    extreme_count: int | None = None


@dataclass(frozen=True, eq=False)
class SimplexN:
    vertices: np.ndarray  # (n+1, n)

    @property
    def n(self) -> int:
        return self.vertices.shape[1]

    def edge_matrix(self, v: int = 0) -> np.ndarray:
        """Rows are the edge vectors from vertex ``v`` to the other vertices, in index order."""
        others = [i for i in range(self.n + 1) if i != v]
        return self.vertices[others] - self.vertices[v]

    def to_json(self) -> dict:
        return {"vertices": self.vertices.tolist()}


def make_simplex(vertices) -> SimplexN:
    rows = [as_vector(v) for v in vertices]
    n = rows[0].size if rows else 0
    if n < 2:
        raise GeometryError("simplex dimension must be at least 2")
    if any(r.size != n for r in rows):
        raise GeometryError("all simplex vertices must have the same dimension")
    if len(rows) != n + 1:
        raise GeometryError(f"an {n}-simplex needs {n + 1} vertices, got {len(rows)}")
    x = np.array(rows)
    if abs(np.linalg.det(x[1:] - x[0])) < DET_TOL:
        raise DegenerateSimplex("vertices are affinely dependent")
    return SimplexN(x)


def classify_simplex_projection(s: SimplexN, u, eps: float = EPSILON) -> ShadowVerdict:
    u = as_unit_vector(u)
    n = s.n
    p = s.vertices @ complement_basis(u).T  # (n+1, n-1)
    interior = []
    for j in range(n + 1):
        others = [i for i in range(n + 1) if i != j]
        a = np.vstack([p[others].T, np.ones(n)])
        b = np.append(p[j], 1.0)
        try:
            lam = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            return ShadowVerdict(ShadowKind.DEGENERATE)
        if np.min(np.abs(lam)) < eps:
            return ShadowVerdict(ShadowKind.DEGENERATE)
        if np.all(lam > eps):
            interior.append(j)
    extreme = n + 1 - len(interior)
    if len(interior) == 1:
        return ShadowVerdict(ShadowKind.IS_SIMPLEX, interior[0], extreme)
    return ShadowVerdict(ShadowKind.NOT_SIMPLEX, None, extreme)


def affine_dependence(s: SimplexN, u: np.ndarray) -> np.ndarray:
    """Coefficients of the affine dependence among projected vertices, one row per direction."""
    w = u @ np.linalg.inv(s.edge_matrix(0))
    return np.hstack([-w.sum(axis=1, keepdims=True), w])


def classify_simplex_batch(s: SimplexN, u: np.ndarray, eps: float = EPSILON):
    """Vectorized verdicts for ``(m, n)`` directions.

    Returns ``(kind, interior)``: int8 codes IS_SIMPLEX/NOT_SIMPLEX/DEGENERATE
    and the interior vertex index (-1 when there is none).
    """
    c = affine_dependence(s, u)
    mag = np.abs(c)
    degenerate = mag.min(axis=1) < eps * mag.max(axis=1)
    pos = c > 0
    npos = pos.sum(axis=1)
    n1 = s.n + 1
    single = (npos == 1) | (npos == n1 - 1)
    minority = np.where(npos == 1, np.argmax(pos, axis=1), np.argmax(~pos, axis=1))
    kind = np.where(single, IS_SIMPLEX, NOT_SIMPLEX).astype(np.int8)
    kind[degenerate] = DEGENERATE
    interior = np.where(kind == IS_SIMPLEX, minority, -1)
    return kind, interior


def vertex_cone_oracle(s: SimplexN, v: int, eps: float = EPSILON):
    """Predicate: direction enters the simplex from vertex ``v``."""
    inv = np.linalg.inv(s.edge_matrix(v))

    def oracle(u):
        return np.all(u @ inv > -eps, axis=1)

    return oracle


def estimate_vertex_solid_angle(s: SimplexN, v: int, n_samples: int, seed: int,
                                eps: float = EPSILON, workers: int = 1) -> EstimatorReport:
    if not 0 <= v <= s.n:
        raise GeometryError(f"vertex index {v} out of range")
    return estimate_solid_angle_at_point(vertex_cone_oracle(s, v, eps), s.n, n_samples, seed,
                                         workers=workers)


def exact_vertex_solid_angle(s: SimplexN, v: int) -> float:
    """Closed-form vertex angle, available for triangles and tetrahedra only."""
    e = s.edge_matrix(v)
    if s.n == 2:
        return angle_between(e[0], e[1])
    if s.n == 3:
        return solid_angle_excess(make_cone(e))
    raise GeometryError(f"no closed-form vertex angle in dimension {s.n}")


def estimate_p_simplex(s: SimplexN, n_samples: int, seed: int, eps: float = EPSILON,
                       workers: int = 1, chunk: int = CHUNK) -> EstimatorReport:
    """Probability that the shadow of ``s`` on a random hyperplane is an (n-1)-simplex."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")

    def work(start, count):
        kind, _ = classify_simplex_batch(s, unit_vectors(seed, start, count, s.n), eps)
        return np.array([np.count_nonzero(kind == DEGENERATE), np.count_nonzero(kind == IS_SIMPLEX)],
                        dtype=np.int64)

    n_deg, hits = (int(x) for x in chunked_tally(work, n_samples, workers, chunk))
    if n_deg > MAX_DEGENERATE_FRACTION * n_samples:
        raise ExcessiveDegeneracy(f"{n_deg} of {n_samples} shadows degenerate")
    return EstimatorReport.from_sums(n_samples, n_deg, hits, hits, seed)


class FKCheck(NamedTuple):
    lhs: EstimatorReport
    rhs: EstimatorReport
    passed: bool


def check_fk_identity(s: SimplexN, n_samples: int, seed: int, eps: float = EPSILON,
                      workers: int = 1, mode: str = "mc") -> FKCheck:
    """Compare P[shadow is a simplex] with 2/(n w_n) times the sum of vertex angles.

    Each side draws from its own sub-stream of ``seed``, so the two estimates
    are independent and their standard errors combine in quadrature. With
    ``mode="exact"`` the vertex angles are evaluated in closed form (n <= 3).
    """
    n = s.n
    factor = 2.0 / (n * unit_ball_volume(n))
    lhs = estimate_p_simplex(s, n_samples, derive_seed(seed, 0), eps, workers)
    if mode == "exact":
        total = math.fsum(exact_vertex_solid_angle(s, v) for v in range(n + 1))
        rhs = EstimatorReport.build(0, 0, factor * total, 0.0, seed)
    elif mode == "mc":
        angles = [estimate_vertex_solid_angle(s, v, n_samples, derive_seed(seed, 1 + v), eps, workers)
                  for v in range(n + 1)]
        rhs = combine(angles, [factor] * len(angles), seed=seed)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    lhs = EstimatorReport.build(lhs.samples, lhs.degenerate_count, lhs.estimate, lhs.stderr, seed)
    tol = GATE_SIGMAS * math.hypot(lhs.stderr, rhs.stderr)
    diff = abs(lhs.estimate - rhs.estimate)
    passed = diff <= tol or (tol == 0.0 and diff <= 1e-12)
    return FKCheck(lhs, rhs, bool(passed))
