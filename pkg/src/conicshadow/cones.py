"""Polyhedral cones in R^3 with apex at the origin, and their shadows on planes.

A cone is stored with its generators in cyclic order, so consecutive pairs
``(g[i], g[i+1])`` span its facets. ``boundary_generators`` and all per-edge
arrays index that stored order; ``Cone.input_index`` maps back to the caller's.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import DegenerateCone, GeometryError, NotSalient, RedundantGenerator
from .geometry import as_unit_vector, as_vector, complement_basis
from .spherical import SphericalTriangle, excess_area, inner_angles, tangent_angle

BUILD_TOL = 1e-10
EPSILON = 1e-9


class ProjectionKind(enum.Enum):
    SALIENT_CONE = "SalientCone"
    FULL_PLANE = "FullPlane"
    DEGENERATE = "Degenerate"


class MembershipKind(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


# integer codes used by the vectorized classifier
SALIENT, FULL, DEGENERATE = 0, 1, 2


@dataclass(frozen=True, eq=False)
class Cone:
    generators: np.ndarray  # (k, 3) unit rows, cyclic order
    normals: np.ndarray  # (k, 3) inward unit normal of facet (g[i], g[i+1])
    input_index: tuple

    @property
    def k(self) -> int:
        return len(self.generators)

    def to_json(self) -> dict:
        return {"generators": self.generators.tolist()}


@dataclass(frozen=True)
class Membership:
    kind: MembershipKind
    margins: np.ndarray
    coefficients: np.ndarray | None = None


@dataclass(frozen=True)
class ProjectionOutcome:
    kind: ProjectionKind
    vertex_count: int | None
    edge_count: int | None
    boundary_generators: frozenset

    @classmethod
    def degenerate(cls):
        return cls(ProjectionKind.DEGENERATE, None, None, frozenset())

    @classmethod
    def full_plane(cls):
        return cls(ProjectionKind.FULL_PLANE, 0, 0, frozenset())

    @classmethod
    def salient(cls, boundary):
        boundary = frozenset(int(i) for i in boundary)
        return cls(ProjectionKind.SALIENT_CONE, 1, len(boundary), boundary)


def _is_salient(g: np.ndarray) -> bool:
    # maximise s subject to w.g_i >= s, |w|_inf <= 1
    k = len(g)
    res = linprog(
        c=[0, 0, 0, -1],
        A_ub=np.hstack([-g, np.ones((k, 1))]),
        b_ub=np.zeros(k),
        bounds=[(-1, 1)] * 3 + [(None, 1)],
        method="highs",
    )
    return res.status == 0 and -res.fun >= BUILD_TOL


def _in_cone(others: np.ndarray, x: np.ndarray) -> bool:
    """Feasibility of ``x = sum(t_j * others[j])`` with ``t >= 0``."""
    res = linprog(np.zeros(len(others)), A_eq=others.T, b_eq=x, bounds=(0, None), method="highs")
    return res.status == 0


def _facet_normals(g: np.ndarray) -> np.ndarray | None:
    """Inward facet normals for cyclic order ``g``, or None if the order is not convex."""
    k = len(g)
    c = np.cross(g, np.roll(g, -1, axis=0))
    norms = np.linalg.norm(c, axis=1)
    if np.any(norms < BUILD_TOL):
        return None
    c = c / norms[:, None]
    sign = 1.0 if c[0] @ g[2 % k] > 0 else -1.0
    n = sign * c
    for i in range(k):
        others = [j for j in range(k) if j not in (i, (i + 1) % k)]
        if np.any(g[others] @ n[i] < BUILD_TOL):
            return None
    return n


def make_cone(generators) -> Cone:
    """Validate generators and build the cone of their non-negative combinations.

    Generators are normalized. Input order is kept when it is already cyclic,
    otherwise generators are sorted by angle around their mean direction.
    """
    rows = [as_vector(v) for v in generators]
    if len(rows) < 3:
        raise GeometryError(f"a cone needs at least 3 generators, got {len(rows)}")
    for i, v in enumerate(rows):
        if v.size != 3:
            raise GeometryError(f"generator {i} is not a 3-vector")
        if np.linalg.norm(v) == 0.0:
            raise GeometryError(f"generator {i} is the zero vector")
    g = np.array([v / np.linalg.norm(v) for v in rows])
    k = len(g)

    if k == 3 and abs(np.linalg.det(g)) >= BUILD_TOL:
        normals = _facet_normals(g)
        if normals is None:
            raise DegenerateCone("the three generators are (nearly) coplanar")
        return Cone(g, normals, (0, 1, 2))

    m = g.sum(axis=0)
    fast_salient = np.linalg.norm(m) > 0 and np.all(g @ m > BUILD_TOL * np.linalg.norm(m))
    if not fast_salient and not _is_salient(g):
        raise NotSalient("generators positively span a line; the cone is not salient")
    if k == 3:
        raise DegenerateCone("the three generators are (nearly) coplanar")

    order = list(range(k))
    normals = _facet_normals(g)
    if normals is None:
        m = m / np.linalg.norm(m)
        b = complement_basis(m)
        xy = g @ b.T
        order = [int(i) for i in np.argsort(np.arctan2(xy[:, 1], xy[:, 0]), kind="stable")]
        normals = _facet_normals(g[order])
    if normals is None:
        # strict cyclic convexity failed: name the offending generator if there is one
        for i in range(k):
            if _in_cone(np.delete(g, i, axis=0), g[i]):
                raise RedundantGenerator(i)
        raise DegenerateCone("generators are not in strictly convex position")
    return Cone(g[order], normals, tuple(order))


def cone_inner_angles(c: Cone) -> np.ndarray:
    """Inner angle of the spherical cross-section polygon at each generator."""
    g = c.generators
    k = c.k
    return np.array([tangent_angle(g[i], g[(i - 1) % k], g[(i + 1) % k]) for i in range(k)])


def solid_angle_excess(c: Cone) -> float:
    """Solid angle at the apex: sum of inner angles minus (k - 2) pi."""
    if c.k == 3:
        return excess_area(inner_angles(SphericalTriangle(tuple(c.generators))))
    return float(cone_inner_angles(c).sum() - (c.k - 2) * math.pi)


def exact_projection_expectations(c: Cone) -> tuple[float, float, float]:
    """Exact ``(E[#vertices], E[#edges], P[full plane])`` of a uniformly random shadow."""
    alpha = solid_angle_excess(c)
    theta = cone_inner_angles(c)
    p_full = alpha / (2.0 * math.pi)
    expected_vertices = 1.0 - p_full
    expected_edges = float(np.sum(1.0 - theta / math.pi))
    return expected_vertices, expected_edges, p_full


def membership_margins(c: Cone, u: np.ndarray) -> np.ndarray:
    """Classification margins of direction(s) ``u`` against the cone.

    For k = 3 these are the coefficients of ``u`` in the generator basis, for
    k > 3 the signed distances to the facet planes. Works on a single vector
    or a ``(m, 3)`` batch.
    """
    if c.k == 3:
        return u @ np.linalg.inv(c.generators)
    return u @ c.normals.T


def direction_membership(c: Cone, u, eps: float = EPSILON) -> Membership:
    u = as_unit_vector(u)
    if c.k == 3:
        try:
            t = np.linalg.solve(c.generators.T, u)
        except np.linalg.LinAlgError as exc:  # excluded by construction
            raise RuntimeError("singular generator matrix") from exc
        margins = t
    else:
        t = None
        margins = c.normals @ u
    lo = margins.min()
    if lo > eps:
        kind = MembershipKind.INTERIOR
    elif lo >= -eps:
        kind = MembershipKind.BOUNDARY
    else:
        kind = MembershipKind.OUTSIDE
    return Membership(kind, margins, t)


def classify_projection(c: Cone, u, eps: float = EPSILON) -> ProjectionOutcome:
    """Shadow of ``c`` on the plane orthogonal to ``u``, via explicit 2-D coordinates."""
    u = as_unit_vector(u)
    plus = direction_membership(c, u, eps)
    if np.min(np.abs(plus.margins)) < eps:
        return ProjectionOutcome.degenerate()
    minus = direction_membership(c, -u, eps)
    if MembershipKind.INTERIOR in (plus.kind, minus.kind):
        return ProjectionOutcome.full_plane()

    p = c.generators @ complement_basis(u).T  # (k, 2)
    if np.min(np.linalg.norm(p, axis=1)) < eps:
        return ProjectionOutcome.degenerate()
    cross = np.outer(p[:, 0], p[:, 1]) - np.outer(p[:, 1], p[:, 0])
    off = ~np.eye(c.k, dtype=bool)
    if np.min(np.abs(cross[off])) < eps:
        return ProjectionOutcome.degenerate()
    extreme = []
    for i in range(c.k):
        row = cross[i][off[i]]
        if np.all(row > 0) or np.all(row < 0):
            extreme.append(i)
    if len(extreme) != 2:
        return ProjectionOutcome.degenerate()
    return ProjectionOutcome.salient(extreme)


def classify_batch(c: Cone, u: np.ndarray, eps: float = EPSILON):
    """Vectorized shadow classification for a ``(m, 3)`` array of unit directions.

    Returns ``(kind, boundary)``: an int8 array of SALIENT/FULL/DEGENERATE codes
    and an ``(m, k)`` bool array marking boundary generators of salient shadows.
    The in-plane cross product of projected generators i, j is the triple
    product ``u . (g_i x g_j)``, so no per-direction basis is needed.
    """
    g = c.generators
    k = c.k
    m = len(u)
    margins = membership_margins(c, u)
    degenerate = np.min(np.abs(margins), axis=1) < eps
    full = (np.all(margins > eps, axis=1) | np.all(margins < -eps, axis=1)) & ~degenerate

    dots = u @ g.T
    proj_norm = np.sqrt(np.clip((1.0 - dots) * (1.0 + dots), 0.0, None))
    rest = ~(degenerate | full)
    degenerate |= rest & (np.min(proj_norm, axis=1) < eps)

    ii, jj = np.triu_indices(k, 1)
    cross = u @ np.cross(g[ii], g[jj]).T  # (m, pairs)
    degenerate |= rest & (np.min(np.abs(cross), axis=1) < eps)

    pos = np.zeros((m, k), dtype=np.int64)
    for p, (i, j) in enumerate(zip(ii, jj)):
        s = cross[:, p] > 0
        pos[:, i] += s
        pos[:, j] += ~s  # cross(j, i) = -cross(i, j)
    boundary = (pos == 0) | (pos == k - 1)
    salient = ~(degenerate | full)
    bad = salient & (boundary.sum(axis=1) != 2)
    degenerate |= bad
    salient &= ~bad

    kind = np.full(m, SALIENT, dtype=np.int8)
    kind[full] = FULL
    kind[degenerate] = DEGENERATE
    boundary &= salient[:, None]
    return kind, boundary


def outcome_from_codes(kind: int, boundary_row) -> ProjectionOutcome:
    if kind == DEGENERATE:
        return ProjectionOutcome.degenerate()
    if kind == FULL:
        return ProjectionOutcome.full_plane()
    return ProjectionOutcome.salient(np.flatnonzero(boundary_row))


def edge_in_lune_interior(c: Cone, u, i: int) -> bool:
    """True when ``u`` or ``-u`` is strictly inside the wedge of directions at edge ``i``.

    The wedge at edge ``i`` is bounded by the two facets through generator ``i``.
    When this holds the edge projects into the interior of the shadow.
    """
    n = c.normals
    a, b = n[(i - 1) % c.k] @ u, n[i] @ u
    return bool((a > 0 and b > 0) or (a < 0 and b < 0))
