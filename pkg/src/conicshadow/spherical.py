"""Spherical trigonometry on S^2: inner angles, excess area, lunes, L'Huilier."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriangle, GeometryError, NumericalDegeneracy
from .geometry import angle_between, as_unit_vector

DET_TOL = 1e-10


@dataclass(frozen=True)
class SphericalTriangle:
    vertices: tuple

    def __post_init__(self):
        vs = tuple(as_unit_vector(v) for v in self.vertices)
        if len(vs) != 3 or any(v.size != 3 for v in vs):
            raise GeometryError("a spherical triangle needs three unit vectors in R^3")
        if abs(np.linalg.det(np.array(vs))) < DET_TOL:
            raise DegenerateTriangle("triangle vertices are (nearly) coplanar with the origin")
        object.__setattr__(self, "vertices", vs)

    @classmethod
    def from_points(cls, a, b, c):
        """Build from arbitrary nonzero vectors, normalizing each."""
        return cls(tuple(np.asarray(v, float) / np.linalg.norm(v) for v in (a, b, c)))

    def matrix(self) -> np.ndarray:
        return np.array(self.vertices)


@dataclass(frozen=True)
class InnerAngles:
    theta: tuple

    def __post_init__(self):
        th = tuple(float(t) for t in self.theta)
        if len(th) != 3 or not all(0.0 < t < math.pi for t in th):
            raise GeometryError(f"inner angles must be three values in (0, pi), got {th}")
        object.__setattr__(self, "theta", th)

    def __iter__(self):
        return iter(self.theta)


def tangent_angle(at, p, q) -> float:
    """Angle at unit vector ``at`` between the great-circle arcs towards ``p`` and ``q``."""
    at = np.asarray(at, float)
    tp = p - (p @ at) * at
    tq = q - (q @ at) * at
    return angle_between(tp, tq)


def inner_angles(t: SphericalTriangle) -> InnerAngles:
    v = t.vertices
    return InnerAngles(tuple(tangent_angle(v[i], v[(i + 1) % 3], v[(i + 2) % 3]) for i in range(3)))


def excess_area(a: InnerAngles) -> float:
    """Area of a spherical triangle from its inner angles: the angle sum minus pi."""
    return sum(a.theta) - math.pi


def lhuilier_solid_angle(t: SphericalTriangle) -> float:
    """Area of ``t`` from its side lengths alone (L'Huilier's theorem).

    Shares nothing with the inner-angle route, which makes it a usable oracle.
    """
    v = t.vertices
    a = angle_between(v[1], v[2])
    b = angle_between(v[2], v[0])
    c = angle_between(v[0], v[1])
    s = 0.5 * (a + b + c)
    halves = [0.5 * s, 0.5 * (s - a), 0.5 * (s - b), 0.5 * (s - c)]
    if min(halves) < -1e-12:
        raise NumericalDegeneracy(f"L'Huilier tangent argument negative: {min(halves)!r}")
    prod = 1.0
    for h in halves:
        prod *= math.tan(max(h, 0.0))
    return 4.0 * math.atan(math.sqrt(max(prod, 0.0)))


def edge_lune_measure(theta: float) -> float:
    """Area of the lune of directions entering a wedge of dihedral angle ``theta``."""
    if not 0.0 < theta < math.pi:
        raise GeometryError(f"dihedral angle must lie in (0, pi), got {theta!r}")
    return 2.0 * theta
