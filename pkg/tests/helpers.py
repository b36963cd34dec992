"""Random scene factories and frozen reference constants shared by the tests.

Reference constants were computed with mpmath at 30 digits from the closed
forms noted beside each one.
"""
import math

import numpy as np

from conicshadow.cones import make_cone
from conicshadow.geometry import random_rotation
from conicshadow.gram_euler import build_polygon_lattice
from conicshadow.simplex import make_simplex

TET_THETA = 1.2309594173407747  # acos(1/3)
TET_ALPHA = 0.5512855984325308  # 3 acos(1/3) - pi
TET_LUNE = 2.4619188346815494  # 2 acos(1/3)
TET_EDGE_RATE = 0.6081734479693927  # 1 - acos(1/3)/pi
TET_EXPECTATIONS = (0.9122601719540891, 1.8245203439081782, 0.08773982804591091)
SQUARE_THETA = 1.9106332362490186  # acos(-1/3)
SQUARE_ALPHA = 1.3593476378164877  # 4 acos(-1/3) - 2 pi
SQUARE_EDGES = 1.5673062081224291  # 4 - 4 acos(-1/3)/pi
CORNER_E1_ALPHA = 0.3398369094541219  # pi/2 + 2 acos(1/sqrt 3) - pi
FK_TETRAHEDRON = 0.3509593121836436  # 2 * 4 TET_ALPHA / (4 pi)
FK_CORNER = 0.4122601719540891  # 2 (pi/2 + 3 CORNER_E1_ALPHA) / (4 pi)

OCTANT = np.eye(3)
TET_CORNER = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
SQUARE = [[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]]
REGULAR_TETRAHEDRON = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
CORNER_SIMPLEX = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]


def van_oosterom_strackee(a, b, c):
    """Solid angle of the triangle cone (a, b, c) from the triple-product formula."""
    a, b, c = (np.asarray(v, float) / np.linalg.norm(v) for v in (a, b, c))
    num = abs(a @ np.cross(b, c))
    den = 1.0 + a @ b + b @ c + c @ a
    omega = 2.0 * math.atan2(num, den)
    return omega if omega >= 0 else omega + 2 * math.pi


def sorted_angles(rng, k, min_gap=0.05):
    while True:
        t = np.sort(rng.uniform(0, 2 * math.pi, k))
        gaps = np.diff(np.append(t, t[0] + 2 * math.pi))
        if gaps.min() > min_gap:
            return t


def random_cone_generators(rng, k):
    """k generators through a convex k-gon in the plane z = 1, randomly rotated."""
    t = sorted_angles(rng, k)
    r = rng.uniform(0.2, 3.0)
    centre = rng.uniform(-1.5, 1.5, 2)
    pts = np.column_stack([centre[0] + r * np.cos(t), centre[1] + r * np.sin(t), np.ones(k)])
    return pts @ random_rotation(rng).T


def random_cone(rng, k):
    return make_cone(random_cone_generators(rng, k))


def random_unit_triple(rng, min_det=1e-3):
    while True:
        v = rng.standard_normal((3, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        if abs(np.linalg.det(v)) > min_det:
            return v


def random_simplex(rng, n, min_det=0.05):
    while True:
        x = rng.standard_normal((n + 1, n))
        if abs(np.linalg.det(x[1:] - x[0])) > min_det:
            return make_simplex(x)


def random_polygon(rng, k):
    t = sorted_angles(rng, k)
    r = rng.uniform(0.5, 5.0)
    centre = rng.uniform(-3, 3, 2)
    return build_polygon_lattice(np.column_stack([centre[0] + r * np.cos(t), centre[1] + r * np.sin(t)]))
