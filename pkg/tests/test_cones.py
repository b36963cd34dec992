import math

import numpy as np
import pytest

from conicshadow.cones import (
    DEGENERATE, FULL, MembershipKind, ProjectionKind, classify_batch, classify_projection,
    cone_inner_angles, direction_membership, edge_in_lune_interior, exact_projection_expectations,
    make_cone, outcome_from_codes, solid_angle_excess,
)
from conicshadow.errors import DegenerateCone, NotSalient, RedundantGenerator
from conicshadow.geometry import random_rotation, unit_vectors
from conicshadow.spherical import SphericalTriangle, lhuilier_solid_angle
from helpers import (
    SQUARE, SQUARE_ALPHA, SQUARE_EDGES, SQUARE_THETA, TET_ALPHA, TET_CORNER, TET_EXPECTATIONS,
    random_cone, random_cone_generators,
)

OCTANT = make_cone(np.eye(3))


def unit(*x):
    v = np.array(x, float)
    return v / np.linalg.norm(v)


def extreme_rays_by_gap(cone, u):
    """Brute force: the two projected rays bounding the largest angular gap (> pi when salient)."""
    p = cone.generators - np.outer(cone.generators @ u, u)
    b = np.linalg.svd(u[None, :])[2][1:]
    xy = p @ b.T
    ang = np.arctan2(xy[:, 1], xy[:, 0])
    order = np.argsort(ang)
    s = ang[order]
    gaps = np.diff(np.append(s, s[0] + 2 * math.pi))
    i = int(np.argmax(gaps))
    assert gaps[i] > math.pi
    return {int(order[i]), int(order[(i + 1) % len(s)])}


def test_make_cone_examples():
    assert OCTANT.k == 3
    assert solid_angle_excess(OCTANT) == pytest.approx(math.pi / 2, abs=1e-15)
    with pytest.raises(NotSalient):
        make_cone([[1, 0, 0], [0, 1, 0], [-1, 0, 0]])
    sq = make_cone(SQUARE)
    assert sq.k == 4
    assert np.all(sq.generators @ [0, 0, 1] > 0)


def test_make_cone_errors():
    with pytest.raises(DegenerateCone):
        make_cone([[1, 0, 0], [0, 1, 0], [1, 1, 1e-14]])
    with pytest.raises(RedundantGenerator) as exc:
        make_cone([[1, 0, 1], [0, 1, 1], [0.1, 0.1, 1], [-1, 0, 1], [0, -1, 1]])
    assert exc.value.index == 2
    with pytest.raises(NotSalient):
        make_cone([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]])
    with pytest.raises(ValueError):
        make_cone([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(ValueError):
        make_cone([[1, 0, 0], [0, 0, 0], [0, 0, 1]])


def test_make_cone_reorders_into_cyclic_order():
    shuffled = [SQUARE[0], SQUARE[2], SQUARE[1], SQUARE[3]]
    c = make_cone(shuffled)
    assert sorted(c.input_index) == [0, 1, 2, 3]
    assert np.allclose(c.generators, np.array(shuffled, float)[list(c.input_index)] / math.sqrt(2))
    assert solid_angle_excess(c) == pytest.approx(SQUARE_ALPHA, abs=1e-12)
    # inward normals see every other generator on the positive side
    for i in range(4):
        others = [j for j in range(4) if j not in (i, (i + 1) % 4)]
        assert np.all(c.generators[others] @ c.normals[i] > 0)


def test_direction_membership_examples():
    m = direction_membership(OCTANT, unit(1, 1, 1))
    assert m.kind is MembershipKind.INTERIOR
    assert np.allclose(m.coefficients, np.ones(3) / math.sqrt(3))
    assert direction_membership(OCTANT, unit(1, 1, 0)).kind is MembershipKind.BOUNDARY
    assert direction_membership(OCTANT, unit(-1, 0, 0)).kind is MembershipKind.OUTSIDE
    sq = make_cone(SQUARE)
    assert direction_membership(sq, unit(0, 0, 1)).kind is MembershipKind.INTERIOR
    assert direction_membership(sq, unit(1, 0, 1)).kind is MembershipKind.BOUNDARY
    assert direction_membership(sq, unit(1, 0, 0)).kind is MembershipKind.OUTSIDE


def test_classify_examples():
    out = classify_projection(OCTANT, unit(1, 2, 3))
    assert out.kind is ProjectionKind.FULL_PLANE and out.vertex_count == 0 and out.edge_count == 0

    u = unit(-1, 2, 3)
    out = classify_projection(OCTANT, u)
    assert out.kind is ProjectionKind.SALIENT_CONE
    assert (out.vertex_count, out.edge_count) == (1, 2)
    assert out.boundary_generators == {1, 2}
    assert edge_in_lune_interior(OCTANT, u, 0)
    assert extreme_rays_by_gap(OCTANT, u) == {1, 2}

    assert classify_projection(OCTANT, unit(1, 0, 0)).kind is ProjectionKind.DEGENERATE
    assert classify_projection(OCTANT, unit(-1, -1, -1)).kind is ProjectionKind.FULL_PLANE


def test_tie_between_generators_is_degenerate():
    # u in the plane of two generators, outside the cone: e1 and e2 overlap in projection
    u = unit(1, 1, 0) * -1
    assert classify_projection(OCTANT, u).kind is ProjectionKind.DEGENERATE


def test_scalar_and_batch_classifiers_agree():
    rng = np.random.default_rng(8)
    for k in range(3, 7):
        c = random_cone(rng, k)
        u = unit_vectors(k, 0, 2000, 3)
        kind, boundary = classify_batch(c, u)
        for i in range(len(u)):
            assert classify_projection(c, u[i]) == outcome_from_codes(kind[i], boundary[i])


def test_boundary_criterion_consistency():
    rng = np.random.default_rng(99)
    checked = 0
    for trial in range(100):
        c = random_cone(rng, int(rng.integers(3, 7)))
        u = unit_vectors(trial, 0, 100, 3)
        kind, boundary = classify_batch(c, u)
        for row in range(100):
            if kind[row] == DEGENERATE:
                continue
            lune = {i for i in range(c.k) if not edge_in_lune_interior(c, u[row], i)}
            if kind[row] == FULL:
                assert lune == set()
            else:
                got = set(np.flatnonzero(boundary[row]).tolist())
                assert got == lune == extreme_rays_by_gap(c, u[row])
            checked += 1
    assert checked >= 9990


def test_census_law_per_sample():
    rng = np.random.default_rng(1)
    for k in range(3, 7):
        c = random_cone(rng, k)
        kind, boundary = classify_batch(c, unit_vectors(k, 0, 20000, 3))
        keep = kind != DEGENERATE
        vertices = (kind == 0).astype(int)
        assert np.array_equal(boundary.sum(axis=1)[keep], 2 * vertices[keep])


def test_exact_expectations_examples():
    assert exact_projection_expectations(OCTANT) == pytest.approx((0.75, 1.5, 0.25), abs=1e-15)
    tet = make_cone(TET_CORNER)
    assert exact_projection_expectations(tet) == pytest.approx(TET_EXPECTATIONS, abs=1e-14)
    sq = make_cone(SQUARE)
    assert cone_inner_angles(sq) == pytest.approx([SQUARE_THETA] * 4, abs=1e-14)
    ev, ee, pf = exact_projection_expectations(sq)
    assert ee == pytest.approx(SQUARE_EDGES, abs=1e-14)
    assert ev == pytest.approx(SQUARE_EDGES / 2, abs=1e-14)
    assert pf == pytest.approx(SQUARE_ALPHA / (2 * math.pi), abs=1e-14)


def test_exact_identity_holds_identically():
    rng = np.random.default_rng(3)
    for _ in range(500):
        c = random_cone(rng, int(rng.integers(3, 7)))
        ev, ee, _ = exact_projection_expectations(c)
        assert abs(ee - 2 * ev) <= 1e-12


def test_solid_angle_excess_examples():
    assert solid_angle_excess(make_cone(TET_CORNER)) == pytest.approx(TET_ALPHA, abs=1e-14)
    sq = make_cone(SQUARE)
    g = sq.generators
    two_triangles = (lhuilier_solid_angle(SphericalTriangle((g[0], g[1], g[2])))
                     + lhuilier_solid_angle(SphericalTriangle((g[0], g[2], g[3]))))
    assert solid_angle_excess(sq) == pytest.approx(two_triangles, abs=1e-9)
    assert solid_angle_excess(sq) == pytest.approx(SQUARE_ALPHA, abs=1e-14)


def test_polygon_excess_matches_triangle_fan():
    rng = np.random.default_rng(12)
    for _ in range(200):
        c = random_cone(rng, int(rng.integers(3, 7)))
        g = c.generators
        fan = sum(lhuilier_solid_angle(SphericalTriangle((g[0], g[i], g[i + 1])))
                  for i in range(1, c.k - 1))
        assert solid_angle_excess(c) == pytest.approx(fan, abs=1e-9)


def test_rotation_invariance():
    rng = np.random.default_rng(4)
    for _ in range(100):
        k = int(rng.integers(3, 7))
        gens = random_cone_generators(rng, k)
        q = random_rotation(rng)
        a = solid_angle_excess(make_cone(gens))
        b = solid_angle_excess(make_cone(gens @ q.T))
        assert abs(a - b) <= 1e-10


def test_degenerate_outcomes_are_rare():
    c = random_cone(np.random.default_rng(77), 4)
    kind, _ = classify_batch(c, unit_vectors(77, 0, 10**6, 3))
    assert np.count_nonzero(kind == DEGENERATE) / 10**6 <= 1e-4
