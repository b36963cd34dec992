import dataclasses
import math

import numpy as np
import pytest

from conicshadow.cones import cone_inner_angles, exact_projection_expectations, make_cone, solid_angle_excess
from conicshadow.errors import ExcessiveDegeneracy
from conicshadow.montecarlo import (
    EstimatorReport, combine, derive_seed, edge_vertex_ratio_check, estimate_solid_angle_at_point,
    run_cone_estimator, solid_angle_from_vertex_rate,
)
from helpers import SQUARE, SQUARE_ALPHA, TET_ALPHA, TET_CORNER, TET_EXPECTATIONS, random_cone

OCTANT = make_cone(np.eye(3))


@pytest.fixture(scope="module")
def octant_census():
    return run_cone_estimator(OCTANT, 10**6, seed=7)


def test_report_invariants():
    r = EstimatorReport.from_sums(1000, 10, 330, 330, seed=3)
    n = 990
    p = 330 / n
    sd = math.sqrt(p * (1 - p) * n / (n - 1))
    assert r.estimate == pytest.approx(p, rel=1e-15)
    assert r.stderr == pytest.approx(sd / math.sqrt(n), rel=1e-12)
    assert r.ci95_low == pytest.approx(r.estimate - 1.96 * r.stderr)
    assert r.ci95_high == pytest.approx(r.estimate + 1.96 * r.stderr)
    assert r.to_json() == {"samples": 1000, "degenerate": 10, "estimate": r.estimate,
                           "stderr": r.stderr, "ci95": [r.ci95_low, r.ci95_high], "seed": 3}


def test_report_from_constant_values_has_zero_stderr():
    r = EstimatorReport.from_sums(500, 0, 1000, 2000, seed=0)
    assert (r.estimate, r.stderr) == (2.0, 0.0)


def test_combine_adds_in_quadrature():
    a = EstimatorReport.build(10, 0, 1.0, 0.3, 0)
    b = EstimatorReport.build(10, 0, 2.0, 0.4, 0)
    c = combine([a, b], [1, -1])
    assert c.estimate == -1.0
    assert c.stderr == pytest.approx(0.5)


def test_derived_seeds_differ():
    assert len({derive_seed(1, i) for i in range(100)}) == 100
    assert derive_seed(1, 2) == derive_seed(1, 2)


def test_octant_census(octant_census):
    c = octant_census
    assert c.degenerate_count == 0
    assert c.p_full_plane.covers(0.25)
    assert c.p_full_plane.stderr == pytest.approx(4.33e-4, rel=0.01)
    assert c.expected_vertices.covers(0.75)
    assert c.expected_edges.covers(1.5)
    assert c.law_violations == 0
    for rate in c.per_edge_boundary_rate:
        assert rate.covers(0.5)


def test_solid_angle_from_vertex_rate(octant_census):
    a = solid_angle_from_vertex_rate(octant_census)
    assert a.covers(math.pi / 2)
    assert a.stderr == pytest.approx(2.72e-3, rel=0.01)
    assert a.stderr == pytest.approx(2 * math.pi * octant_census.expected_vertices.stderr)


def test_tetrahedral_and_square_cones():
    tet = run_cone_estimator(make_cone(TET_CORNER), 10**6, seed=1)
    assert tet.expected_edges.covers(TET_EXPECTATIONS[1])
    assert solid_angle_from_vertex_rate(tet).covers(TET_ALPHA)
    sq = run_cone_estimator(make_cone(SQUARE), 10**6, seed=2)
    assert solid_angle_from_vertex_rate(sq).covers(SQUARE_ALPHA)


def test_ratio_check_exact_without_degeneracy():
    c = run_cone_estimator(OCTANT, 10**5, seed=5)
    ratio, ok = edge_vertex_ratio_check(c)
    assert c.degenerate_count == 0
    assert ratio == 2.0 and ok


def test_ratio_check_random_cones_pass():
    rng = np.random.default_rng(0)
    for seed in range(10):
        c = run_cone_estimator(random_cone(rng, int(rng.integers(3, 7))), 10**4, seed)
        assert edge_vertex_ratio_check(c)[1]


def test_ratio_check_negative_control(octant_census):
    c = octant_census
    n = c.expected_edges.effective_samples
    # pretend one extra edge was counted on 1% of samples
    extra = n // 100
    corrupted = dataclasses.replace(
        c,
        sum_edges=c.sum_edges + extra,
        edge_excess=EstimatorReport.from_sums(c.samples, c.degenerate_count, extra, extra, c.seed),
    )
    ratio, ok = edge_vertex_ratio_check(corrupted)
    assert ratio > 2 and not ok


def test_worker_count_does_not_change_results():
    cone = make_cone(SQUARE)
    a = run_cone_estimator(cone, 300_000, seed=9, workers=1)
    b = run_cone_estimator(cone, 300_000, seed=9, workers=4, chunk=10_000)
    assert a == b


def test_excessive_degeneracy_raises():
    with pytest.raises(ExcessiveDegeneracy):
        run_cone_estimator(OCTANT, 1000, seed=0, eps=0.05)
    with pytest.raises(ValueError):
        run_cone_estimator(OCTANT, 99, seed=0)


def test_solid_angle_at_point_examples():
    octant = estimate_solid_angle_at_point(lambda u: np.all(u >= 0, axis=1), 3, 10**6, seed=1)
    assert octant.covers(math.pi / 2)
    half = estimate_solid_angle_at_point(lambda u: u[:, 2] >= 0, 3, 10**6, seed=2)
    assert half.covers(2 * math.pi)
    inv = np.linalg.inv(np.array(TET_CORNER, float))
    tet = estimate_solid_angle_at_point(lambda u: np.all(u @ inv >= 0, axis=1), 3, 10**6, seed=3)
    assert tet.covers(TET_ALPHA)
    assert tet.degenerate_count == 0


def test_stderr_halves_when_samples_quadruple():
    cone = make_cone(TET_CORNER)
    a = solid_angle_from_vertex_rate(run_cone_estimator(cone, 100_000, 4))
    b = solid_angle_from_vertex_rate(run_cone_estimator(cone, 400_000, 4))
    assert a.stderr / b.stderr == pytest.approx(2.0, rel=0.2)


def test_exact_and_monte_carlo_agree_on_random_cones():
    rng = np.random.default_rng(50)
    hits = np.zeros(3, int)
    for seed in range(50):
        cone = random_cone(rng, int(rng.integers(3, 7)))
        ev, ee, pf = exact_projection_expectations(cone)
        c = run_cone_estimator(cone, 10**5, seed)
        hits += [c.p_full_plane.covers(pf), c.expected_vertices.covers(ev), c.expected_edges.covers(ee)]
    assert np.all(hits >= 48)


def test_per_edge_rates_match_lune_measure():
    rng = np.random.default_rng(60)
    for seed in range(5):
        cone = random_cone(rng, int(rng.integers(3, 7)))
        c = run_cone_estimator(cone, 200_000, seed)
        for rate, theta in zip(c.per_edge_boundary_rate, cone_inner_angles(cone)):
            assert rate.covers(1 - theta / math.pi)
        assert solid_angle_from_vertex_rate(c).covers(solid_angle_excess(cone))
