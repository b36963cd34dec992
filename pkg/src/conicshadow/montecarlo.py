"""Seeded Monte Carlo estimators for shadow statistics and solid angles.

Work is split into fixed index chunks. Each chunk returns integer tallies and
the tallies are summed, so results do not depend on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cones import DEGENERATE, EPSILON, FULL, SALIENT, Cone, classify_batch
from .errors import ExcessiveDegeneracy
from .geometry import sphere_area, unit_vectors

CHUNK = 1 << 16
MAX_DEGENERATE_FRACTION = 0.01
Z95 = 1.96
GATE_SIGMAS = 4.0


@dataclass(frozen=True)
class EstimatorReport:
    samples: int
    degenerate_count: int
    estimate: float
    stderr: float
    ci95_low: float
    ci95_high: float
    seed: int

    @classmethod
    def from_sums(cls, samples, degenerate, total, total_sq, seed, scale=1.0):
        """Mean and standard error of per-sample integer values given their sums.

        ``total`` and ``total_sq`` are exact integer sums over the
        ``samples - degenerate`` retained samples.
        """
        n = samples - degenerate
        if n < 2:
            raise ValueError("need at least two non-degenerate samples")
        mean = Fraction(int(total), n)
        var = (Fraction(int(total_sq)) - n * mean * mean) / (n - 1)
        stderr = math.sqrt(var / n) if var > 0 else 0.0
        return cls.build(samples, degenerate, float(mean) * scale, stderr * scale, seed)

    @classmethod
    def build(cls, samples, degenerate, estimate, stderr, seed):
        return cls(
            samples=int(samples),
            degenerate_count=int(degenerate),
            estimate=float(estimate),
            stderr=float(stderr),
            ci95_low=float(estimate - Z95 * stderr),
            ci95_high=float(estimate + Z95 * stderr),
            seed=int(seed),
        )

    @property
    def effective_samples(self) -> int:
        return self.samples - self.degenerate_count

    def scaled(self, factor: float) -> "EstimatorReport":
        return self.build(self.samples, self.degenerate_count, self.estimate * factor,
                          self.stderr * abs(factor), self.seed)

    def covers(self, value: float, sigmas: float = GATE_SIGMAS) -> bool:
        return abs(self.estimate - value) <= sigmas * self.stderr

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "degenerate": self.degenerate_count,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "ci95": [self.ci95_low, self.ci95_high],
            "seed": self.seed,
        }


def combine(reports, weights, seed=None) -> EstimatorReport:
    """Weighted sum of independent estimates; standard errors add in quadrature."""
    reports = list(reports)
    weights = list(weights)
    est = math.fsum(w * r.estimate for w, r in zip(weights, reports))
    se = math.sqrt(math.fsum((w * r.stderr) ** 2 for w, r in zip(weights, reports)))
    return EstimatorReport.build(
        sum(r.samples for r in reports),
        sum(r.degenerate_count for r in reports),
        est,
        se,
        reports[0].seed if seed is None else seed,
    )


def derive_seed(seed: int, *tags: int) -> int:
    """Independent 64-bit sub-seed for a labelled sub-stream of ``seed``."""
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=tuple(int(t) for t in tags))
    return int(ss.generate_state(1, np.uint64)[0])


def chunked_tally(fn, n_samples: int, workers: int = 1, chunk: int = CHUNK) -> np.ndarray:
    """Apply ``fn(start, count) -> int64 array`` over fixed chunks and sum the results."""
    ranges = [(s, min(chunk, n_samples - s)) for s in range(0, n_samples, chunk)]
    if workers <= 1 or len(ranges) == 1:
        parts = [fn(s, c) for s, c in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: fn(*r), ranges))
    total = np.zeros_like(parts[0], dtype=np.int64)
    for p in parts:
        total += p
    return total


@dataclass(frozen=True)
class ConeCensus:
    p_full_plane: EstimatorReport
    expected_vertices: EstimatorReport
    expected_edges: EstimatorReport
    per_edge_boundary_rate: tuple
    # per-sample edges - 2 * vertices; identically zero when the census law holds
    edge_excess: EstimatorReport
    sum_vertices: int
    sum_edges: int
    law_violations: int
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def samples(self) -> int:
        return self.p_full_plane.samples

    @property
    def degenerate_count(self) -> int:
        return self.p_full_plane.degenerate_count

    @property
    def seed(self) -> int:
        return self.p_full_plane.seed

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "degenerate": self.degenerate_count,
            "seed": self.seed,
            "p_full_plane": self.p_full_plane.to_json(),
            "expected_vertices": self.expected_vertices.to_json(),
            "expected_edges": self.expected_edges.to_json(),
            "per_edge_boundary_rate": [r.to_json() for r in self.per_edge_boundary_rate],
            "census_law_violations": self.law_violations,
        }


def run_cone_estimator(cone: Cone, n_samples: int, seed: int, eps: float = EPSILON,
                       workers: int = 1, chunk: int = CHUNK) -> ConeCensus:
    """Classify ``n_samples`` random shadows of ``cone`` and tally their census."""
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    k = cone.k

    def work(start, count):
        u = unit_vectors(seed, start, count, 3)
        kind, boundary = classify_batch(cone, u, eps)
        keep = kind != DEGENERATE
        v = (kind == SALIENT).astype(np.int64)
        e = boundary.sum(axis=1).astype(np.int64)
        d = (e - 2 * v)[keep]
        return np.concatenate([
            [np.count_nonzero(~keep), np.count_nonzero(kind == FULL), v.sum(),
             e.sum(), (e * e).sum(), d.sum(), (d * d).sum(), np.count_nonzero(d)],
            boundary.sum(axis=0),
        ]).astype(np.int64)

    t = [int(x) for x in chunked_tally(work, n_samples, workers, chunk)]
    n_deg, n_full, s_v, s_e, ss_e, s_d, ss_d, n_bad = t[:8]
    edge_counts = t[8:]
    if n_deg > MAX_DEGENERATE_FRACTION * n_samples:
        raise ExcessiveDegeneracy(
            f"{n_deg} of {n_samples} samples degenerate (limit {MAX_DEGENERATE_FRACTION:.0%})")

    def rep(s, ss):
        return EstimatorReport.from_sums(n_samples, n_deg, s, ss, seed)

    return ConeCensus(
        p_full_plane=rep(n_full, n_full),
        expected_vertices=rep(s_v, s_v),
        expected_edges=rep(s_e, ss_e),
        per_edge_boundary_rate=tuple(rep(c, c) for c in edge_counts),
        edge_excess=rep(s_d, ss_d),
        sum_vertices=s_v,
        sum_edges=s_e,
        law_violations=n_bad,
    )


def solid_angle_from_vertex_rate(census: ConeCensus) -> EstimatorReport:
    """Apex solid angle recovered from the vertex rate: 2 pi (1 - E[#vertices])."""
    v = census.expected_vertices
    return EstimatorReport.build(v.samples, v.degenerate_count, 2.0 * math.pi * (1.0 - v.estimate),
                                 2.0 * math.pi * v.stderr, v.seed)


def edge_vertex_ratio_check(census: ConeCensus, sigmas: float = GATE_SIGMAS):
    """Return ``(ratio, passed)`` for the claim E[#edges] = 2 E[#vertices].

    The ratio's standard error comes from the per-sample difference
    ``edges - 2 * vertices`` divided by the vertex rate.
    """
    if census.sum_vertices <= 0:
        raise ValueError("no salient shadows observed; ratio undefined")
    ratio = census.sum_edges / census.sum_vertices
    se = census.edge_excess.stderr / census.expected_vertices.estimate
    return ratio, bool(abs(ratio - 2.0) <= sigmas * se)


def estimate_solid_angle_at_point(membership_oracle, dim: int, n_samples: int, seed: int,
                                  workers: int = 1, chunk: int = CHUNK) -> EstimatorReport:
    """Surface measure of the set of directions accepted by ``membership_oracle``.

    The oracle takes an ``(m, dim)`` array of unit directions and returns a
    boolean array of length ``m``.
    """
    def work(start, count):
        u = unit_vectors(seed, start, count, dim)
        hits = np.asarray(membership_oracle(u), dtype=bool)
        return np.array([np.count_nonzero(hits)], dtype=np.int64)

    hits = int(chunked_tally(work, n_samples, workers, chunk)[0])
    return EstimatorReport.from_sums(n_samples, 0, hits, hits, seed, scale=sphere_area(dim))
