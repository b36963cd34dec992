"""Command-line entry point.

Exit status: 0 when every identity check passes, 1 when one fails, 2 for
usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .cones import (
    EPSILON, classify_projection, edge_in_lune_interior, exact_projection_expectations,
    solid_angle_excess,
)
from .errors import GeometryError, InputError
from .gram_euler import gram_euler_sum
from .montecarlo import (
    EstimatorReport, edge_vertex_ratio_check, run_cone_estimator, solid_angle_from_vertex_rate,
)
from .scenes import load_cone, load_polytope, load_simplex, read_scene
from .simplex import check_fk_identity
from .spherical import SphericalTriangle, lhuilier_solid_angle

COMMANDS = ("excess", "project", "mc-cone", "mc-simplex", "gram-euler", "convergence")
CSV_HEADER = ["samples", "estimate", "stderr", "ci95_low", "ci95_high"]
EXACT_TOL = 1e-9


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    scene: str
    samples: int = 10**6
    seed: int = 0
    epsilon: float = EPSILON
    output: str = "text"
    csv_out: str | None = None
    mode: str | None = None
    direction: tuple | None = None
    workers: int = 1

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.samples < 100:
            raise UsageError("--samples must be at least 100")
        if not 0.0 < self.epsilon < 1e-3:
            raise UsageError("--epsilon must lie in (0, 1e-3)")
        if self.mode not in (None, "exact", "mc"):
            raise UsageError("--mode must be 'exact' or 'mc'")
        if self.workers < 1:
            raise UsageError("--workers must be positive")


def lhuilier_fan(generators: np.ndarray) -> float:
    """Cone solid angle as a fan of L'Huilier triangles from the first generator."""
    g = generators
    return math.fsum(lhuilier_solid_angle(SphericalTriangle((g[0], g[i], g[i + 1])))
                     for i in range(1, len(g) - 1))


def cmd_excess(cfg):
    cone = load_cone(read_scene(cfg.scene))
    alpha = solid_angle_excess(cone)
    oracle = lhuilier_fan(cone.generators)
    ev, ee, pf = exact_projection_expectations(cone)
    diff = abs(alpha - oracle)
    passed = diff <= EXACT_TOL and abs(ee - 2 * ev) <= 1e-12
    return passed, {
        "generators": cone.k,
        "alpha_excess": alpha,
        "alpha_lhuilier": oracle,
        "oracle_diff": diff,
        "expected_vertices": ev,
        "expected_edges": ee,
        "p_full_plane": pf,
        "pass": passed,
    }


def cmd_project(cfg):
    cone = load_cone(read_scene(cfg.scene))
    if cfg.direction is None:
        raise UsageError("project needs --direction x,y,z")
    u = np.asarray(cfg.direction, dtype=float)
    if u.shape != (3,) or np.linalg.norm(u) == 0:
        raise UsageError("--direction must be a nonzero 3-vector")
    u = u / np.linalg.norm(u)
    out = classify_projection(cone, u, cfg.epsilon)
    lune = [i for i in range(cone.k) if not edge_in_lune_interior(cone, u, i)]
    return True, {
        "direction": u.tolist(),
        "kind": out.kind.value,
        "vertex_count": out.vertex_count,
        "edge_count": out.edge_count,
        "boundary_generators": sorted(out.boundary_generators),
        "lune_boundary_generators": lune,
        "generator_order": list(cone.input_index),
    }


def cmd_mc_cone(cfg):
    cone = load_cone(read_scene(cfg.scene))
    census = run_cone_estimator(cone, cfg.samples, cfg.seed, cfg.epsilon, cfg.workers)
    alpha_hat = solid_angle_from_vertex_rate(census)
    ratio, ratio_ok = edge_vertex_ratio_check(census)
    alpha = solid_angle_excess(cone)
    _, _, pf = exact_projection_expectations(cone)
    checks = {
        "alpha_covered": alpha_hat.covers(alpha),
        "p_full_plane_covered": census.p_full_plane.covers(pf),
        "ratio_is_two": ratio_ok,
    }
    passed = all(checks.values())
    return passed, {
        "census": census.to_json(),
        "alpha_hat": alpha_hat.to_json(),
        "alpha_exact": alpha,
        "p_full_plane_exact": pf,
        "edge_vertex_ratio": ratio,
        "checks": checks,
        "pass": passed,
    }


def cmd_mc_simplex(cfg):
    s = load_simplex(read_scene(cfg.scene))
    mode = cfg.mode or "mc"
    try:
        lhs, rhs, passed = check_fk_identity(s, cfg.samples, cfg.seed, cfg.epsilon, cfg.workers, mode)
    except GeometryError as exc:
        raise UsageError(str(exc)) from exc
    return passed, {"dim": s.n, "mode": mode, "lhs": lhs.to_json(), "rhs": rhs.to_json(),
                    "diff": abs(lhs.estimate - rhs.estimate), "pass": passed}


def cmd_gram_euler(cfg):
    p = load_polytope(read_scene(cfg.scene))
    mode = cfg.mode or "exact"
    try:
        report = gram_euler_sum(p, mode, cfg.samples, cfg.seed, cfg.epsilon, cfg.workers)
    except GeometryError as exc:
        raise UsageError(f"{exc}; try --mode mc") from exc
    out = report.to_json()
    out["f_vector"] = list(p.f_vector())
    return report.passed, out


def sample_ladder(limit: int) -> list:
    ns = []
    n = 1000
    while n < limit:
        ns.append(n)
        n *= 10
    ns.append(limit)
    return ns


def write_convergence_csv(series, path) -> None:
    """Write ``(N, EstimatorReport)`` pairs (or ``(N, estimate, stderr)`` triples) as CSV."""
    rows = []
    for item in series:
        if len(item) == 2:
            n, rep = item
            est, se = rep.estimate, rep.stderr
        else:
            n, est, se = item
        rows.append((int(n), float(est), float(se)))
    ns = [r[0] for r in rows]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("sample counts must be strictly increasing")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for n, est, se in rows:
            w.writerow([n, repr(est), repr(se), repr(est - 1.96 * se), repr(est + 1.96 * se)])


def cmd_convergence(cfg):
    cone = load_cone(read_scene(cfg.scene))
    alpha = solid_angle_excess(cone)
    series = []
    for n in sample_ladder(cfg.samples):
        census = run_cone_estimator(cone, n, cfg.seed, cfg.epsilon, cfg.workers)
        series.append((n, solid_angle_from_vertex_rate(census)))
    if cfg.csv_out:
        try:
            write_convergence_csv(series, cfg.csv_out)
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.csv_out}: {exc.strerror}") from exc
    passed = all(rep.covers(alpha) for _, rep in series)
    return passed, {
        "alpha_exact": alpha,
        "rows": [{"samples": n, "estimate": r.estimate, "stderr": r.stderr} for n, r in series],
        "pass": passed,
    }


HANDLERS = {
    "excess": cmd_excess,
    "project": cmd_project,
    "mc-cone": cmd_mc_cone,
    "mc-simplex": cmd_mc_simplex,
    "gram-euler": cmd_gram_euler,
    "convergence": cmd_convergence,
}


def run_command(cfg: RunConfig):
    """Run one command; returns ``(exit_status, report)``. Input errors raise."""
    cfg.validate()
    passed, body = HANDLERS[cfg.command](cfg)
    report = {
        "command": cfg.command,
        "scene": cfg.scene,
        "config": {"samples": cfg.samples, "seed": cfg.seed, "epsilon": cfg.epsilon},
        "result": body,
        "status": "pass" if passed else "fail",
    }
    return (0 if passed else 1), report


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return str(v).lower() if v is not None else "-"
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def render_text(report: dict) -> str:
    lines = [f"{k}: {_fmt(v)}" for k, v in _flatten(report) if k != "status"]
    lines.append(report["status"].upper())
    return "\n".join(lines) + "\n"


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _direction(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scene", help="preset name, inline JSON object, or path to a JSON scene file")
    common.add_argument("--samples", type=int, default=10**6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--epsilon", type=float, default=EPSILON)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--csv-out", metavar="PATH")
    common.add_argument("--mode", choices=("exact", "mc"))
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--direction", type=_direction, help="projection direction x,y,z (project)")

    parser = argparse.ArgumentParser(prog="conicshadow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "excess": "exact apex solid angle of a cone, checked against L'Huilier",
        "project": "classify the shadow of a cone along one direction",
        "mc-cone": "Monte Carlo census of random cone shadows",
        "mc-simplex": "shadow probability identity for an n-simplex",
        "gram-euler": "alternating face-angle sum of a polytope",
        "convergence": "standard error of the solid-angle estimate versus sample count",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command, scene=args.scene, samples=args.samples, seed=args.seed,
        epsilon=args.epsilon, output="json" if args.json else "text", csv_out=args.csv_out,
        mode=args.mode, direction=args.direction, workers=args.workers,
    )
    try:
        status, report = run_command(cfg)
    except (UsageError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render_json(report) if cfg.output == "json" else render_text(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
