"""Solid angles of cones and polytopes, exactly and from random projections."""
from .cones import (
    Cone, Membership, MembershipKind, ProjectionKind, ProjectionOutcome, classify_projection,
    direction_membership, exact_projection_expectations, make_cone, solid_angle_excess,
)
from .geometry import (
    SampleStream, complement_basis, project_to_complement, sample_unit_vector, unit_ball_volume,
)
from .gram_euler import (
    Face, GramEulerReport, PolytopeFaceLattice, build_polygon_lattice, build_simplex_lattice,
    face_solid_angle, gram_euler_sum, make_lattice,
)
from .montecarlo import (
    ConeCensus, EstimatorReport, edge_vertex_ratio_check, estimate_solid_angle_at_point,
    run_cone_estimator, solid_angle_from_vertex_rate,
)
from .simplex import (
    ShadowKind, ShadowVerdict, SimplexN, check_fk_identity, classify_simplex_projection,
    estimate_p_simplex, estimate_vertex_solid_angle, make_simplex,
)
from .spherical import (
    InnerAngles, SphericalTriangle, edge_lune_measure, excess_area, inner_angles,
    lhuilier_solid_angle,
)

__version__ = "0.1.0"
