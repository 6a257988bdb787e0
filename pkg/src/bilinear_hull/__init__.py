"""Exact convex hulls of a bounded bilinear product term.

The working frame is the normalized box [lx, 1] x [ly, 1] with product
bounds lz <= z <= uz; geometry maps raw boxes into it and back.
"""

from .constraints import (
    LinearInequality,
    Psd2,
    SocConstraint,
    TangentFamily,
    TangentSegment,
    envelope_z,
    evaluate,
    lifted_tangent,
    rlt,
    soc_center,
    soc_lower,
    soc_sides,
    soc_upper_general,
    soc_upper_zero,
)
from .errors import (
    BilinearHullError,
    DegenerateBounds,
    Infeasible,
    InfeasibleBounds,
    NegativeDiscriminant,
    OutOfDomain,
)
from .geometry import (
    DEFAULT_TOLERANCE,
    NormalizedBounds,
    Point3,
    RawBounds,
    Scaling,
    Tolerance,
    normalize,
    tighten,
    tighten_with_scaling,
)
from .hull import (
    BoundaryLine,
    BranchBlock,
    CaseTag,
    ExtendedFormulation,
    HalfPlane,
    HullDescription,
    HullPiece,
    Region,
    classify,
    describe,
    disjunctive,
    dline,
    envelope_grid,
    envelopes,
    hull_from_raw,
    membership,
    membership_mask,
    region_map_polylines,
    separate,
    worst_violation,
)
from .oracle import (
    SurfaceSample,
    oracle_envelope,
    oracle_envelope_many,
    oracle_membership,
    sample_surface,
)
from .volume import (
    BranchReport,
    Side,
    optimal_branch,
    vol_hull,
    vol_mc,
    vol_numeric,
    vol_removed,
    vol_rlt_cut,
)

__version__ = "0.1.0"

__all__ = [
    "BilinearHullError",
    "BoundaryLine",
    "BranchBlock",
    "BranchReport",
    "CaseTag",
    "DEFAULT_TOLERANCE",
    "DegenerateBounds",
    "ExtendedFormulation",
    "HalfPlane",
    "HullDescription",
    "HullPiece",
    "Infeasible",
    "InfeasibleBounds",
    "LinearInequality",
    "NegativeDiscriminant",
    "NormalizedBounds",
    "OutOfDomain",
    "Point3",
    "Psd2",
    "RawBounds",
    "Region",
    "Scaling",
    "Side",
    "SocConstraint",
    "SurfaceSample",
    "TangentFamily",
    "TangentSegment",
    "Tolerance",
    "classify",
    "describe",
    "disjunctive",
    "dline",
    "envelope_grid",
    "envelope_z",
    "envelopes",
    "evaluate",
    "hull_from_raw",
    "lifted_tangent",
    "membership",
    "membership_mask",
    "normalize",
    "optimal_branch",
    "oracle_envelope",
    "oracle_envelope_many",
    "oracle_membership",
    "region_map_polylines",
    "rlt",
    "sample_surface",
    "separate",
    "soc_center",
    "soc_lower",
    "soc_sides",
    "soc_upper_general",
    "soc_upper_zero",
    "tighten",
    "tighten_with_scaling",
    "vol_hull",
    "vol_mc",
    "vol_numeric",
    "vol_removed",
    "vol_rlt_cut",
    "worst_violation",
]
