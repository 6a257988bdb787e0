"""Piecewise hull descriptions: case analysis, membership, separation.

A description is the conjunction of the four RLT planes, the product bounds
on z, the box, and a short list of pieces.  A piece is a cone constraint
together with the half-plane predicate that carves out the part of the box
where the cone is the binding upper boundary; outside its predicate a piece
imposes nothing.  Only some pieces are valid over the whole box, so the
predicates are part of the description, not an optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constraints import (
    LinearInequality,
    SocConstraint,
    TangentFamily,
    lifted_tangent,
    rlt,
    soc_center,
    soc_lower,
    soc_sides,
    soc_upper_general,
)
from .errors import DegenerateBounds, OutOfDomain
from .geometry import (
    DEFAULT_TOLERANCE,
    NormalizedBounds,
    Point3,
    RawBounds,
    Scaling,
    Tolerance,
    normalize,
    tighten_with_scaling,
)


class Region(Enum):
    NO_Z_BOUND = "NoZBound"
    UPPER_ONLY = "UpperOnly"
    LOWER_ONLY = "LowerOnly"
    BOTH_ZERO_LB = "BothZeroLB"
    A = "RegionA"
    B = "RegionB"
    C = "RegionC"
    D = "RegionD"
    # E and F are the x<->y mirrors of C and D.  classify() never returns
    # them; it reports C or D with the swapped flag set instead.
    E = "RegionE"
    F = "RegionF"


_REGION_LETTER = {Region.A: "A", Region.B: "B", Region.C: "C", Region.D: "D"}
_SWAPPED_LETTER = {Region.C: "E", Region.D: "F"}


@dataclass(frozen=True)
class CaseTag:
    region: Region
    swapped: bool = False

    @property
    def letter(self) -> str | None:
        """Map letter for the region cases; mirrored regions get E/F."""
        if self.region not in _REGION_LETTER:
            return None
        if self.swapped and self.region in _SWAPPED_LETTER:
            return _SWAPPED_LETTER[self.region]
        return _REGION_LETTER[self.region]

    def to_dict(self) -> dict:
        return {"region": self.region.value, "swapped": self.swapped,
                "letter": self.letter}


@dataclass(frozen=True)
class HalfPlane:
    """a0 + ax*x + ay*y >= 0 in the (x, y) box."""

    a0: float
    ax: float
    ay: float

    def value(self, x, y):
        return self.a0 + self.ax * x + self.ay * y

    def holds(self, x, y, slack: float = 0.0):
        return self.value(x, y) >= -slack

    def mirrored(self) -> "HalfPlane":
        return HalfPlane(self.a0, self.ay, self.ax)

    def to_dict(self) -> dict:
        return {"a0": self.a0, "ax": self.ax, "ay": self.ay}


@dataclass(frozen=True)
class BoundaryLine:
    """y = intercept + slope*x, the piece boundary for the far-corner case.

    Joins the curve endpoint (lz/ly, ly) to the box corner point (uz, 1).
    """

    intercept: float
    slope: float

    def y_at(self, x):
        return self.intercept + self.slope * x


def dline(ly: float, lz: float, uz: float) -> BoundaryLine:
    den = uz * ly - lz
    if den <= 0.0:
        raise DegenerateBounds("boundary line needs uz*ly > lz")
    return BoundaryLine((uz * ly * ly - lz) / den, ly * (1.0 - ly) / den)


@dataclass(frozen=True)
class HullPiece:
    predicate: tuple[HalfPlane, ...]
    soc: SocConstraint
    globally_valid: bool

    def applicable(self, x, y, slack: float = 0.0):
        if not self.predicate:
            if np.ndim(x) == 0:
                return True
            return np.ones(np.broadcast(x, y).shape, dtype=bool)
        out = self.predicate[0].holds(x, y, slack)
        for hp in self.predicate[1:]:
            out = out & hp.holds(x, y, slack)
        return out

    def mirrored(self) -> "HullPiece":
        return HullPiece(tuple(hp.mirrored() for hp in self.predicate),
                         self.soc.mirrored(), self.globally_valid)

    def to_dict(self) -> dict:
        return {"predicate": [hp.to_dict() for hp in self.predicate],
                "soc": self.soc.to_dict(), "global": self.globally_valid}


@dataclass(frozen=True)
class HullDescription:
    bounds: NormalizedBounds
    case: CaseTag
    rlt: tuple[LinearInequality, ...]
    zlo: float
    zhi: float
    pieces: tuple[HullPiece, ...]

    def to_dict(self) -> dict:
        return {
            "bounds": {"lx": self.bounds.lx, "ly": self.bounds.ly,
                       "lz": self.bounds.lz, "uz": self.bounds.uz},
            "case": self.case.to_dict(),
            "rlt": [q.to_dict() for q in self.rlt],
            "zlo": self.zlo,
            "zhi": self.zhi,
            "pieces": [p.to_dict() for p in self.pieces],
        }


def _classifiable(b: NormalizedBounds) -> None:
    # the zero-lower-corner family is exact without tightening; everything
    # else relies on the tightened-bound assumptions
    if b.lx == 0.0 and b.ly == 0.0:
        return
    if not b.is_tightened():
        raise OutOfDomain("bounds must be tightened (or have lx = ly = 0)")


def classify(b: NormalizedBounds, tol: Tolerance = DEFAULT_TOLERANCE) -> CaseTag:
    """Which of the structural cases the bounds fall into.

    Mirrored configurations report the canonical region with swapped=True.
    Threshold ties resolve toward the region listed first in the region
    scan order (A, then B, then C, then D).
    """
    _classifiable(b)
    low_triv, up_triv = b.lower_trivial, b.upper_trivial
    if low_triv and up_triv:
        return CaseTag(Region.NO_Z_BOUND)
    if low_triv:
        return CaseTag(Region.UPPER_ONLY)
    if up_triv:
        return CaseTag(Region.LOWER_ONLY)
    if b.lx == 0.0 and b.ly == 0.0:
        return CaseTag(Region.BOTH_ZERO_LB)
    swapped = b.lx > b.ly
    bb = b.swapped() if swapped else b
    bt = tol.boundary_tol
    s_lo = math.sqrt(bb.lz * bb.uz)
    s_hi = math.sqrt(bb.lz / bb.uz)
    if bb.lx >= s_lo - bt:
        return CaseTag(Region.A, swapped)
    if bb.ly <= s_lo + bt:
        return CaseTag(Region.B, swapped)
    if bb.ly <= s_hi + bt:
        return CaseTag(Region.C, swapped)
    return CaseTag(Region.D, swapped)


def _pieces_zero_corner(lz: float, uz: float) -> tuple[HullPiece, ...]:
    # both bounds active with lx = ly = 0: center cone between the fans into
    # (1, uz) and (uz, 1), side cones beyond the lines y = uz*x and x = uz*y
    side_x, side_y = soc_sides(lz, uz)
    return (
        HullPiece((HalfPlane(0.0, -uz, 1.0), HalfPlane(0.0, 1.0, -uz)),
                  soc_center(lz, uz), True),
        HullPiece((HalfPlane(0.0, uz, -1.0),), side_x, False),
        HullPiece((HalfPlane(0.0, -1.0, uz),), side_y, False),
    )


def _pieces_region(bb: NormalizedBounds, region: Region) -> tuple[HullPiece, ...]:
    lx, ly, lz, uz = bb.lx, bb.ly, bb.lz, bb.uz
    center = HullPiece((HalfPlane(0.0, -ly * ly / lz, 1.0),
                        HalfPlane(0.0, lz / (lx * lx), -1.0)),
                       soc_center(lz, uz), True)
    ug_y = HullPiece((HalfPlane(0.0, ly * ly / lz, -1.0),),
                     soc_upper_general(lz / ly, ly, uz), False)
    ug_x = HullPiece((HalfPlane(0.0, -lz / (lx * lx), 1.0),),
                     soc_upper_general(lx, lz / lx, uz), False)
    side_x, side_y = soc_sides(lz, uz)
    if region is Region.A:
        return (center, ug_y, ug_x)
    if region is Region.B:
        return (
            HullPiece((HalfPlane(0.0, -uz, 1.0), HalfPlane(0.0, 1.0, -uz)),
                      soc_center(lz, uz), True),
            HullPiece((HalfPlane(0.0, uz, -1.0),), side_x, False),
            HullPiece((HalfPlane(0.0, -1.0, uz),), side_y, False),
        )
    if region is Region.C:
        return (
            HullPiece((HalfPlane(0.0, -ly * ly / lz, 1.0),
                       HalfPlane(0.0, 1.0, -uz)),
                      soc_center(lz, uz), True),
            ug_y,
            HullPiece((HalfPlane(0.0, -1.0, uz),), side_y, False),
        )
    if region is Region.D:
        line = dline(ly, lz, uz)
        return (
            HullPiece((HalfPlane(line.intercept, line.slope, -1.0),), ug_y.soc,
                      False),
            HullPiece((HalfPlane(-line.intercept, -line.slope, 1.0),), side_y,
                      False),
        )
    raise AssertionError(region)  # pragma: no cover


def describe(b: NormalizedBounds, tol: Tolerance = DEFAULT_TOLERANCE) -> HullDescription:
    """The exact hull description for tightened bounds.

    RLT planes are always emitted, even when some are redundant for the
    case at hand.  Pieces come in a fixed order per case so downstream
    piece indices are stable.
    """
    case = classify(b, tol)
    planes = tuple(rlt(b))
    region = case.region
    if region is Region.NO_Z_BOUND:
        pieces: tuple[HullPiece, ...] = ()
    elif region is Region.UPPER_ONLY:
        pieces = (HullPiece((), soc_upper_general(b.lx, b.ly, b.uz), True),)
    elif region is Region.LOWER_ONLY:
        pieces = (HullPiece((), soc_lower(b.lz), True),)
    elif region is Region.BOTH_ZERO_LB:
        pieces = _pieces_zero_corner(b.lz, b.uz)
    else:
        bb = b.swapped() if case.swapped else b
        pieces = _pieces_region(bb, region)
        if case.swapped:
            pieces = tuple(p.mirrored() for p in pieces)
    return HullDescription(bounds=b, case=case, rlt=planes,
                           zlo=b.lz, zhi=b.uz, pieces=pieces)


def hull_from_raw(raw: RawBounds, tol: Tolerance = DEFAULT_TOLERANCE
                  ) -> tuple[HullDescription, Scaling]:
    """normalize + tighten + describe; the scaling maps raw to final frame."""
    nb, sc1 = normalize(raw)
    tb, sc2 = tighten_with_scaling(nb)
    return describe(tb, tol), sc2.compose(sc1)


def membership(d: HullDescription, p: Point3,
               tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether p lies in the described hull, within feas_tol.

    Points within boundary_tol of a predicate boundary are checked against
    the pieces on both sides.
    """
    b = d.bounds
    ft = tol.feas_tol
    x, y, z = p.x, p.y, p.z
    if not (b.lx - ft <= x <= 1.0 + ft and b.ly - ft <= y <= 1.0 + ft):
        return False
    if not (d.zlo - ft <= z <= d.zhi + ft):
        return False
    for q in d.rlt:
        if q.residual(x, y, z) < -ft:
            return False
    for piece in d.pieces:
        if piece.applicable(x, y, tol.boundary_tol):
            if piece.soc.residual(x, y, z) < -ft:
                return False
    return True


def membership_mask(d: HullDescription, x, y, z,
                    tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Vectorized membership over equally shaped coordinate arrays."""
    b = d.bounds
    ft = tol.feas_tol
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    ok = (x >= b.lx - ft) & (x <= 1.0 + ft) & (y >= b.ly - ft) & (y <= 1.0 + ft)
    ok &= (z >= d.zlo - ft) & (z <= d.zhi + ft)
    for q in d.rlt:
        ok &= q.residual(x, y, z) >= -ft
    for piece in d.pieces:
        app = piece.applicable(x, y, tol.boundary_tol)
        bad = app & (piece.soc.residual(x, y, z) < -ft)
        ok &= ~bad
    return ok


def envelopes(d: HullDescription, x: float, y: float,
              tol: Tolerance = DEFAULT_TOLERANCE) -> tuple[float, float]:
    """(zmin, zmax) of the described set over the fixed (x, y).

    zmin can exceed zmax when (x, y) is outside the projection of the hull
    (the slice is then empty); points outside the box raise OutOfDomain.
    """
    b = d.bounds
    ft = tol.feas_tol
    if not (b.lx - ft <= x <= 1.0 + ft and b.ly - ft <= y <= 1.0 + ft):
        raise OutOfDomain("point outside the box")
    zmin = max(x + y - 1.0, b.ly * x + b.lx * y - b.lx * b.ly, d.zlo)
    zmax = min(x + b.lx * y - b.lx, b.ly * x + y - b.ly, d.zhi)
    for piece in d.pieces:
        if piece.applicable(x, y, tol.boundary_tol):
            zmax = min(zmax, float(piece.soc.envelope_z(x, y)))
    return zmin, zmax


def envelope_grid(d: HullDescription, xs: np.ndarray, ys: np.ndarray,
                  tol: Tolerance = DEFAULT_TOLERANCE
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (zmin, zmax, piece_id) over the tensor grid xs x ys.

    piece_id holds the index of the piece whose envelope attains zmax, or
    -1 where a linear constraint (RLT plane or z bound) is the binding one.
    Grid values are clipped to the box before evaluation.
    """
    b = d.bounds
    x = np.clip(np.asarray(xs, dtype=float), b.lx, 1.0)[:, None]
    y = np.clip(np.asarray(ys, dtype=float), b.ly, 1.0)[None, :]
    shape = np.broadcast(x, y).shape
    zmin = np.maximum(x + y - 1.0, b.ly * x + b.lx * y - b.lx * b.ly)
    zmin = np.maximum(zmin, d.zlo)
    lin = np.minimum(x + b.lx * y - b.lx, b.ly * x + y - b.ly)
    lin = np.minimum(lin, np.full(shape, d.zhi))
    if d.pieces:
        envs = np.full((len(d.pieces),) + shape, np.inf)
        for i, piece in enumerate(d.pieces):
            app = np.broadcast_to(piece.applicable(x, y, tol.boundary_tol),
                                  shape)
            # evaluate the curved cap only where the piece applies; the
            # discriminant can go negative outside (general upper cones),
            # so (1, 1), inside every family's domain, stands in elsewhere
            xe = np.where(app, np.broadcast_to(x, shape), 1.0)
            ye = np.where(app, np.broadcast_to(y, shape), 1.0)
            ex = np.asarray(piece.soc.envelope_z(xe, ye))
            envs[i] = np.where(app, ex, np.inf)
        best = np.min(envs, axis=0)
        piece_id = np.argmin(envs, axis=0)
        zmax = np.minimum(lin, best)
        piece_id = np.where(best <= lin, piece_id, -1)
    else:
        zmax = lin
        piece_id = np.full(shape, -1)
    return zmin, zmax, piece_id.astype(int)


_FAMILY_RANK = {
    TangentFamily.CENTER: 2,
    TangentFamily.LOWER: 2,
    TangentFamily.SIDE_X: 3,
    TangentFamily.SIDE_Y: 3,
    TangentFamily.UPPER_ZERO: 4,
    TangentFamily.UPPER_GENERAL: 4,
}


def _soc_linearization(c: SocConstraint, p: Point3) -> LinearInequality:
    # supporting plane of the cone at the dual direction through p
    (a11, a12, a13), (a21, a22, a23) = c.A
    r1 = a11 * p.x + a12 * p.y + a13 * p.z + c.b[0]
    r2 = a21 * p.x + a22 * p.y + a23 * p.z + c.b[1]
    nrm = math.hypot(r1, r2)
    if nrm <= 0.0:
        u1 = u2 = 0.0
    else:
        u1, u2 = r1 / nrm, r2 / nrm
    return LinearInequality(c.d - u1 * c.b[0] - u2 * c.b[1],
                            c.c[0] - u1 * a11 - u2 * a21,
                            c.c[1] - u1 * a12 - u2 * a22,
                            c.c[2] - u1 * a13 - u2 * a23,
                            label="soc_support")


def _candidates(d: HullDescription, p: Point3, tol: Tolerance
                ) -> list[tuple[float, int, int, object]]:
    b = d.bounds
    x, y, z = p.x, p.y, p.z
    out: list[tuple[float, int, int, object]] = []
    for i, q in enumerate(d.rlt):
        out.append((float(q.residual(x, y, z)), 0, i, q))
    bound_rows = [
        LinearInequality(-d.zlo, 0.0, 0.0, 1.0, label="z_lower"),
        LinearInequality(d.zhi, 0.0, 0.0, -1.0, label="z_upper"),
        LinearInequality(-b.lx, 1.0, 0.0, 0.0, label="x_lower"),
        LinearInequality(1.0, -1.0, 0.0, 0.0, label="x_upper"),
        LinearInequality(-b.ly, 0.0, 1.0, 0.0, label="y_lower"),
        LinearInequality(1.0, 0.0, -1.0, 0.0, label="y_upper"),
    ]
    for i, q in enumerate(bound_rows):
        out.append((float(q.residual(x, y, z)), 1, i, q))
    for i, piece in enumerate(d.pieces):
        if piece.applicable(x, y, tol.boundary_tol):
            out.append((float(piece.soc.residual(x, y, z)),
                        _FAMILY_RANK[piece.soc.family], i, piece))
    return out


def worst_violation(d: HullDescription, p: Point3,
                    tol: Tolerance = DEFAULT_TOLERANCE
                    ) -> tuple[float, dict | None]:
    """Smallest constraint residual at p and, when negative beyond
    feas_tol, a short identification of the violated constraint.
    """
    worst = min(_candidates(d, p, tol), key=lambda t: (t[0], t[1], t[2]))
    res = worst[0]
    if res >= -tol.feas_tol:
        return res, None
    obj = worst[3]
    if isinstance(obj, LinearInequality):
        return res, {"kind": "linear", "label": obj.label}
    return res, {"kind": "soc", "family": obj.soc.family.value}


def separate(d: HullDescription, p: Point3,
             tol: Tolerance = DEFAULT_TOLERANCE) -> LinearInequality | None:
    """A valid inequality violated by p, or None when p is a member.

    Picks the most violated constraint; ties break toward RLT planes, then
    bounds, then the center cone, the side cones, and the corner cones
    last.  A violated cone is converted into the lifted tangent plane
    through the projection of p.
    """
    b = d.bounds
    ft = tol.feas_tol
    x, y, z = p.x, p.y, p.z
    candidates = _candidates(d, p, tol)
    worst = min(candidates, key=lambda t: (t[0], t[1], t[2]))
    if worst[0] >= -ft:
        return None
    if isinstance(worst[3], LinearInequality):
        return worst[3]

    # a cone is the most violated constraint: cut with its tangent plane
    width_x = (1.0 - b.lx) * 0.25
    width_y = (1.0 - b.ly) * 0.25
    nudge_x = min(max(tol.boundary_tol, 1e-12), width_x)
    nudge_y = min(max(tol.boundary_tol, 1e-12), width_y)
    xq = min(max(x, b.lx + nudge_x), 1.0 - nudge_x)
    yq = min(max(y, b.ly + nudge_y), 1.0 - nudge_y)
    cut: LinearInequality | None = None
    if xq * yq <= d.zlo:
        # outside the hull's (x, y) projection: tangent to the curve xy = lz
        s = math.sqrt(d.zlo / (xq * yq))
        cut = LinearInequality(-2.0 * d.zlo, yq * s, xq * s, 0.0,
                               label="product_lower_tangent")
    elif xq * yq < d.zhi:
        cut = lifted_tangent(b, xq, yq, tol)[0]
    if cut is not None and float(cut.residual(x, y, z)) < 0.0:
        return cut
    lin = [t for t in candidates if isinstance(t[3], LinearInequality)]
    worst_lin = min(lin, key=lambda t: (t[0], t[1], t[2]))
    if worst_lin[0] < -ft:
        return worst_lin[3]
    piece = worst[3]
    if piece.globally_valid:
        return _soc_linearization(piece.soc, p)
    return cut if cut is not None else worst_lin[3]


@dataclass(frozen=True)
class HomRow:
    """lam*l + x*cx + y*cy + z*cz >= 0 inside one branch block."""

    l: float
    cx: float
    cy: float
    cz: float
    label: str = ""

    def value(self, lam, x, y, z):
        return self.l * lam + self.cx * x + self.cy * y + self.cz * z


@dataclass(frozen=True)
class BranchBlock:
    """One disjunct: the piece's constraints homogenized by its weight.

    The cone is interpreted with its constant parts multiplied by lam:
    ||A v_i + b*lam_i|| <= c'v_i + d*lam_i.
    """

    index: int
    rows: tuple[HomRow, ...]
    soc: SocConstraint | None

    def soc_residual(self, lam, x, y, z) -> float:
        if self.soc is None:
            return 0.0
        c = self.soc
        (a11, a12, a13), (a21, a22, a23) = c.A
        r1 = a11 * x + a12 * y + a13 * z + c.b[0] * lam
        r2 = a21 * x + a22 * y + a23 * z + c.b[1] * lam
        rhs = c.c[0] * x + c.c[1] * y + c.c[2] * z + c.d * lam
        return float(rhs - math.hypot(r1, r2))

    def feasible(self, lam, x, y, z, tol: float = 1e-9) -> bool:
        if lam < -tol:
            return False
        for row in self.rows:
            if row.value(lam, x, y, z) < -tol:
                return False
        return self.soc_residual(lam, x, y, z) >= -tol


@dataclass(frozen=True)
class ExtendedFormulation:
    """Disjunctive description: one block per piece plus aggregation rows
    x = sum x_i, y = sum y_i, z = sum z_i, sum lam_i = 1, lam >= 0.
    """

    blocks: tuple[BranchBlock, ...]

    @property
    def num_branch_variables(self) -> int:
        return 4 * len(self.blocks)

    @property
    def num_aggregation_rows(self) -> int:
        return 4

    @property
    def variables(self) -> tuple[str, ...]:
        names = ["x", "y", "z"]
        for blk in self.blocks:
            i = blk.index + 1
            names += [f"lam{i}", f"x{i}", f"y{i}", f"z{i}"]
        return tuple(names)


def _block_rows(d: HullDescription, piece: HullPiece | None) -> tuple[HomRow, ...]:
    b = d.bounds
    rows = [
        HomRow(-d.zlo, 0.0, 0.0, 1.0, "z_lower"),
        HomRow(d.zhi, 0.0, 0.0, -1.0, "z_upper"),
    ]
    for q in d.rlt:
        rows.append(HomRow(q.a0, q.ax, q.ay, q.az, q.label))
    rows += [
        HomRow(-b.lx, 1.0, 0.0, 0.0, "x_lower"),
        HomRow(1.0, -1.0, 0.0, 0.0, "x_upper"),
        HomRow(-b.ly, 0.0, 1.0, 0.0, "y_lower"),
        HomRow(1.0, 0.0, -1.0, 0.0, "y_upper"),
    ]
    if piece is not None:
        for hp in piece.predicate:
            rows.append(HomRow(hp.a0, hp.ax, hp.ay, 0.0, "predicate"))
    return tuple(rows)


def disjunctive(d: HullDescription) -> ExtendedFormulation:
    """The branch-block formulation of a description.

    With no curved pieces the hull is already polyhedral; a single block
    carrying just the linear rows is returned so the aggregation shape is
    uniform.
    """
    if not d.pieces:
        return ExtendedFormulation((BranchBlock(0, _block_rows(d, None), None),))
    blocks = tuple(
        BranchBlock(i, _block_rows(d, piece), piece.soc)
        for i, piece in enumerate(d.pieces)
    )
    return ExtendedFormulation(blocks)


def region_map_polylines(lz: float, uz: float, n: int = 65) -> dict[str, np.ndarray]:
    """Polylines of the (lx, ly) region map for fixed product bounds.

    Keys: the square frame edges, the hyperbola lx*ly = lz bounding the
    admissible corner set, and the four threshold segments at sqrt(lz*uz)
    and sqrt(lz/uz), all clipped to [lz, uz]^2.  Arrays have shape (k, 2).
    """
    if not 0.0 < lz < uz <= 1.0:
        raise DegenerateBounds("need 0 < lz < uz <= 1")
    s_lo = math.sqrt(lz * uz)
    s_hi = math.sqrt(lz / uz)
    out: dict[str, np.ndarray] = {}
    out["frame_lx"] = np.array([[lz, lz], [lz, uz]])
    out["frame_ly"] = np.array([[lz, lz], [uz, lz]])
    lo = max(lz, lz / uz)
    if lo < uz:
        xs = np.linspace(lo, uz, n)
        out["hyperbola"] = np.column_stack([xs, lz / xs])
    seg = []
    top = min(s_hi, uz)
    if s_lo <= top:
        seg.append(("split_lx", np.array([[s_lo, s_lo], [s_lo, top]])))
        seg.append(("split_ly", np.array([[s_lo, s_lo], [top, s_lo]])))
    if s_hi <= uz:
        hi = min(s_lo, uz)
        if lz <= hi:
            seg.append(("far_ly", np.array([[lz, s_hi], [hi, s_hi]])))
            seg.append(("far_lx", np.array([[s_hi, lz], [s_hi, hi]])))
    for key, arr in seg:
        out[key] = arr
    return out
