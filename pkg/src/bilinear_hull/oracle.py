"""Sampling oracle: LP cross-checks of the closed-form hull description.

The surface is sampled on a grid plus traces along the two product-bound
curves; the convex hull of the samples is then interrogated with a small
dense simplex (3 or 4 equality rows, one column per sample).  Everything
here is deliberately independent of the constraint formulas so the two
sides can be compared in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import Infeasible
from .geometry import NormalizedBounds, Point3

_RC_TOL = 1e-11
_PIVOT_TOL = 1e-11
_FEAS_TOL = 1e-9
_MAX_ITER = 20000


@dataclass(frozen=True)
class SurfaceSample:
    """Deduplicated surface points (x, y, x*y) respecting the bounds."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    bounds: NormalizedBounds
    n: int

    def __len__(self) -> int:
        return self.x.shape[0]


def sample_surface(b: NormalizedBounds, n: int) -> SurfaceSample:
    """Grid plus curve traces plus feasible box corners, exact duplicates
    removed.  Every retained point satisfies the product bounds to 1e-12.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    xs = np.linspace(b.lx, 1.0, n)
    ys = np.linspace(b.ly, 1.0, n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    gx = gx.ravel()
    gy = gy.ravel()
    keep = (gx * gy >= b.lz - 1e-12) & (gx * gy <= b.uz + 1e-12)
    parts = [np.column_stack([gx[keep], gy[keep]])]
    if b.lz > 0.0:
        xlo = max(b.lx, b.lz)
        xhi = min(1.0, b.lz / b.ly) if b.ly > 0.0 else 1.0
        if xhi >= xlo:
            cx = np.linspace(xlo, xhi, n)
            parts.append(np.column_stack([cx, b.lz / cx]))
    if b.uz < 1.0:
        xlo = max(b.lx, b.uz)
        cx = np.linspace(xlo, 1.0, n)
        parts.append(np.column_stack([cx, b.uz / cx]))
    corners = []
    for px in (b.lx, 1.0):
        for py in (b.ly, 1.0):
            if b.lz - 1e-12 <= px * py <= b.uz + 1e-12:
                corners.append((px, py))
    if corners:
        parts.append(np.array(corners))
    pts = np.unique(np.vstack(parts), axis=0)
    return SurfaceSample(x=pts[:, 0], y=pts[:, 1], z=pts[:, 0] * pts[:, 1],
                         bounds=b, n=n)


class _Simplex:
    """Dense revised simplex on  min c'w  s.t.  A w = rhs, w >= 0.

    Deterministic pivoting: the entering column has the most negative
    reduced cost (first index on ties); the leaving row breaks ratio ties
    by the smallest basic variable index.  The sample grids make these LPs
    heavily degenerate, so after a run of non-improving pivots the entering
    rule drops to Bland's first-negative-index rule, which cannot cycle.
    Small fixed row count, so every iteration refreshes the basis
    factorization; no tableau drift.
    """

    def __init__(self, a: np.ndarray, rhs: np.ndarray):
        flip = rhs < 0.0
        self.a = np.where(flip[:, None], -a, a)
        self.rhs = np.where(flip, -rhs, rhs)
        self.m = a.shape[0]

    def _iterate(self, cols: np.ndarray, cost: np.ndarray, basis: list[int]):
        m = self.m
        bland = False
        stall = 0
        best_obj = np.inf
        for _ in range(_MAX_ITER):
            bmat = cols[:, basis]
            xb = np.linalg.solve(bmat, self.rhs)
            yv = np.linalg.solve(bmat.T, cost[basis])
            rc = cost - yv @ cols
            rc[basis] = 0.0
            if bland:
                neg = np.flatnonzero(rc < -_RC_TOL)
                if neg.size == 0:
                    return basis, xb
                j = int(neg[0])
            else:
                j = int(np.argmin(rc))
                if rc[j] >= -_RC_TOL:
                    return basis, xb
            d = np.linalg.solve(bmat, cols[:, j])
            pos = d > _PIVOT_TOL
            if not np.any(pos):
                raise RuntimeError("unbounded LP direction")
            ratios = np.full(m, np.inf)
            ratios[pos] = xb[pos] / d[pos]
            best = np.min(ratios)
            tied = np.flatnonzero(ratios <= best + 1e-12)
            leave = int(tied[np.argmin([basis[t] for t in tied])])
            obj = float(cost[basis] @ xb)
            if obj < best_obj - 1e-12:
                best_obj = obj
                stall = 0
            else:
                stall += 1
                if stall > 100:
                    bland = True
            basis[leave] = j
        raise RuntimeError("simplex iteration limit hit")

    def solve(self, cost: np.ndarray, basis: list[int] | None = None):
        """Returns (basis, xb, objective); raises Infeasible when phase 1
        cannot zero out the artificial variables.
        """
        m, n = self.m, self.a.shape[1]
        if basis is not None:
            bmat = self.a[:, basis]
            try:
                xb = np.linalg.solve(bmat, self.rhs)
            except np.linalg.LinAlgError:
                xb = None
            if xb is not None and np.all(xb >= -_PIVOT_TOL):
                basis, xb = self._iterate(self.a, cost, list(basis))
                return basis, xb, float(cost[basis] @ xb)
        # phase 1 with an artificial identity block
        cols = np.hstack([self.a, np.eye(m)])
        art_cost = np.concatenate([np.zeros(n), np.ones(m)])
        basis1 = list(range(n, n + m))
        basis1, xb = self._iterate(cols, art_cost, basis1)
        if float(art_cost[basis1] @ xb) > _FEAS_TOL:
            raise Infeasible("point outside the sampled hull")
        for i, bi in enumerate(basis1):
            if bi >= n:
                # degenerate artificial still basic: swap in any real column
                bmat = cols[:, basis1]
                for j in range(n):
                    if j in basis1:
                        continue
                    d = np.linalg.solve(bmat, cols[:, j])
                    if abs(d[i]) > _PIVOT_TOL:
                        basis1[i] = j
                        break
        if any(bi >= n for bi in basis1):
            raise RuntimeError("artificial variable stuck in basis")
        cost2 = np.asarray(cost, dtype=float)
        basis2, xb = self._iterate(self.a, cost2, basis1)
        return basis2, xb, float(cost2[basis2] @ xb)


def _check_solution(a, rhs, basis, xb):
    err = np.abs(a[:, basis] @ xb - rhs).max()
    assert err <= 1e-10, err


def oracle_envelope(s: SurfaceSample, x: float, y: float) -> float:
    """Max of z over the sampled hull at fixed (x, y).

    Raises Infeasible when (x, y) lies outside the projection of the
    sampled hull.
    """
    v = float(oracle_envelope_many(s, np.array([x]), np.array([y]))[0])
    if math.isnan(v):
        raise Infeasible("query point outside the sampled projection")
    return v


def oracle_envelope_many(s: SurfaceSample, xs: np.ndarray, ys: np.ndarray
                         ) -> np.ndarray:
    """Vectorized envelope queries with warm-started bases.

    Entries where the LP is infeasible come back as NaN.
    """
    a = np.vstack([s.x, s.y, np.ones_like(s.x)])
    cost = -s.z  # maximize total z
    out = np.full(len(xs), np.nan)
    basis: list[int] | None = None
    for k in range(len(xs)):
        rhs = np.array([xs[k], ys[k], 1.0])
        lp = _Simplex(a, rhs)
        try:
            new_basis, xb, obj = lp.solve(cost, basis)
        except Infeasible:
            basis = None
            continue
        _check_solution(a, rhs, new_basis, xb)
        basis = new_basis
        out[k] = -obj
    return out


def oracle_membership(s: SurfaceSample, p: Point3, tol: float = _FEAS_TOL) -> bool:
    """Whether p is a convex combination of the surface samples."""
    a = np.vstack([s.x, s.y, s.z, np.ones_like(s.x)])
    rhs = np.array([p.x, p.y, p.z, 1.0])
    lp = _Simplex(a, rhs)
    m, n = 4, a.shape[1]
    cols = np.hstack([lp.a, np.eye(m)])
    art_cost = np.concatenate([np.zeros(n), np.ones(m)])
    try:
        basis, xb = lp._iterate(cols, art_cost, list(range(n, n + m)))
    except RuntimeError:
        return False
    return float(art_cost[basis] @ xb) <= tol
