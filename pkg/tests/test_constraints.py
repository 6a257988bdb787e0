"""Cone and cut algebra: RLT planes, cone families, envelopes, tangents."""

import math

import numpy as np
import pytest

from bilinear_hull import (
    DegenerateBounds,
    LinearInequality,
    NegativeDiscriminant,
    NormalizedBounds,
    OutOfDomain,
    Point3,
    Psd2,
    TangentFamily,
    envelope_z,
    evaluate,
    lifted_tangent,
    rlt,
    soc_center,
    soc_lower,
    soc_sides,
    soc_upper_general,
    soc_upper_zero,
    tighten,
)
from bilinear_hull.constraints import lower_quadratic_form, side_quadratic_forms


def _surface_band(rng, b, n):
    """n random box points with lz <= x*y <= uz, by conditional sampling."""
    xs = np.empty(n)
    ys = np.empty(n)
    got = 0
    while got < n:
        x = rng.uniform(max(b.lx, 1e-9), 1.0)
        ylo = max(b.ly, b.lz / x)
        yhi = min(1.0, b.uz / x)
        if ylo > yhi:
            continue
        xs[got] = x
        ys[got] = rng.uniform(ylo, yhi)
        got += 1
    return xs, ys


# ---------------------------------------------------------------- RLT planes


def test_rlt_coefficients():
    b = NormalizedBounds(0.5, 0.3, 0.3, 1.0)
    planes = rlt(b)
    assert [q.label for q in planes] == [
        "rlt_lower_ones", "rlt_lower_corner", "rlt_upper_x", "rlt_upper_y"]
    got = [(q.a0, q.ax, q.ay, q.az) for q in planes]
    assert got[0] == (1.0, -1.0, -1.0, 1.0)
    assert got[1] == (0.15, -0.3, -0.5, 1.0)
    assert got[2] == (-0.5, 1.0, 0.5, -1.0)
    assert got[3] == (-0.3, 0.3, 1.0, -1.0)


def test_rlt_residuals_are_bound_products():
    # each plane is a product of two slacks expanded over z = xy
    rng = np.random.default_rng(5)
    b = NormalizedBounds(0.2, 0.1, 0.05, 0.9)
    p1, p2, p3, p4 = rlt(b)
    for _ in range(500):
        x = rng.uniform(b.lx, 1.0)
        y = rng.uniform(b.ly, 1.0)
        z = x * y
        assert abs(p1.residual(x, y, z) - (1 - x) * (1 - y)) <= 1e-12
        assert abs(p2.residual(x, y, z) - (x - b.lx) * (y - b.ly)) <= 1e-12
        assert abs(p3.residual(x, y, z) - (x - b.lx) * (1 - y)) <= 1e-12
        assert abs(p4.residual(x, y, z) - (1 - x) * (y - b.ly)) <= 1e-12


# ------------------------------------------------------------- cone algebra


def test_lower_quadratic_form():
    m = lower_quadratic_form(0.2)
    assert (m.m11, m.m12, m.m22) == (1.0, -0.6, 1.0)
    lo, hi = sorted(m.eigenvalues())
    assert abs(lo - 0.4) <= 1e-15 and abs(hi - 1.6) <= 1e-15
    assert abs(m.det - 4 * 0.2 * 0.8) <= 1e-15


def test_side_quadratic_forms():
    m1, m2 = side_quadratic_forms(0.2, 0.7)
    for got, want in zip((m1.m11, m1.m12, m1.m22), (0.49, -0.3, 1.0)):
        assert abs(got - want) <= 1e-15
    for got, want in zip((m2.m11, m2.m12, m2.m22), (1.0, -0.3, 0.49)):
        assert abs(got - want) <= 1e-15
    assert abs(m1.det - 0.4) <= 1e-15  # 4*lz*(uz - lz) = 0.4
    assert abs(m2.det - 0.4) <= 1e-15


def test_quadratic_forms_stay_psd():
    rng = np.random.default_rng(23)
    for _ in range(1000):
        lz = rng.uniform(0.0, 1.0)
        uz = rng.uniform(lz + 1e-6, 1.0)
        assert lower_quadratic_form(lz).det >= -1e-15
        m1, m2 = side_quadratic_forms(lz, uz)
        assert m1.det >= -1e-15 and m1.m11 >= 0.0
        assert m2.det >= -1e-15 and m2.m11 >= 0.0


def test_psd2_rejects_indefinite():
    with pytest.raises(ValueError):
        Psd2(1.0, 2.0, 1.0)  # det < 0
    Psd2(1.0, 1.0, 1.0)


def test_psd2_cholesky_reconstructs():
    m = Psd2(0.49, -0.3, 1.0)
    (r11, r12), (_, r22) = m.cholesky_rows()
    assert abs(r11 * r11 - m.m11) <= 1e-15
    assert abs(r11 * r12 - m.m12) <= 1e-15
    assert abs(r12 * r12 + r22 * r22 - m.m22) <= 1e-15


# ----------------------------------------------------------- envelope values


def test_envelope_pins():
    # lower cone at (0.6, 0.6), lz = 0.2: (1.2 - sqrt(0.128))/2
    v = envelope_z(soc_lower(0.2), 0.6, 0.6)
    assert abs(v - (1.2 - math.sqrt(0.128)) / 2) <= 1e-15
    assert abs(v - 0.4211145618000168) <= 1e-12

    # center cone at the (1, 1) corner
    v = envelope_z(soc_center(0.2, 0.7), 1.0, 1.0)
    expect = math.sqrt(0.2) + math.sqrt(0.7) - math.sqrt(0.14)
    assert abs(v - expect) <= 1e-15
    assert abs(v - 0.9097078834) <= 1e-9

    v = envelope_z(soc_upper_zero(0.4), 0.5, 0.5)
    assert abs(v - math.sqrt(0.4 * 0.25)) <= 1e-15


def test_envelope_solves_the_cone_equation():
    """envelope_z returns the z making the cone residual vanish."""
    rng = np.random.default_rng(31)
    uz = 0.7
    sx_cone, sy_cone = soc_sides(0.2, uz)
    # each cone with an (x range, y range given x) window inside its domain
    cases = [
        (soc_lower(0.2), (0.05, 1.0), lambda x: (0.05, 1.0)),
        (soc_center(0.2, uz), (0.05, 1.0), lambda x: (0.05, 1.0)),
        (soc_upper_zero(uz), (0.0, 1.0), lambda x: (0.0, 1.0)),
        (sx_cone, (0.1, 1.0), lambda x: (0.0, uz * x)),
        (sy_cone, (0.0, uz), lambda x: (x / uz, 1.0)),
        (soc_upper_general(0.25, 0.4, uz), (0.25, 1.0), lambda x: (0.4, 1.0)),
    ]
    for c, xwin, ywin in cases:
        for _ in range(300):
            x = rng.uniform(*xwin)
            ylo, yhi = ywin(x)
            y = rng.uniform(ylo, yhi)
            zs = envelope_z(c, x, y)
            assert abs(c.residual(x, y, zs)) <= 1e-12
            # all families cap z from above: slack below, violated above
            assert c.residual(x, y, zs - 1e-6) > 0
            assert c.residual(x, y, zs + 1e-6) < 0


def test_envelope_rejects_negative_discriminant():
    with pytest.raises(NegativeDiscriminant):
        envelope_z(soc_upper_zero(0.4), -0.5, 0.5)


def test_upper_general_matches_product_inequality():
    """Cone membership == the defining product-form inequality."""
    lx, ly, uz = 0.25, 0.4, 0.7
    c = soc_upper_general(lx, ly, uz)
    rng = np.random.default_rng(41)
    for _ in range(10000):
        x, y = rng.uniform(0.0, 1.0, size=2)
        z = rng.uniform(-0.2, 1.2)
        p = uz * (x - lx) + lx * (z - ly * x)
        q = uz * (y - ly) + ly * (z - lx * y)
        alg = p + q >= 0 and p * q >= uz * (z - lx * ly) ** 2
        soc = c.residual(x, y, z) >= 0
        if abs(c.residual(x, y, z)) > 1e-12:
            assert soc == alg


def _same_cone(c1, c2):
    return c1.A == c2.A and c1.b == c2.b and c1.c == c2.c and c1.d == c2.d


def test_degenerate_reductions():
    # lz = 0 collapses the center cone onto the zero-corner upper cone
    # (family tag stays CENTER; the matrices coincide)
    assert _same_cone(soc_center(0.0, 0.7), soc_upper_zero(0.7))
    # lx = ly = 0 delegates outright
    assert soc_upper_general(0.0, 0.0, 0.7) == soc_upper_zero(0.7)
    # uz = 1 turns both side cones into the lower cone
    s1, s2 = soc_sides(0.2, 1.0)
    assert _same_cone(s1, soc_lower(0.2))
    assert _same_cone(s2, soc_lower(0.2))


def test_soc_constructor_domains():
    with pytest.raises(DegenerateBounds):
        soc_upper_general(0.8, 0.9, 0.5)  # uz <= lx*ly
    with pytest.raises(DegenerateBounds):
        soc_center(0.5, 0.4)
    with pytest.raises(DegenerateBounds):
        soc_lower(1.2)


def test_mirrored_swaps_x_and_y():
    rng = np.random.default_rng(43)
    for c in [soc_center(0.2, 0.7), soc_sides(0.2, 0.7)[0],
              soc_upper_general(0.25, 0.4, 0.7)]:
        m = c.mirrored()
        for _ in range(200):
            x, y = rng.uniform(0.0, 1.0, size=2)
            z = rng.uniform(0.0, 1.0)
            assert abs(m.residual(x, y, z) - c.residual(y, x, z)) <= 1e-15
    sx, sy = soc_sides(0.2, 0.7)
    assert sx.mirrored().family is TangentFamily.SIDE_Y
    assert sy.mirrored().family is TangentFamily.SIDE_X


# --------------------------------------------- validity on the surface z = xy


def test_cones_valid_on_their_surface_regions():
    lz, uz = 0.2, 0.7
    rng = np.random.default_rng(47)
    b = NormalizedBounds(0.0, 0.0, lz, uz)
    xs, ys = _surface_band(rng, b, 4000)
    zs = xs * ys

    r = soc_lower(lz).residual(xs, ys, zs)
    assert np.min(r) >= -1e-12
    r = soc_center(lz, uz).residual(xs, ys, zs)
    assert np.min(r) >= -1e-12
    r = soc_upper_zero(uz).residual(xs, ys, zs)
    assert np.min(r) >= -1e-12

    sx, sy = soc_sides(lz, uz)
    in_x = ys <= uz * xs
    assert np.min(sx.residual(xs[in_x], ys[in_x], zs[in_x])) >= -1e-12
    in_y = xs <= uz * ys
    assert np.min(sy.residual(xs[in_y], ys[in_y], zs[in_y])) >= -1e-12

    cx, cy = 0.4, 0.5  # corner on the lz curve
    ug = soc_upper_general(cx, cy, uz)
    keep = (xs >= cx) & (ys >= cy)
    assert np.min(ug.residual(xs[keep], ys[keep], zs[keep])) >= -1e-12


def test_cones_tight_on_generating_curves():
    lz, uz = 0.2, 0.7
    xlo = np.linspace(lz, 1.0, 101)
    ylo = lz / xlo
    xup = np.linspace(uz, 1.0, 101)
    yup = uz / xup

    def worst(c, xs, ys):
        return float(np.max(np.abs(c.residual(xs, ys, xs * ys))))

    assert worst(soc_lower(lz), xlo, ylo) <= 1e-12
    edge = np.linspace(lz, 1.0, 101)
    assert worst(soc_lower(lz), np.ones_like(edge), edge) <= 1e-12

    assert worst(soc_center(lz, uz), xlo, ylo) <= 1e-12
    assert worst(soc_center(lz, uz), xup, yup) <= 1e-12

    assert worst(soc_upper_zero(uz), xup, yup) <= 1e-12

    sx, _ = soc_sides(lz, uz)
    keep = ylo <= uz * xlo
    assert worst(sx, xlo[keep], ylo[keep]) <= 1e-12
    keep = yup <= uz * xup
    assert worst(sx, xup[keep], yup[keep]) <= 1e-12

    ug = soc_upper_general(0.4, 0.5, uz)
    assert abs(float(ug.residual(0.4, 0.5, 0.2))) <= 1e-12
    assert worst(ug, xup, yup) <= 1e-12


def test_evaluate_dispatch():
    p = Point3(0.5, 0.5, 0.25)
    lin = LinearInequality(1.0, -1.0, -1.0, 1.0)
    assert abs(evaluate(lin, p) - 0.25) <= 1e-15
    c = soc_upper_zero(0.4)
    assert abs(evaluate(c, p) - float(c.residual(0.5, 0.5, 0.25))) <= 1e-15


# ------------------------------------------------------------ lifted tangents


def test_tangent_zero_corner_example():
    b = NormalizedBounds(0.0, 0.0, 0.0, 0.4)
    cut, seg = lifted_tangent(b, 0.5, 0.5)
    # anchor scales the query onto x*y = uz: factor sqrt(uz/(x*y))
    f = math.sqrt(0.4 / 0.25)
    assert seg.family is TangentFamily.UPPER_ZERO
    assert abs(seg.upper.x - 0.5 * f) <= 1e-12
    assert abs(seg.upper.y - 0.5 * f) <= 1e-12
    assert abs(seg.upper.z - 0.4) <= 1e-12
    assert seg.lower.astuple() == (0.0, 0.0, 0.0)
    assert abs(seg.alpha - (1 - 0.5 / (0.5 * f))) <= 1e-9
    assert abs(cut.a0) <= 1e-15
    assert abs(cut.ax - 0.632455532) <= 1e-9
    assert abs(cut.ay - 0.632455532) <= 1e-9
    assert abs(cut.az - (-2.0)) <= 1e-15


def test_tangent_lower_only_example():
    b = NormalizedBounds(0.0, 0.0, 0.2, 1.0)
    cut, seg = lifted_tangent(b, 0.9, 0.9)
    assert seg.family is TangentFamily.LOWER
    s = math.sqrt(0.2)
    assert abs(seg.lower.x - s) <= 1e-12
    assert abs(seg.lower.y - s) <= 1e-12
    assert abs(seg.lower.z - 0.2) <= 1e-12
    assert seg.upper.astuple() == (1.0, 1.0, 1.0)
    a = -(2 * s - 2 * 0.2) / (1.0 - 0.2)
    assert abs(a + 0.618034) <= 1e-6
    assert abs(cut.az - a) <= 1e-12
    assert abs(cut.ax - s) <= 1e-12
    assert abs(cut.ay - s) <= 1e-12
    assert abs(cut.a0 - (-(2 + a) * 0.2)) <= 1e-12


def test_tangent_requires_band_interior():
    b = NormalizedBounds(0.0, 0.0, 0.2, 0.7)
    with pytest.raises(OutOfDomain):
        lifted_tangent(tighten(b), 0.3, 0.3)  # x*y below lz
    with pytest.raises(OutOfDomain):
        lifted_tangent(tighten(b), 0.95, 0.9)  # x*y above uz
    with pytest.raises(OutOfDomain):
        lifted_tangent(NormalizedBounds(0.1, 0.1, 0.2, 1.0), 0.5, 0.5)
    with pytest.raises(OutOfDomain):
        lifted_tangent(NormalizedBounds(0, 0, 0, 1), 0.5, 0.5)  # no z bound


def _tangent_cases():
    return [
        tighten(NormalizedBounds(0.0, 0.0, 0.0, 0.4)),
        tighten(NormalizedBounds(0.0, 0.0, 0.2, 1.0)),
        tighten(NormalizedBounds(0.0, 0.0, 0.2, 0.7)),
        tighten(NormalizedBounds(0.32, 0.28, 0.1, 0.7)),
        tighten(NormalizedBounds(0.14, 0.2, 0.1, 0.7)),
        tighten(NormalizedBounds(0.14, 0.3, 0.1, 0.7)),
        tighten(NormalizedBounds(0.14, 0.5, 0.1, 0.7)),
        tighten(NormalizedBounds(0.5, 0.3, 0.3, 1.0)),
    ]


def _interior_queries(rng, b, n):
    xs, ys = [], []
    while len(xs) < n:
        x = rng.uniform(b.lx + 1e-6, 1.0 - 1e-6)
        y = rng.uniform(b.ly + 1e-6, 1.0 - 1e-6)
        if b.lz + 1e-9 < x * y < b.uz - 1e-9:
            xs.append(x)
            ys.append(y)
    return xs, ys


def test_tangent_plane_contains_its_segment():
    rng = np.random.default_rng(53)
    for b in _tangent_cases():
        xs, ys = _interior_queries(rng, b, 100)
        for x, y in zip(xs, ys):
            cut, seg = lifted_tangent(b, x, y)
            for t in (0.0, 0.25, 0.5, 0.75, 1.0):
                p = seg.point_at(t)
                assert abs(evaluate(cut, p)) <= 1e-10
            # endpoints sit on the product surface inside the box
            for p in (seg.lower, seg.upper):
                assert abs(p.z - p.x * p.y) <= 1e-10
                assert -1e-9 <= p.x <= 1 + 1e-9
                assert -1e-9 <= p.y <= 1 + 1e-9
                assert b.lz - 1e-9 <= p.z <= b.uz + 1e-9


def test_tangent_plane_valid_on_surface():
    rng = np.random.default_rng(59)
    for b in _tangent_cases():
        sx, sy = _surface_band(rng, b, 2000)
        sz = sx * sy
        xs, ys = _interior_queries(rng, b, 60)
        for x, y in zip(xs, ys):
            cut, _ = lifted_tangent(b, x, y)
            r = cut.residual(sx, sy, sz)
            assert float(np.min(r)) >= -1e-9


def test_tangent_alpha_reproduces_query():
    """Interior queries project onto the segment with the returned weight."""
    rng = np.random.default_rng(61)
    b = tighten(NormalizedBounds(0.14, 0.2, 0.1, 0.7))
    xs, ys = _interior_queries(rng, b, 200)
    hits = 0
    for x, y in zip(xs, ys):
        _, seg = lifted_tangent(b, x, y)
        if not 0.0 < seg.alpha < 1.0:
            continue
        p = seg.point_at(seg.alpha)
        if abs(p.x - x) <= 1e-9 and abs(p.y - y) <= 1e-9:
            hits += 1
    # wedge fallbacks project instead of interpolating; most queries are exact
    assert hits >= 100


def test_tangent_segment_lies_on_matching_cone():
    rng = np.random.default_rng(67)
    seen = set()
    for b in _tangent_cases():
        xs, ys = _interior_queries(rng, b, 150)
        for x, y in zip(xs, ys):
            _, seg = lifted_tangent(b, x, y)
            seen.add(seg.family)
            cone = _matching_cone(b, seg)
            for t in np.linspace(0.0, 1.0, 11):
                p = seg.point_at(t)
                assert abs(float(cone.residual(p.x, p.y, p.z))) <= 1e-9
    assert seen == set(TangentFamily)


def _matching_cone(b, seg):
    f = seg.family
    if f is TangentFamily.UPPER_ZERO:
        return soc_upper_zero(b.uz)
    if f is TangentFamily.LOWER:
        return soc_lower(b.lz)
    if f is TangentFamily.CENTER:
        return soc_center(b.lz, b.uz)
    if f is TangentFamily.SIDE_X:
        return soc_sides(b.lz, b.uz)[0]
    if f is TangentFamily.SIDE_Y:
        return soc_sides(b.lz, b.uz)[1]
    # general upper cones are anchored at the segment's lower corner
    return soc_upper_general(seg.lower.x, seg.lower.y, b.uz)
