import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from dstori.desitter import (
    DSPoint,
    LightlikeRectangle,
    LShapedPolygon,
    area_lshape,
    area_rectangle,
    area_rectangle_quadrature,
    in_domain,
    r_theta,
    y_plus,
    y_theta,
)
from dstori.errors import DegenerateRectangle, NonPositiveAngle, OutsideDomain, ValidationError
from dstori.moebius import INF, MoebiusMap, ProjectivePoint, apply, from_triples, point

from conftest import moebius_maps


def circle_point(u):
    """Point of RP^1 at angle coordinate ``u`` (0 is infinity, increasing positively)."""
    phi = math.pi - (u % 1.0) * math.pi
    return ProjectivePoint(math.cos(phi), math.sin(phi))


@st.composite
def rectangles(draw, min_gap=0.02):
    """Rectangles with corners xA < xC < yA < yC in positive cyclic order."""
    gaps = [draw(st.floats(min_gap, 1.0)) for _ in range(4)]
    total = sum(gaps)
    start = draw(st.floats(0.0, 1.0))
    u = start
    pts = []
    for g in gaps:
        pts.append(circle_point(u))
        u += g / total
    return LightlikeRectangle(*pts)


def test_y_theta_values():
    assert y_theta(math.log(2.0)) == pytest.approx(0.5, abs=1e-15)
    assert y_theta(1e-9) == pytest.approx(1e-9, rel=1e-6)
    with pytest.raises(NonPositiveAngle):
        y_theta(0.0)


@pytest.mark.parametrize("theta", [0.25, 1.0, 2.0])
def test_r_theta_area(theta):
    r = r_theta(theta)
    assert area_rectangle(r) == pytest.approx(theta, abs=1e-9)
    assert area_rectangle_quadrature(r) == pytest.approx(theta, abs=1e-6)


def test_shrinking_rectangle_area_vanishes():
    areas = [area_rectangle(LightlikeRectangle.of(1.0, 3.0, -1.0, -1.0 + d)) for d in (1e-1, 1e-3, 1e-6)]
    assert areas[0] > areas[1] > areas[2] > 0
    assert areas[2] < 1e-6


def test_degenerate_rectangle():
    with pytest.raises(DegenerateRectangle):
        LightlikeRectangle.of(1.0, 3.0, 2.0, 5.0)  # meets the diagonal
    with pytest.raises(DegenerateRectangle):
        LightlikeRectangle.of(1.0, 1.0, 0.0, 0.5)


def test_dspoint_off_diagonal():
    with pytest.raises(ValidationError):
        DSPoint.of(2.0, 2.0)


def test_corners_are_valid():
    for c in r_theta(1.0).corners():
        assert not c.x.close_to(c.y)


def test_area_invariant_under_diagonal_action():
    rng = np.random.default_rng(7)
    r = r_theta(1.0)
    for _ in range(50):
        a, b, c = rng.normal(size=3)
        d = (1 + b * c) / a if abs(a) > 0.1 else 1.0
        if abs(a) <= 0.1:
            a, b, c = 1.0, b, 0.0
        m = MoebiusMap(a, b, c, d)
        assert area_rectangle(r.moved(m)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("theta,x,y", [(1.0, 3.0, 0.4), (1.0, 1.5, 0.5), (0.5, 2.0, 0.3), (2.0, 5.0, 0.6), (1.0, 1.2, 0.62)])
def test_lshape_area_is_theta(theta, x, y):
    p = LShapedPolygon(theta, x, y)
    assert y_theta(theta) <= p.y_plus < 1.0
    assert area_lshape(p) == pytest.approx(theta, abs=1e-9)


def test_lshape_degenerates_to_r_theta():
    yt = y_theta(1.0)
    p = LShapedPolygon(1.0, "inf", 0.3)
    assert p.y_plus == pytest.approx(yt, abs=1e-15)
    assert p.cut_rectangle() is None
    assert area_lshape(p) == pytest.approx(1.0, abs=1e-9)
    q = LShapedPolygon(1.0, 3.0, yt)
    assert q.y_plus == pytest.approx(yt, abs=1e-12)
    assert area_lshape(q) == pytest.approx(1.0, abs=1e-9)


def test_domain_membership():
    assert in_domain(1.0, point(3.0), 0.4)
    assert not in_domain(1.0, point(1.2), 0.3)  # below y = 1 - x / e
    assert not in_domain(1.0, point(3.0), 0.7)  # above y_theta
    with pytest.raises(OutsideDomain):
        LShapedPolygon(1.0, 1.2, 0.3)


def test_y_plus_at_infinity_is_y_theta():
    for theta in (0.25, 1.0, 2.0):
        assert y_plus(theta, INF, 0.1) == pytest.approx(y_theta(theta), abs=1e-15)


# ----------------------------------------------------------------------
# properties


@pytest.mark.property
@given(rectangles())
def test_closed_form_matches_quadrature(r):
    assert area_rectangle(r) == pytest.approx(area_rectangle_quadrature(r, 1e-10, 1e-10), abs=1e-6, rel=1e-6)


@pytest.mark.property
@given(rectangles(), moebius_maps())
def test_area_is_invariant(r, m):
    assert area_rectangle(r.moved(m)) == pytest.approx(area_rectangle(r), abs=1e-8, rel=1e-8)


def _angle(p):
    from dstori.moebius import angle_coordinate

    return angle_coordinate(p)


@pytest.mark.property
@given(rectangles(), rectangles())
def test_equal_area_rectangles_are_equivalent(r1, r2):
    target = area_rectangle(r1)
    ua = _angle(r2.yA)
    ub = _angle(r2.xA)
    if ub <= ua:
        ub += 1.0

    def excess(u):
        return area_rectangle(LightlikeRectangle(r2.xA, r2.xC, r2.yA, circle_point(u))) - target

    lo, hi = ua + 1e-9 * (ub - ua), ub - 1e-9 * (ub - ua)
    if excess(lo) > 0 or excess(hi) < 0:
        return  # area out of reach for this (xA, xC, yA)
    u = brentq(excess, lo, hi, xtol=1e-15)
    r2 = LightlikeRectangle(r2.xA, r2.xC, r2.yA, circle_point(u))
    m = from_triples(r1.xA, r1.xC, r1.yA, r2.xA, r2.xC, r2.yA)
    assert apply(m, r1.yC).close_to(r2.yC, 1e-8)


@pytest.mark.property
@given(rectangles(min_gap=0.05), st.floats(0.05, 0.9), st.floats(0.05, 0.9))
def test_area_increases_with_xC(r, s, t):
    s, t = sorted((s, t))
    if t - s < 1e-6:
        return
    ua, ub = _angle(r.xA), _angle(r.yA)
    if ub <= ua:
        ub += 1.0
    a1 = area_rectangle(LightlikeRectangle(r.xA, circle_point(ua + s * (ub - ua)), r.yA, r.yC))
    a2 = area_rectangle(LightlikeRectangle(r.xA, circle_point(ua + t * (ub - ua)), r.yA, r.yC))
    assert a2 > a1
