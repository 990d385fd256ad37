import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dstori.errors import DegenerateTriple, DegenerateTuple, NotHyperbolic, OrientationMismatch, ValidationError
from dstori.hiet import g_theta
from dstori.moebius import (
    IDENTITY,
    INF,
    ONE,
    ZERO,
    MoebiusMap,
    ProjectivePoint,
    apply,
    classify,
    compose,
    cross_ratio,
    cyclic_order,
    fixed_points,
    from_triples,
    hyperbolic_power,
    inverse,
    point,
    rotation_matrix,
    trace_abs,
    trace_commutator,
)

from conftest import angles, moebius_maps, points, well_separated

LN2 = math.log(2.0)


def g_closed(theta, t):
    yt = 1.0 - math.exp(-theta)
    return (yt - 1.0) * t / (t - 1.0)


def h_closed(theta, x, t):
    yt = 1.0 - math.exp(-theta)
    xp = x / (x - 1.0)
    return (x * (1 - yt) * t + xp * (x - 1) * yt) / ((1 - yt) * t + xp * (x - 1))


# ----------------------------------------------------------------------
# normalization


def test_point_normalization():
    p = ProjectivePoint(3.0, 1.0)
    assert math.isclose(p.a**2 + p.b**2, 1.0, rel_tol=1e-15)
    assert p.b > 0
    assert ProjectivePoint(-3.0, -1.0) == p
    assert ProjectivePoint(-2.0, 0.0) == INF == ProjectivePoint(5.0, 0.0)
    assert point("inf") is INF
    assert point(3.0).to_real() == pytest.approx(3.0, rel=1e-15)


def test_zero_vector_rejected():
    with pytest.raises(ValidationError):
        ProjectivePoint(0.0, 0.0)


def test_map_sign_canonical():
    m = MoebiusMap(2.0, 1.0, 3.0, 2.0)
    assert MoebiusMap(-2.0, -1.0, -3.0, -2.0) == m
    assert abs(m.m11 * m.m22 - m.m12 * m.m21 - 1.0) <= 1e-12
    assert MoebiusMap(0.0, -1.0, 1.0, 0.0).m12 > 0


def test_orientation_reversing_matrix_rejected():
    with pytest.raises(ValidationError):
        MoebiusMap(1.0, 0.0, 0.0, -1.0)


# ----------------------------------------------------------------------
# apply and compose


def test_apply_identity():
    assert apply(IDENTITY, point(3.0)) == point(3.0)


def test_g_sends_one_to_infinity():
    assert apply(g_theta(1.0), ONE).close_to(INF)


def test_g_closed_form_value():
    # theta = ln 2, so g(t) = -t / (2 (t - 1)) and g(3) = -3/4
    assert apply(g_theta(LN2), point(3.0)).to_real() == pytest.approx(-0.75, abs=1e-12)
    for theta in (0.25, 1.0, 2.0):
        for t in (-2.0, 0.3, 4.5):
            assert apply(g_theta(theta), point(t)).to_real() == pytest.approx(g_closed(theta, t), rel=1e-12)


def test_apply_matches_fraction_on_finite_points():
    m = MoebiusMap(2.0, 1.0, 3.0, 2.0)
    for t in np.linspace(-5, 5, 23):
        if abs(3 * t + 2) < 1e-6:
            continue
        assert apply(m, point(t)).to_real() == pytest.approx((2 * t + 1) / (3 * t + 2), rel=1e-12)


def test_apply_at_pole_gives_infinity():
    m = MoebiusMap(2.0, 1.0, 3.0, 2.0)
    assert apply(m, point(-2.0 / 3.0)).close_to(INF, 1e-12)


def test_compose_inverse_is_identity():
    m = MoebiusMap(2.0, 1.0, 3.0, 2.0)
    assert compose(m, inverse(m)).close_to(IDENTITY, 1e-12)
    assert compose(IDENTITY, m).close_to(m, 1e-15)


def test_gh_trace_closed_form_at_ln2():
    from dstori.hiet import build_one_sing

    fam = build_one_sing(LN2, 2.0)
    assert trace_abs(compose(fam.g, fam.h)) == pytest.approx(math.sqrt(3.0), abs=1e-12)


# ----------------------------------------------------------------------
# from_triples


def test_from_triples_standard_is_identity():
    assert from_triples(ZERO, ONE, INF, ZERO, ONE, INF).close_to(IDENTITY, 1e-12)


def test_from_triples_gives_g_matrix():
    yt = 0.5
    m = from_triples(ONE, ZERO, point(yt), INF, ZERO, point(yt))
    # proportional to [[-1/2, 0], [1, -1]]
    ref = MoebiusMap(-0.5 * math.sqrt(2), 0.0, math.sqrt(2), -math.sqrt(2))
    assert m.close_to(ref, 1e-12)


def test_from_triples_reproduces_h_closed_form():
    for theta in (LN2, 1.0, 2.0):
        for x in (1.5, 2.0, 7.0):
            yt = 1.0 - math.exp(-theta)
            xp = x / (x - 1.0)
            h = from_triples(point(xp), INF, ZERO, ONE, point(x), point(yt))
            pole = -xp * (x - 1.0) / (1.0 - yt)
            for t in np.linspace(-2.9, 8.7, 10):
                if abs(t - pole) < 0.1:
                    t += 0.3
                assert apply(h, point(t)).to_real() == pytest.approx(h_closed(theta, x, t), abs=1e-10, rel=1e-10)


def test_from_triples_degenerate():
    with pytest.raises(DegenerateTriple):
        from_triples(ZERO, ZERO, INF, ZERO, ONE, INF)


def test_from_triples_orientation_mismatch():
    with pytest.raises(OrientationMismatch):
        from_triples(ZERO, ONE, INF, ONE, ZERO, INF)


# ----------------------------------------------------------------------
# traces and classification


def test_commutator_with_identity():
    assert trace_commutator(MoebiusMap(2.0, 1.0, 3.0, 2.0), IDENTITY) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("theta", [0.25, 0.5, 1.0, 2.0, 3.0])
def test_commutator_trace_formula(theta):
    from dstori.hiet import build_one_sing

    yt = 1.0 - math.exp(-theta)
    closed = (yt * yt - 2 * yt + 2) / (1 - yt)
    assert closed == pytest.approx(2 * math.cosh(theta), abs=1e-12)
    for x in (1.1, 2.0, 10.0, 1e4):
        fam = build_one_sing(theta, x)
        assert trace_commutator(fam.g, fam.h) == pytest.approx(closed, abs=1e-9)


def test_commutator_value_at_one():
    # frozen from the hyperbolic cosine
    assert 2 * math.cosh(1.0) == pytest.approx(3.0861612696304874, abs=1e-15)


def test_classify():
    assert classify(IDENTITY).tag == "identity"
    c = classify(g_theta(1.0))
    assert c.tag == "hyperbolic" and c.translation_parameter > 0
    assert classify(rotation_matrix(0.3)).tag == "elliptic"
    assert classify(MoebiusMap(1.0, 1.0, 0.0, 1.0)).tag == "parabolic"


# ----------------------------------------------------------------------
# one-parameter subgroups and fixed points


def test_hyperbolic_power_endpoints():
    g = g_theta(1.0)
    assert hyperbolic_power(g, 0.0).close_to(IDENTITY, 1e-12)
    assert hyperbolic_power(g, 1.0).close_to(g, 1e-12)


def test_hyperbolic_half_power_squares_back():
    g = g_theta(1.0)
    r = hyperbolic_power(g, 0.5)
    assert compose(r, r).close_to(g, 1e-10)


def test_hyperbolic_power_rejects_elliptic():
    with pytest.raises(NotHyperbolic):
        hyperbolic_power(rotation_matrix(0.3), 0.5)


def test_fixed_points_diagonal():
    a, r = fixed_points(MoebiusMap(2.0, 0.0, 0.0, 0.5))
    assert a.close_to(INF) and r.close_to(ZERO)


def test_fixed_points_of_g():
    for theta in (LN2, 1.0, 2.0):
        yt = 1.0 - math.exp(-theta)
        a, r = fixed_points(g_theta(theta))
        assert a.close_to(ZERO, 1e-12)
        assert r.close_to(point(yt), 1e-12)


def test_fixed_points_of_h():
    from dstori.hiet import build_one_sing

    fam = build_one_sing(LN2, 2.0)
    a, r = fixed_points(fam.h)
    assert 0.5 < a.to_real() < 1.0
    rv = r.to_real()
    assert not (0.0 <= rv <= 1.0)
    for p in (a, r):
        assert apply(fam.h, p).close_to(p, 1e-12)


# ----------------------------------------------------------------------
# cyclic order and cross ratio


def test_cyclic_order_calibration():
    assert cyclic_order(ZERO, ONE, INF) == "positive"
    assert cyclic_order(ONE, ZERO, INF) == "negative"
    assert cyclic_order(ZERO, ZERO, INF) == "degenerate"


def test_cross_ratio_normalization():
    for t in (-3.0, 0.5, 2.0, 17.0):
        assert cross_ratio(ZERO, ONE, INF, point(t)) == pytest.approx(t, rel=1e-14)


def test_cross_ratio_degenerate():
    with pytest.raises(DegenerateTuple):
        cross_ratio(ZERO, ONE, ONE, INF)


# ----------------------------------------------------------------------
# properties


@pytest.mark.property
@given(points())
def test_normalization_idempotent(p):
    q = ProjectivePoint(p.a, p.b)
    assert (q.a, q.b) == (p.a, p.b)


@pytest.mark.property
@given(st.floats(1e-6, 1e6), st.booleans(), points())
def test_normalization_is_scale_free(k, negate, p):
    # subnormal scale factors drop mantissa bits before normalization sees them
    k = -k if negate else k
    q = ProjectivePoint(k * p.a, k * p.b)
    assert abs(q.a - p.a) <= 4e-16 and abs(q.b - p.b) <= 4e-16


@pytest.mark.property
@given(moebius_maps(), moebius_maps(), moebius_maps())
def test_compose_associative(a, b, c):
    assert compose(compose(a, b), c).close_to(compose(a, compose(b, c)), 1e-10)


@pytest.mark.property
@given(moebius_maps())
def test_inverse_two_sided(m):
    assert compose(m, inverse(m)).close_to(IDENTITY, 1e-10)
    assert compose(inverse(m), m).close_to(IDENTITY, 1e-10)


@pytest.mark.property
@given(moebius_maps(), moebius_maps(), angles())
def test_apply_respects_composition(m, n, p):
    assert apply(compose(m, n), p).close_to(apply(m, apply(n, p)), 1e-10)


@pytest.mark.property
@given(moebius_maps(), angles(), angles(), angles())
def test_cyclic_order_is_invariant(m, p, q, r):
    assume(well_separated([p, q, r], 1e-3))
    before = cyclic_order(p, q, r)
    assert before != "degenerate"
    assert cyclic_order(apply(m, p), apply(m, q), apply(m, r), tol=1e-14) == before
    assert cyclic_order(q, r, p) == before
    assert cyclic_order(q, p, r) != before


@pytest.mark.property
@given(moebius_maps(), angles(), angles(), angles(), angles())
def test_cross_ratio_invariant(m, p, q, r, s):
    assume(well_separated([p, q, r, s], 1e-2))
    c0 = cross_ratio(p, q, r, s)
    c1 = cross_ratio(apply(m, p), apply(m, q), apply(m, r), apply(m, s))
    assert c1 == pytest.approx(c0, rel=1e-8, abs=1e-8)


@pytest.mark.property
@given(st.sampled_from([0.25, 0.5, 1.0, 2.0]), st.floats(-4.0, 4.0), st.floats(-4.0, 4.0))
def test_flow_law(theta, s, t):
    g = g_theta(theta)
    lhs = compose(hyperbolic_power(g, s), hyperbolic_power(g, t))
    assert lhs.close_to(hyperbolic_power(g, s + t), 1e-9 * max(1.0, math.exp(theta * (abs(s) + abs(t)))))


@pytest.mark.property
@given(moebius_maps())
def test_classification_thresholds(m):
    tag = classify(m).tag
    t = trace_abs(m)
    if tag == "hyperbolic":
        assert t > 2.0 + 1e-9
        a, r = fixed_points(m)
        assert apply(m, a).close_to(a, 1e-8) and apply(m, r).close_to(r, 1e-8)
    elif tag == "parabolic":
        assert abs(t - 2.0) <= 1e-9
    elif tag == "elliptic":
        assert t < 2.0
