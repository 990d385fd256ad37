import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dstori.errors import BudgetExceeded, DomainError, NoRoot, PlateauWarning, ValidationError
from dstori.glue import BETA, build_T_theta_x, first_return
from dstori.hiet import build_one_sing, x_of_s
from dstori.moebius import ONE, apply, point
from dstori.rotation import circle_distance, cyclic_order_matches, rotation_number
from dstori.solve import (
    AffineCircle,
    closed_leaf_circle,
    evaluate_word,
    measure_pair,
    monotone_word_scan,
    realize_irrational,
    realize_pair,
    realize_rational,
    rigidity_uniqueness_check,
    rotation_word,
    surgery_compose,
    surgery_realize,
    surgery_sweep,
)

GOLDEN = 0.6180339887


def _cyclic_equal(a, b):
    return len(a) == len(b) and a in b + b


# ----------------------------------------------------------------------
# words


def test_rotation_words():
    assert rotation_word(1, 2) == "ab"
    assert rotation_word(1, 3) == "aab"
    assert rotation_word(2, 5) == "aabab"
    assert rotation_word(2, 3) == "abb"
    with pytest.raises(ValidationError):
        rotation_word(2, 4)


@pytest.mark.property
@given(st.integers(1, 30), st.integers(2, 31))
def test_rotation_word_letter_count(p, q):
    if p >= q or math.gcd(p, q) != 1:
        return
    w = rotation_word(p, q)
    assert len(w) == q and w.count("b") == p


def test_evaluate_word_order():
    A = build_one_sing(1.0, 3.0).gh
    B = build_one_sing(1.0, 3.0).h
    out = evaluate_word("ab", A, B, point(2.0))
    assert out[0].close_to(apply(A, point(2.0)))
    assert out[1].close_to(apply(B, out[0]))


# ----------------------------------------------------------------------
# realization


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (2, 5), (3, 4)])
def test_realize_rational(theta, p, q):
    real = realize_rational(theta, p, q)
    cert = real.certificate
    assert cert["return_error"] <= 1e-9
    assert cyclic_order_matches(cert["orbit"], p, q)
    assert cert["coding"] == rotation_word(p, q)
    r = rotation_number(build_one_sing(theta, real.x).E.to_circle_map())
    assert r.is_rational and (r.p, r.q) == (p, q)
    assert x_of_s(theta, real.s).close_to(real.x)


def test_realized_half_is_two_at_log_two():
    # at theta = ln 2 the two breaks of E_2 coincide and E_2 swaps [1, 2) and [2, inf)
    real = realize_rational(math.log(2.0), 1, 2)
    assert real.x_real == pytest.approx(2.0, abs=1e-9)


def test_realize_rational_bad_input():
    with pytest.raises(ValidationError):
        realize_rational(1.0, 2, 4)
    with pytest.raises(ValidationError):
        realize_rational(1.0, 0, 1)


def test_realize_rational_near_one_runs_out_of_doubles():
    with pytest.raises(NoRoot):
        realize_rational(1.0, 199, 200, grid=33)


def test_realize_irrational_golden():
    real = realize_irrational(1.0, GOLDEN, tol=1e-6)
    assert real.warning is None
    assert real.residual <= 1e-6
    m = build_one_sing(1.0, real.x).E.to_circle_map()
    r = rotation_number(m, tol=5e-7, budget=2_000_000)
    assert abs(r.value - GOLDEN) <= 1e-6


def test_realize_zero_is_the_endpoint():
    real = realize_irrational(1.0, 0.0)
    assert real.x.close_to(ONE)
    assert real.rotation["p"] == 0


def test_rational_target_lands_on_plateau():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        real = realize_irrational(1.0, 1 / 3, tol=1e-6)
    if real.warning == "plateau":
        assert any(issubclass(w.category, PlateauWarning) for w in caught)
    assert real.residual <= 1e-6


@pytest.mark.slow
def test_realize_pair():
    res = realize_pair(1.0, 0.3, 0.7, tol=1e-3)
    assert res.certified and max(res.residuals) <= 1e-3
    rf, _, rb = measure_pair(1.0, res.x, res.y, tol=1e-4)
    assert circle_distance(rf.value, 0.3) <= 1e-3
    assert circle_distance(rb, 0.7) <= 1e-3


def test_realize_pair_failure_carries_best():
    with pytest.raises(BudgetExceeded) as info:
        realize_pair(1.0, 0.3, 0.7, tol=1e-12, grid=4, rounds=1, zoom=3)
    best = info.value.best
    assert best.residual >= 0 and not best.certified


# ----------------------------------------------------------------------
# surgery


def _surgery_setup(theta=1.0, x=2.0):
    s = build_T_theta_x(theta, x)
    circle, hol = closed_leaf_circle(s)
    return first_return(s, BETA), circle, hol


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_closed_leaf_is_dilation_circle(theta):
    _, circle, hol = _surgery_setup(theta, 3.0)
    assert circle.kind == "dilation"
    assert circle.mu == pytest.approx(math.exp(theta), rel=1e-12)
    y0 = point(0.0)
    assert apply(hol, y0).close_to(y0, 1e-9)


def test_affine_circle_validation():
    with pytest.raises(ValidationError):
        AffineCircle("dilation", 0.5)
    with pytest.raises(ValidationError):
        AffineCircle("conformal")
    c = AffineCircle("dilation", math.e)
    p = point(3.0)
    assert apply(c.automorphism(1.0), p).close_to(point(3.0 * math.e))
    assert c.from_log(c.log_coordinate(p)).close_to(p)


def test_zero_surgery_is_unchanged():
    P, circle, _ = _surgery_setup()
    res = surgery_compose(P, circle, 0.0)
    r0 = rotation_number(P)
    assert res.rotation.tau == r0.tau
    for t in np.linspace(0, 0.99, 20):
        assert res.map.lift(float(t)) == pytest.approx(P.lift(float(t)), abs=1e-12)


def test_surgery_loop_adds_one_turn():
    P, circle, _ = _surgery_setup()
    sweep = surgery_sweep(P, circle, n=40, tol=1e-6, budget=20_000)
    taus = [r.rotation.tau for r in sweep]
    errs = [r.rotation.error_bound for r in sweep]
    for i in range(1, len(taus)):
        assert taus[i] >= taus[i - 1] - 2 * max(errs[i], errs[i - 1]) - 1e-12
    assert taus[-1] - taus[0] == pytest.approx(1.0, abs=errs[0] + errs[-1] + 1e-9)


@pytest.mark.parametrize("q", [1, 2, 3, 5, 8])
def test_surgery_realizes_one_over_q(q):
    P, circle, _ = _surgery_setup()
    res = surgery_realize(P, circle, 1, q, tol=1e-8)
    r = res.rotation
    assert r.is_rational and (r.p % r.q, r.q) == (1 % q, q)
    assert 0.0 <= res.parameter <= 1.0


# ----------------------------------------------------------------------
# words and rigidity


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (2, 5)])
def test_monotone_word_scan(theta, p, q):
    real = realize_rational(theta, p, q)
    rep = monotone_word_scan(theta, real.x, rotation_word(p, q), n=200)
    assert rep.ok, rep.violations
    assert len(rep.s_grid) == 200


def test_word_scan_input_checks():
    with pytest.raises(ValidationError):
        monotone_word_scan(1.0, 2.0, "abc")
    with pytest.raises(DomainError):
        monotone_word_scan(1.0, 0.5, "ab")


@pytest.mark.parametrize("p,q", [(0, 1), (1, 2), (1, 3), (2, 5)])
def test_rigidity_unique(p, q):
    out = rigidity_uniqueness_check(1.0, p, q)
    assert out["unique"], out


# ----------------------------------------------------------------------
# properties


@pytest.mark.property
@settings(max_examples=15)
@given(st.sampled_from([0.5, 1.0, 2.0]), st.floats(0.05, 0.95))
def test_irrational_realization_contract(theta, rho):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PlateauWarning)
        real = realize_irrational(theta, rho, tol=1e-5, budget=400_000)
    if real.warning == "plateau":
        lo, hi = real.certificate["bracket_s"]
        assert hi - lo < 1e-12
    else:
        assert real.residual <= 1e-5
    assert 0.0 < real.s < 1.0


@pytest.mark.property
@settings(max_examples=20)
@given(st.sampled_from([0.5, 1.0, 2.0]), st.integers(1, 9), st.integers(2, 10))
def test_rational_realization_contract(theta, p, q):
    if p >= q or math.gcd(p, q) != 1:
        return
    real = realize_rational(theta, p, q)
    assert real.certificate["return_error"] <= 1e-9
    assert _cyclic_equal(real.certificate["coding"], rotation_word(p, q))
    # realizations of larger fractions sit further out in the family
    if p / q < 1 / 2:
        assert real.s <= realize_rational(theta, 1, 2).s + 1e-12
