from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gamegen import rationals01
from stayset import closed_form as cf
from stayset.chain import safety_payoff
from stayset.game import build_game_G, build_modified_game, g_profile

G = build_game_G()
H = F(1, 1024)


def engine(p1, p2):
    m = safety_payoff(G, g_profile(p1, p2))
    return m.u(1, "1"), m.u(2, "1")


@pytest.mark.parametrize("p,want", [((0, 0), 1), ((1, 0), F(2, 3)), ((1, 1), F(3, 5))])
def test_u11_examples(p, want):
    assert cf.u11_closed(*p) == want


def test_u21_examples():
    assert cf.u21_closed(0, 0) == 0
    assert cf.u21_closed(1, 1) == F(3, 5)


@pytest.mark.parametrize("p2", [F(1, 4), F(1, 2), F(1)])
def test_u21_flat_at_threshold(p2):
    assert cf.u21_closed(F(4, 7), p2) == F(1, 2)
    assert engine(F(4, 7), p2)[1] == F(1, 2)


def test_sign_examples():
    assert cf.sign_du11_dp1(F(1, 2)) == 1
    assert cf.sign_du21_dp2(F(4, 7)) == 0
    assert cf.sign_du21_dp2(1) == -1


def test_modified_continue_at_equilibrium():
    assert cf.modified_u11_closed("continue-at-L2", F(4, 7), F(1, 4)) == F(2, 3)


def test_modified_quit_hits_43_65():
    assert cf.modified_u11_closed("quit-at-L2", 1, 0) == F(43, 65)


@pytest.mark.parametrize("p2,sign", [(F(1, 8), -1), (F(1, 4), 0), (F(1, 2), 1)])
def test_modified_continue_sign(p2, sign):
    assert cf.sign_modified_du11_dp1("continue-at-L2", p2) == sign


def test_modified_quit_sign_always_positive():
    assert all(cf.sign_modified_du11_dp1("quit-at-L2", F(k, 16)) == 1 for k in range(17))


def test_grid_17_matches_engine():
    for a in range(17):
        for b in range(17):
            p1, p2 = F(a, 16), F(b, 16)
            assert engine(p1, p2) == (cf.u11_closed(p1, p2), cf.u21_closed(p1, p2))


@settings(max_examples=200, deadline=None)
@given(rationals01, rationals01)
def test_random_points_match_engine(p1, p2):
    assert engine(p1, p2) == (cf.u11_closed(p1, p2), cf.u21_closed(p1, p2))
    assert cf.u11_closed(p1, p2) == cf.u11_closed_alt(p1, p2)
    assert cf.u21_closed(p1, p2) == cf.u21_closed_alt(p1, p2)


@settings(max_examples=100, deadline=None)
@given(rationals01, rationals01)
def test_modified_closed_forms_match_engine(p1, p2):
    for v in cf.VARIANTS:
        got = safety_payoff(build_modified_game(v), g_profile(p1, p2)).u(1, "1")
        assert got == cf.modified_u11_closed(v, p1, p2)


# Finite differences: the sign claims depend only on the other coordinate,
# so the sign is constant on [x, x + H] and the difference quotient must agree.

@settings(max_examples=100, deadline=None)
@given(rationals01, rationals01)
def test_sign_du11_finite_difference(x, p2):
    x = min(x, 1 - H)
    if p2 == 0 and x == 0:
        return  # the jump at the origin is not a derivative
    assert cf.sgn(cf.u11_closed(x + H, p2) - cf.u11_closed(x, p2)) == cf.sign_du11_dp1(p2)


@settings(max_examples=100, deadline=None)
@given(rationals01, rationals01)
def test_sign_du21_finite_difference(p1, x):
    x = min(x, 1 - H)
    assert cf.sgn(cf.u21_closed(p1, x + H) - cf.u21_closed(p1, x)) == cf.sign_du21_dp2(p1)


@pytest.mark.parametrize("variant", cf.VARIANTS)
@settings(max_examples=60, deadline=None)
@given(x=rationals01, p2=rationals01)
def test_modified_sign_finite_difference(variant, x, p2):
    x = min(x, 1 - H)
    diff = cf.modified_u11_closed(variant, x + H, p2) - cf.modified_u11_closed(variant, x, p2)
    assert cf.sgn(diff) == cf.sign_modified_du11_dp1(variant, p2)


@given(rationals01)
def test_best_reply_values(p):
    assert cf.best_reply_value_1(p) == max(cf.u11_closed(0, p), cf.u11_closed(1, p))
    assert cf.best_reply_value_2(p) == max(cf.u21_closed(p, 0), cf.u21_closed(p, 1))


def test_unknown_variant():
    with pytest.raises(ValueError):
        cf.modified_u11_closed("x", 0, 0)
    with pytest.raises(ValueError):
        cf.sign_modified_du11_dp1("x", 0)
