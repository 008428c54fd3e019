from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from expcomplex.bloch import (BlochPoint, L_poly, WedgeOfUnits, cross_ratio, delta, factor_rational,
                              five_term, five_term_points, ladder, ladder_env, ladder_omega_residual,
                              ladder_square, monodromy_of_L, monodromy_substitution, p2, p2_sum,
                              r_deligne_map, r_deligne_residual)
from expcomplex.multival import PathSpec, continue_along, monodromy
from expcomplex.wedge import ShapeError

rationals = st.fractions(min_value=-30, max_value=30, max_denominator=12)


def test_factorization():
    assert factor_rational(Fraction(-12, 35)) == {-1: 1, 2: 2, 3: 1, 5: -1, 7: -1}


def test_cross_ratio_value():
    assert cross_ratio((1, 0), (0, 1), (1, 1), (1, Fraction(3, 7))) == Fraction(3, 7)


@given(st.lists(rationals, min_size=5, max_size=5, unique=True))
def test_delta_kills_the_five_term_relation(pts):
    assert delta(five_term(*pts)).is_zero()


def test_delta_of_a_single_point_is_nonzero():
    assert not delta({Fraction(3): 1}).is_zero()


def test_wedge_of_units_is_antisymmetric():
    a, b = Fraction(6), Fraction(-5, 7)
    assert (WedgeOfUnits.pair(a, b) + WedgeOfUnits.pair(b, a)).is_zero()
    assert not WedgeOfUnits.pair(a, b).is_zero()


@given(st.lists(st.integers(min_value=-60, max_value=60), min_size=5, max_size=5, unique=True))
def test_p2_of_five_term_vanishes(ts):
    ts = sorted(t / 10 for t in ts)
    assert p2_sum(five_term_points(ts)).residual() < 1e-9


@pytest.mark.parametrize("x", [0.2, 0.37, 0.81])
def test_p2_kills_x_plus_one_minus_x(x):
    pts = [(1, BlochPoint.from_state(continue_along(PathSpec.straight(0.5, x), 2))),
           (1, BlochPoint.from_state(continue_along(PathSpec.straight(0.5, 1 - x), 2)))]
    assert p2_sum(pts).is_zero()


@pytest.mark.parametrize("loop", ["g0", "g1"])
def test_p2_is_monodromy_invariant(state, loop):
    a = p2(BlochPoint.from_state(state))
    b = p2(BlochPoint.from_state(monodromy(state, loop)))
    assert (a - b).is_zero()


def test_monodromy_of_L_around_one():
    assert monodromy_of_L("g1", 4).is_zero()
    assert monodromy_of_L("g1", 1) == -1


LADDERS = [(n, k) for n in (2, 3, 4) for k in range(1, n)]
YS = [0.7 - 0.2j, 1.3 + 0.5j]


@pytest.mark.parametrize("n,k", LADDERS)
def test_ladder_squares_commute(state, n, k):
    ys = YS[:k - 1] if k < n - 1 else YS[:n - 2]
    assert ladder_square(n, k, state, ys) < 1e-9


@pytest.mark.parametrize("n,k", LADDERS)
def test_omega_kills_ladders(state, n, k):
    assert ladder_omega_residual(n, k, state, YS[:k - 1]) < 1e-6


@pytest.mark.parametrize("n,k", LADDERS)
@pytest.mark.parametrize("loop", ["g0", "g1"])
def test_ladders_are_monodromy_invariant(state, n, k, loop):
    pw = ladder(n, k)
    env = ladder_env(state, YS)
    moved = pw.substitute(monodromy_substitution(loop))
    assert moved.residual_against(pw, env) == 0


def test_identity_ladder_and_range():
    assert ladder(3, 3) is None
    with pytest.raises(ShapeError):
        ladder(5, 2)


def test_L_poly_has_one_term_per_bernoulli_weight():
    # beta_3 = 0 drops one summand of L_4
    assert [len(L_poly(k).terms) for k in (1, 2, 3, 4)] == [1, 2, 3, 3]


def test_regulator_on_a_family():
    def points(t):
        st = continue_along(PathSpec.straight(0.5, 0.3 + 0.2j + t * 0.1), 2)
        return [(1, BlochPoint.from_state(st))]
    r = r_deligne_residual(points, 0.4 + 0.1j)
    assert r["units"] == 0 and r["omega"] < 1e-8


def test_regulator_on_five_term_family():
    r = r_deligne_residual(lambda t: five_term_points([0, 0.3, 0.7 + 0.05 * t.real, 1.2, 2.0]), 0.1 + 0j)
    assert r["units"] == 0 and r["omega"] < 1e-8


def test_regulator_of_zero_is_zero():
    assert r_deligne_map(1, []).lam.is_zero()
