from __future__ import annotations

import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from expcomplex.multival import (TWO_PI_I, BernoulliTable, PathError, PathSpec, L_n, beta,
                                 bernoulli_identity_terms, continue_along, extend, initial_state,
                                 log_monodromy, monodromy, monodromy_defect, numeric_log_monodromy,
                                 numeric_monodromy, pi_n, polylog_at_one, zagier_single_valued)

radii = st.floats(min_value=0.25, max_value=0.85)
angles = st.floats(min_value=-2.0, max_value=2.0)


def test_dilog_at_one():
    assert abs(polylog_at_one(2) - math.pi ** 2 / 6) < 1e-9


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_polylog_at_one_is_zeta(m):
    assert abs(polylog_at_one(m) - float(mpmath.zeta(m))) < 1e-9


@given(radii, angles)
def test_principal_branch_matches_mpmath(r, t):
    z = cmath.rect(r, t)
    s = continue_along(PathSpec.straight(0.5, z), 4)
    for m in range(1, 5):
        assert abs(s.Li(m) - complex(mpmath.polylog(m, z))) < 1e-10
    assert abs(s.log_z - cmath.log(z)) < 1e-12
    assert abs(s.log_1mz - cmath.log(1 - z)) < 1e-12


def test_value_beyond_the_unit_disc():
    z = complex(2.5, 1.0)
    s = continue_along(PathSpec(0.5, (0.5 + 1j, z)), 3)
    for m in (2, 3):
        assert abs(s.Li(m) - complex(mpmath.polylog(m, z))) < 1e-9


def test_round_trip_returns_to_start():
    s = continue_along(PathSpec(0.5, (0.5 + 0.6j, -0.4 + 0.3j)), 4)
    back = extend(s, [0.5 + 0.6j, 0.5])
    assert back.distance(initial_state(0.5, 4)) < 1e-9


def test_paths_near_singularities_are_rejected():
    with pytest.raises(PathError):
        PathSpec.straight(0.5, 0.01)
    with pytest.raises(PathError):
        PathSpec(0.5, (1.5,))


@pytest.mark.parametrize("loop", ["g0", "g1"])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_closed_form_monodromy_matches_numeric_loop(state, loop, n):
    closed = monodromy_defect(state, loop, n)
    num = (L_n(numeric_monodromy(state, loop), n) - L_n(state, n)) / TWO_PI_I
    assert abs(closed - num) < 1e-8


@pytest.mark.parametrize("loop", ["g0", "g1"])
def test_closed_form_state_matches_numeric_state(state, loop):
    assert monodromy(state, loop).distance(numeric_monodromy(state, loop)) < 1e-8


@pytest.mark.parametrize("loop", ["g0", "g1"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_log_monodromy_matches_iterated_loops(state, loop, n):
    assert abs(log_monodromy(state, loop, n) - numeric_log_monodromy(state, loop, n)) < 1e-8


def test_monodromy_around_one_on_L_n(state):
    # (1/2 pi i)(T - Id) L_n = -(-1)^(n-1) beta_(n-1) log^(n-1) z
    for n in range(1, 6):
        want = -(-1) ** (n - 1) * float(beta(n - 1)) * state.log_z ** (n - 1)
        assert abs(monodromy_defect(state, "g1", n) - want) < 1e-12


def test_beta_table():
    assert [beta(k) for k in (0, 1, 2, 3, 4)] == [1, Fraction(-1, 2), Fraction(1, 12), 0, Fraction(-1, 720)]


@pytest.mark.parametrize("n", range(1, 13))
def test_bernoulli_identity_with_sign(n):
    lhs, rhs = bernoulli_identity_terms(n)
    assert lhs == rhs


def test_unsigned_bernoulli_identity_fails_only_at_two():
    bad = []
    for n in range(1, 13):
        lhs, rhs = bernoulli_identity_terms(n)
        unsigned = (-1) ** (n - 1) * rhs
        if lhs != unsigned:
            bad.append(n)
    assert bad == [2]


def test_generating_series():
    assert BernoulliTable.standard(12).verify()
    betas = list(BernoulliTable.standard(12).betas)
    betas[6] += Fraction(1, 1000)
    assert not BernoulliTable(tuple(betas)).verify()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_single_valued_version_is_loop_invariant(state, n):
    v = zagier_single_valued(state, n)
    for loop in ("g0", "g1"):
        assert abs(zagier_single_valued(monodromy(state, loop), n) - v) < 1e-10


def test_projection_to_real_twists():
    assert pi_n(1 + 2j, 3) == 1
    assert pi_n(1 + 2j, 2) == 2j


def test_path_json_round_trip():
    p = PathSpec(0.4, (0.5 + 0.5j, -0.2 + 0.4j))
    q, depth = PathSpec.from_json(p.to_json(3))
    assert q == p and depth == 3


@pytest.mark.parametrize("x", [0.1, 0.35, 0.8])
def test_reflection_constant(x):
    # Euler reflection gives the constant (2 pi i)^2/24, not 0, before the torsion rule
    from expcomplex.multival import L2_bloch
    a = continue_along(PathSpec.straight(0.5, x), 2)
    b = continue_along(PathSpec.straight(0.5, 1 - x), 2)
    oracle = float(mpmath.polylog(2, x) + mpmath.polylog(2, 1 - x)) + math.log(x) * math.log(1 - x)
    assert abs(oracle - math.pi ** 2 / 6) < 1e-12
    assert abs(L2_bloch(a) + L2_bloch(b) - TWO_PI_I ** 2 / 24) < 1e-12
