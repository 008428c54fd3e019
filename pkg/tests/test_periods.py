from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from expcomplex import acceptance
from expcomplex.multival import TWO_PI_I, L_n
from expcomplex.periods import (FramedMatrix, PeriodMatrix, Poly, P_n_k, big_period, coproduct,
                                combination_period, de1_check, griffiths_check, lie_l, lie_period,
                                log_series_check, multiplicativity, omega_compose_check,
                                period_chain_residual, period_tensor, polylog_matrix, polylog_variation,
                                random_period_matrix, rational_splitting, splitting_invariance, top_frame)
from expcomplex.wedge import ShapeError

seeds = st.integers(min_value=0, max_value=10**6)


def test_four_by_four_example():
    got, want = acceptance.four_by_four_example()
    assert got == want


def test_dilogarithm_formulas(state):
    r = acceptance.dilog_examples(state.z)
    assert r["prime"] < 1e-9 and r["big"] < 1e-9


def test_literal_dilogarithm_formulas_have_the_wrong_sign(state):
    # the displayed formulas use log(1-z) where the matrix has Li_1(z) = -log(1-z)
    r = acceptance.dilog_examples(state.z, literal=True)
    assert r["prime"] > 1e-3 and r["big"] > 1e-3


def test_big_period_drops_the_constant_tail(state):
    F = top_frame(polylog_matrix(2, state))
    s = big_period(F).normalize()
    assert len(s.terms) == 2


@given(seeds)
def test_splitting_invariance(seed):
    rng = random.Random(seed)
    assert splitting_invariance(random_period_matrix(rng.randint(2, 6), rng), rng)


@given(seeds)
def test_multiplicativity(seed):
    rng = random.Random(seed)
    M = random_period_matrix(rng.randint(2, 4), rng, "A")
    N = random_period_matrix(rng.randint(2, 4), rng, "B")
    assert multiplicativity(M, N)


def test_left_change_of_basis_is_not_a_symmetry():
    rng = random.Random(4)
    M = random_period_matrix(4, rng)
    while len(set(M.weights)) < 4:
        M = random_period_matrix(4, rng)
    S = rational_splitting(M.weights, rng)
    assert period_tensor(top_frame(S.matmul(M))) != period_tensor(top_frame(M))


def test_matrix_validation():
    with pytest.raises(ShapeError):
        PeriodMatrix([[1, 0], [Poly.gen("a"), 2]], [0, -2], {"a": 1j})
    with pytest.raises(ShapeError):
        PeriodMatrix([[1, Poly.gen("a")], [0, 1]], [0, -2], {"a": 1j})
    with pytest.raises(ShapeError):
        PeriodMatrix([[1, 0], [Poly.gen("a"), 1]], [0, -2], {})


def test_matrix_json_round_trip():
    rng = random.Random(1)
    M = random_period_matrix(4, rng)
    back = PeriodMatrix.from_json(M.to_json())
    assert abs(back.numeric() - M.numeric()).max() < 1e-15


def test_inverse_is_exact():
    rng = random.Random(2)
    M = random_period_matrix(5, rng)
    P = M.matmul(M.inverse())
    assert all(P[i, j] == Poly.const(int(i == j)) for i in range(5) for j in range(5))


def test_coproduct_of_polylog_frame(state):
    F = top_frame(polylog_matrix(3, state))
    assert [(a.row, a.col, b.row, b.col) for a, b in coproduct(F)] == [(3, 1, 1, 0), (3, 2, 2, 0)]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_period_maps_form_a_chain_map(state, n):
    assert period_chain_residual(top_frame(polylog_matrix(n, state))) == 0


def test_top_degree_word_is_the_units(state):
    M = polylog_matrix(3, state)
    w = (FramedMatrix(M, 3, 2), FramedMatrix(M, 2, 1), FramedMatrix(M, 1, 0))
    s = P_n_k(w).normalize()
    assert s.arity == 3 and s.twist == 0 and all(a.kind == "unit" for _, sl in s.terms for a in sl)


@pytest.mark.parametrize("n,frames", [(2, ((2, 0),)), (3, ((3, 0),)), (3, ((3, 1), (1, 0))), (3, ((3, 2), (2, 0)))])
def test_period_maps_are_killed_by_omega(state, n, frames):
    word = acceptance._frame_word(state, n, frames)
    assert omega_compose_check(word, n, [state.z]) < 1e-6


def test_constant_word_is_killed_by_omega(state):
    M = polylog_matrix(2, state)
    word = lambda z: (top_frame(M),)
    assert omega_compose_check(word, 2, [state.z]) < 1e-9


@pytest.mark.parametrize("n", [2, 3, 4])
def test_griffiths_transversality(state, n):
    w = [-2 * i for i in range(n + 1)]
    f = polylog_variation(n, state)
    samples = [state.z + 0.02 * k * (1 + 1j) for k in range(3)]
    assert griffiths_check(f, w, samples, "right") < 1e-6
    assert de1_check(f, w, samples, "right") < 1e-6


def test_literal_de1_fails(state):
    n = 3
    w = [-2 * i for i in range(n + 1)]
    assert de1_check(polylog_variation(n, state), w, [state.z], "literal") > 1e-3


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_maximal_period_is_L_n(state, n):
    M = polylog_matrix(n, state)
    v = combination_period(lie_l(top_frame(M))).value({**M.env, "T": TWO_PI_I})
    assert abs(v - L_n(state, n) / TWO_PI_I ** n) < 1e-8


@pytest.mark.parametrize("n", [2, 3, 4])
def test_lie_period_is_antisymmetric(state, n):
    lp = lie_period(top_frame(polylog_matrix(n, state)))
    assert (lp + lp.swap()).is_zero()


def test_lie_l_kills_products():
    a, b = Poly.gen("a"), Poly.gen("b")
    env = {"a": 0.3 + 0.1j, "b": -0.2 + 0.5j}
    # a 1-framed matrix tensored with itself: its top period a*b/2-like products vanish under l
    A = PeriodMatrix([[1, 0], [a, 1]], [0, -2], env, "A")
    B = PeriodMatrix([[1, 0], [b, 1]], [0, -2], env, "B")
    K = A.kron(B)
    assert combination_period(lie_l(top_frame(K))).is_zero()


def test_log_series():
    assert log_series_check(10)


def test_polylog_matrix_first_column(state):
    M = polylog_matrix(3, state).numeric()
    for k in range(1, 4):
        assert abs(M[k, 0] + state.Li(k) / TWO_PI_I ** k) < 1e-14
