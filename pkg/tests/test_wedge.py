from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from expcomplex.wedge import (TWO_PI_I, Atom, FormalSum, ShapeError, exp_differential, exterior_derivative,
                              germ, lie_exp_differential, normalize, omega_tensor, omega_wedge, one,
                              rational, root_of_unity, star_product, two_pi_i, unit, wedge_forms,
                              FormSample, _perm_sign)

complex_values = st.complex_numbers(min_magnitude=0.1, max_magnitude=5, allow_nan=False, allow_infinity=False)


def test_torsion_rule():
    s = FormalSum.wedge(two_pi_i(), two_pi_i(Fraction(3, 7)))
    assert s.is_zero()


def test_rational_multiple_of_2pii_is_recognized():
    s = FormalSum.wedge(two_pi_i(), germ(TWO_PI_I * 5 / 12))
    assert s.is_zero()


def test_exact_atoms_move_into_the_coefficient():
    a = FormalSum.tensor(rational(3), germ(1.7 + 0.2j))
    b = FormalSum.tensor(one(), germ(1.7 + 0.2j), coeff=3)
    assert (a - b).is_zero()


def test_roots_of_unity_are_torsion():
    assert FormalSum.tensor(root_of_unity(4), germ(0.3)).is_zero()
    assert FormalSum.tensor(root_of_unity(Fraction(1, 3)), germ(0.3)).is_zero()
    assert not FormalSum.tensor(unit(2.0), germ(0.3)).is_zero()


@given(st.lists(complex_values, min_size=2, max_size=4, unique_by=lambda z: (round(z.real, 3), round(z.imag, 3))))
def test_wedge_antisymmetry(vals):
    base = FormalSum.wedge(*[germ(v) for v in vals])
    for perm in itertools.permutations(range(len(vals))):
        sign, _ = _perm_sign(list(perm))
        other = FormalSum.wedge(*[germ(vals[i]) for i in perm])
        assert (other - base.scale(sign)).is_zero()


@given(complex_values, complex_values)
def test_repeated_slot_vanishes(a, b):
    assert FormalSum.wedge(germ(a), germ(a), germ(b)).is_zero()


@given(complex_values, complex_values)
def test_tensor_is_not_symmetric(a, b):
    if abs(a - b) < 1e-3:
        return
    assert not (FormalSum.tensor(germ(a), germ(b)) - FormalSum.tensor(germ(b), germ(a))).is_zero()


def test_normal_form_is_canonical():
    a, b = germ(0.4 + 1j), germ(-2 + 0.1j)
    s = FormalSum.wedge(a, b) + FormalSum.wedge(b, a, coeff=-1)
    nf = normalize(s)
    assert len(nf.terms) == 1 and abs(nf.terms[0][0]) == 2


def test_exponential_differential_squares_to_zero():
    n = 3
    x = FormalSum.tensor(germ(0.7 + 0.2j), twist=n - 1)
    dx = exp_differential(x, n, 1)
    ddx = exp_differential(dx, n, 2)
    assert ddx.is_zero()
    y = FormalSum.tensor(unit(1.3), germ(0.2 - 0.5j), twist=n - 2)
    assert exp_differential(exp_differential(y, n, 2), n, 3).is_zero()


def test_lie_differential_squares_to_zero():
    n = 3
    x = FormalSum.wedge(germ(0.7 + 0.2j), germ(-0.3j), twist=n - 2)
    assert lie_exp_differential(lie_exp_differential(x, n, 2), n, 3).is_zero()


def test_degree_mismatch_is_rejected():
    with pytest.raises(ShapeError):
        exp_differential(FormalSum.tensor(germ(1), germ(2), twist=0), 3, 2)


def test_star_product_of_2pii_factors():
    u = FormalSum.wedge(two_pi_i(), germ(0.3 + 0.1j))
    v = FormalSum.wedge(two_pi_i(), germ(-0.2 + 0.4j))
    w = star_product(u, v)
    assert w.arity == 3


def test_json_round_trip():
    s = FormalSum.wedge(two_pi_i(), germ(0.3 + 0.1j, "a"), unit(2.0, "two"), twist=1)
    back = FormalSum.from_json(json.loads(json.dumps(s.to_json())))
    assert (back - s).is_zero()
    a = Atom.from_json(json.loads(json.dumps(two_pi_i(Fraction(2, 3)).to_json())))
    assert a.q == Fraction(2, 3)


# ---------------------------------------------------------------- forms

FUNCS = [lambda z, w: 2 + z + 0.3 * w * w, lambda z, w: 1.5 - w + 0.2 * z * w,
         lambda z, w: 3 + z * z - 0.5 * w, lambda z, w: 0.7 + 0.1 * z + w]


def _cz(p):
    return complex(p[0], p[1]), complex(p[2], p[3])


@pytest.mark.parametrize("m", [0, 1, 2])
def test_omega_commutes_with_differential_on_wedges(m):
    n = 3
    rng = np.random.default_rng(m)
    p = rng.normal(size=4) * 0.3
    vs = [rng.normal(size=4) for _ in range(m + 1)]

    def fam(t):
        z, w = _cz(t)
        return FormalSum.wedge(*[germ(FUNCS[i](z, w)) for i in range(m + 1)], twist=n - m - 1)

    dfam = lambda t: lie_exp_differential(fam(t), n, m + 1)
    lhs = omega_wedge(dfam, n, m + 1)(p, vs)
    rhs = exterior_derivative(omega_wedge(fam, n, m))(p, vs)
    assert abs(lhs - rhs) < 1e-6 * max(1, abs(rhs))


@pytest.mark.parametrize("m", [0, 1, 2])
def test_omega_on_tensors_commutes_up_to_sign(m):
    n = 3
    rng = np.random.default_rng(10 + m)
    p = rng.normal(size=4) * 0.3
    vs = [rng.normal(size=4) for _ in range(m + 1)]

    def fam(t):
        z, w = _cz(t)
        return FormalSum.tensor(*[unit(FUNCS[i](z, w)) for i in range(m)], germ(FUNCS[3](z, w)), twist=n - m - 1)

    dfam = lambda t: exp_differential(fam(t), n, m + 1)
    lhs = omega_tensor(dfam, n, m + 1)(p, vs)
    rhs = exterior_derivative(omega_tensor(fam, n, m))(p, vs)
    assert abs(lhs - (-1) ** (m + 1) * rhs) < 1e-6 * max(1, abs(rhs))


def test_exterior_derivative_squares_to_zero():
    f = FormSample.function(lambda p: np.sin(p[0]) * p[1] ** 2 + 1j * p[0] * p[1])
    d2 = exterior_derivative(exterior_derivative(f, 1e-3), 1e-3)
    assert abs(d2([0.3, 0.2], [np.array([1.0, 0.5]), np.array([-0.2, 1.0])])) < 1e-5


def test_wedge_of_forms_is_graded_commutative():
    a = FormSample(1, lambda p, vs: vs[0][0] + 2j * vs[0][1])
    b = FormSample(1, lambda p, vs: vs[0][1] - vs[0][0])
    v = [np.array([1.0, 2.0]), np.array([-0.5, 0.7])]
    assert abs(wedge_forms(a, b)(np.zeros(2), v) + wedge_forms(b, a)(np.zeros(2), v)) < 1e-14


def test_top_degree_units_give_dlog():
    fam = lambda t: FormalSum.wedge(unit(complex(t[0], t[1]) + 2), unit(complex(t[2], t[3]) + 3), twist=0)
    p = np.array([0.1, 0.2, -0.3, 0.1])
    vs = [np.array([1.0, 0, 0, 0]), np.array([0, 0, 1.0, 0])]
    want = math.factorial(2) / ((complex(0.1, 0.2) + 2) * (complex(-0.3, 0.1) + 3))
    assert abs(omega_wedge(fam, 2, 2)(p, vs) - want) < 1e-8
