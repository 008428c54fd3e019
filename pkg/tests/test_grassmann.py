from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from expcomplex.grassmann import (Chain, Configuration, DecoratedFlagTuple, GenericityError, HypersimplexID,
                                  bigrassmannian_differential, bloch_chain_check, boundary, c_m,
                                  chain_map_residual, conic_parameters, det, facet_pairing_check,
                                  forget_differential, hypersimplex_count, hypersimplex_vertices,
                                  hypersimplicial_decomposition, l1_point, pi_a, plucker_check,
                                  project_differential, random_configuration, random_flag_tuple, rank,
                                  solve)
from expcomplex.bloch import cross_ratio

seeds = st.integers(min_value=0, max_value=10**6)


# ---------------------------------------------------------------- linear algebra

def test_exact_linear_algebra():
    cols = [(Fraction(2), Fraction(1)), (Fraction(1), Fraction(3))]
    assert det(cols) == 5
    assert rank(cols + [(Fraction(1), Fraction(1))]) == 2
    x = solve(cols, (Fraction(3), Fraction(4)))
    assert [sum(x[j] * cols[j][i] for j in range(2)) for i in range(2)] == [3, 4]


def test_nongeneric_configuration_is_rejected():
    with pytest.raises(GenericityError):
        Configuration.of([(1, 0), (2, 0), (0, 1)])


@given(seeds)
def test_canonical_form_is_an_orbit_invariant(seed):
    rng = random.Random(seed)
    c = random_configuration(5, 3, rng)
    g = [[Fraction(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
    while det(g) == 0:
        g = [[Fraction(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
    moved = Configuration.of([tuple(sum(g[i][j] * v[j] for j in range(3)) for i in range(3))
                              for v in c.vectors])
    assert moved.same_orbit(c)
    # rescaling a single vector leaves the orbit
    first = tuple(2 * x for x in moved.vectors[-1])
    assert not Configuration.of(list(moved.vectors[:-1]) + [first]).same_orbit(c)


def test_configuration_json_round_trip():
    c = random_configuration(4, 2, random.Random(3))
    assert Configuration.from_json(c.to_json()) == c


# ---------------------------------------------------------------- bicomplex

@given(seeds)
def test_forget_and_project_anticommute(seed):
    rng = random.Random(seed)
    x = Chain.single(random_configuration(rng.randint(4, 6), 3, rng))
    fp = forget_differential(project_differential(x))
    pf = project_differential(forget_differential(x))
    assert (fp + pf).is_zero()


@pytest.mark.parametrize("sign", [1, -1])
def test_total_differential_squares_to_zero(sign):
    rng = random.Random(11)
    for _ in range(8):
        m = rng.randint(3, 6)
        x = Chain.single(random_configuration(m, rng.randint(1, m - 1), rng))
        assert bigrassmannian_differential(bigrassmannian_differential(x, sign), sign).is_zero()


# ---------------------------------------------------------------- hypersimplices

@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("N", range(1, 6))
def test_hypersimplex_counts(m, N):
    dec = hypersimplicial_decomposition(m, N)
    for q in range(m):
        got = sum(1 for h in dec if h.q == q)
        assert got == hypersimplex_count(m, N, q) == (math.comb(m + N - q - 1, m) if N > q else 0)


def test_octahedron_boundary():
    h = HypersimplexID(1, 1, (0, 0, 0, 0))
    assert len(hypersimplex_vertices(h)) == 6
    b, c = boundary(h)
    assert len(b) == 4 and len(c) == 4
    assert all(len(face) == 3 for _, face, _ in b + c)


@pytest.mark.parametrize("m", range(1, 5))
@pytest.mark.parametrize("N", range(1, 6))
def test_interior_facets_pair_up(m, N):
    assert facet_pairing_check(m, N)


def test_hypersimplices_tile_the_dilated_simplex():
    # vertex multiset of the N = 2 decomposition of the 2-simplex covers all lattice points
    pts = set()
    for h in hypersimplicial_decomposition(2, 2):
        pts |= hypersimplex_vertices(h)
    assert pts == {v for v in ((a, b, 2 - a - b) for a in range(3) for b in range(3 - a))}


# ---------------------------------------------------------------- decorated flags

@pytest.mark.parametrize("N", range(1, 5))
@pytest.mark.parametrize("m", range(1, 5))
def test_decorated_flags_give_a_chain_map(m, N):
    flags = random_flag_tuple(m + 1, N, random.Random(100 * m + N))
    assert chain_map_residual(flags).is_zero()


def test_twisted_sign_breaks_the_chain_map():
    rng = random.Random(5)
    bad = sum(not chain_map_residual(random_flag_tuple(m + 1, N, rng), p_sign=1).is_zero()
              for N in range(2, 5) for m in range(2, 5))
    assert bad > 0


def test_pi_a_does_not_depend_on_the_complement():
    rng = random.Random(9)
    flags = random_flag_tuple(3, 4, rng)
    a = (1, 0, 1)
    default = pi_a(flags, a)
    for _ in range(5):
        comp = [tuple(Fraction(rng.randint(-4, 4)) for _ in range(4)) for _ in range(2)]
        try:
            other = pi_a(flags, a, comp)
        except GenericityError:
            continue
        assert other.same_orbit(default)


def test_flag_json_round_trip():
    flags = random_flag_tuple(3, 3, random.Random(2))
    assert DecoratedFlagTuple.from_json(flags.to_json()) == flags


def test_c_m_lands_in_the_right_bidegrees():
    flags = random_flag_tuple(3, 3, random.Random(4))
    assert all(m == 3 for m, _ in c_m(flags).bidegrees())


# ---------------------------------------------------------------- weight two

@given(seeds)
def test_plucker_relation(seed):
    assert plucker_check(random_configuration(4, 2, random.Random(seed)))


def test_literal_plucker_sign_fails():
    rng = random.Random(8)
    assert not any(plucker_check(random_configuration(4, 2, rng), sign=1) for _ in range(10))


def test_l1_is_the_cross_ratio():
    c = random_configuration(4, 2, random.Random(6))
    assert l1_point(c) == cross_ratio(*c.vectors)


def test_conic_parameters_preserve_cross_ratios():
    c = random_configuration(5, 3, random.Random(12))
    t = conic_parameters(c)
    assert t.size == 5 and t.dim == 2


@pytest.mark.parametrize("m,q", [(4, 2), (4, 3), (5, 2), (5, 3), (5, 4)])
def test_bloch_projection_is_a_chain_map(m, q):
    rng = random.Random(m * 10 + q)
    for _ in range(3):
        r = bloch_chain_check(Chain.single(random_configuration(m, q, rng)))
        assert all(r.values()), r
