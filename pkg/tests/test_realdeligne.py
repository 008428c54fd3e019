from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from expcomplex import realdeligne as rd
from expcomplex.acceptance import basic_identity_symbolic
from expcomplex.realdeligne import (LieCochain, TWO_PI_I_FN, basic_identity_residual, chain_square_residual,
                                    delta, homotopy_check, homotopy_residual, phi, phi_family, pi_n_project,
                                    primitive_residual, r_tilde, random_cochain, random_corpus_function, s)
from expcomplex.wedge import FormalSum, ShapeError, germ

FD = 1e-6
seeds = st.integers(0, 10**6)


def _sample(k, dim, rng):
    return rd._rand_point(dim, rng), rd._rand_vectors(k, dim, rng)


def test_projection_by_parity():
    assert pi_n_project(1 + 2j, 3) == 1
    assert pi_n_project(1 + 2j, 2) == 2j


@given(seeds, st.integers(1, 3))
def test_r_tilde_is_a_primitive(seed, k):
    rng = random.Random(seed)
    fs = [random_corpus_function(3, rng) for _ in range(k)]
    p, vs = _sample(k, 3, rng)
    assert primitive_residual(fs, p, vs) < FD


@pytest.mark.parametrize("k", [2, 3])
def test_r_tilde_vanishes_with_a_constant_slot(k):
    rng = random.Random(k)
    fs = [TWO_PI_I_FN] + [random_corpus_function(3, rng) for _ in range(k - 1)]
    p, vs = _sample(k - 1, 3, rng)
    assert abs(r_tilde(fs).fn(p, vs)) < 1e-12


@given(seeds, st.integers(2, 4))
def test_basic_identity(seed, k):
    rng = random.Random(seed)
    fs = [random_corpus_function(k, rng) for _ in range(k)]
    p, vs = _sample(k - 1, k, rng)
    assert basic_identity_residual(fs, p, vs) < FD


def test_basic_identity_symbolic():
    rng = random.Random(0)
    assert all(basic_identity_symbolic(rng) for _ in range(3))


@pytest.mark.parametrize("n,arity", [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)])
def test_phi_is_a_chain_map(n, arity):
    rng = random.Random(10 * n + arity)
    x = random_cochain(n, arity, n, rng)
    p, vs = _sample(arity, n, rng)
    assert chain_square_residual(x, p, vs) < FD


@pytest.mark.parametrize("n", [2, 3, 4])
def test_homotopy_per_arity(n):
    rng = random.Random(n)
    for arity in range(2, n + 1):
        for _ in range(5):
            x = random_cochain(n, arity, n, rng)
            p, vs = _sample(arity - 1, n, rng)
            assert homotopy_residual(x, p, vs) < 10 * FD


def test_homotopy_on_the_bottom_degree():
    # s vanishes in arity one, so s(delta x) alone must reproduce phi(x)
    rng = random.Random(3)
    x = random_cochain(3, 1, 3, rng)
    p, vs = _sample(0, 3, rng)
    assert abs(s(delta(x)).fn(p, vs) - phi(x).fn(p, vs)) < FD
    with pytest.raises(ShapeError):
        s(x)


def test_homotopy_check_small():
    assert homotopy_check(2, samples=10) < 10 * FD


def test_cochain_shape_validation():
    f = TWO_PI_I_FN
    with pytest.raises(ShapeError):
        LieCochain(2, 3, [])
    with pytest.raises(ShapeError):
        LieCochain(2, 2, [(1, [f])])
    with pytest.raises(ShapeError):
        delta(delta(LieCochain(2, 2, [(1, [f, f])])))


def test_phi_agrees_on_parametrized_families():
    rng = random.Random(5)
    f1, f2 = random_corpus_function(3, rng), random_corpus_function(3, rng)
    x = LieCochain(3, 2, [(1, [f1, f2])])

    def family(p):
        return FormalSum.build("wedge", 1, [(1, [germ(f1(p)), germ(f2(p))])])

    p, vs = _sample(1, 3, rng)
    assert abs(phi_family(family, 3, 1).fn(p, vs) - phi(x).fn(p, np.array(vs))) < FD
