from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from expcomplex.chern2 import (Nerve, RECOGNITION_TOL, RecognitionError, SectionData, assemble_class, random_section_data,
                               rebranch_coboundary_check, recognize_rational, sorted_section_data)

TOL = 1e-9


def _cocycle_ok(c) -> bool:
    return all(v < (RECOGNITION_TOL if k == "c5_recognition" else TOL) for k, v in c.residuals.items())


def test_nerve_of_a_simplex_boundary():
    nerve = Nerve.simplex_boundary(4)
    assert nerve.charts == [0, 1, 2, 3, 4]
    assert len(nerve.of_size(4)) == 5 and not nerve.of_size(5)
    assert len(Nerve.full_simplex(4).of_size(5)) == 1


@given(st.integers(0, 10**6))
def test_boundary_of_four_simplex_cocycle(seed):
    c = assemble_class(Nerve.simplex_boundary(4), random_section_data(5, random.Random(seed)))
    assert _cocycle_ok(c), c.residuals
    assert c.residuals["eqtme_exact"] == 0


@pytest.mark.parametrize("seed", range(3))
def test_top_component_is_rational(seed):
    c = assemble_class(Nerve.simplex_boundary(5), random_section_data(6, random.Random(seed)))
    assert _cocycle_ok(c), c.residuals
    assert all(q.denominator <= 12 for q, _, _ in c.c5_tilde.values())


def test_sorted_sections_give_zero_top_component():
    c = assemble_class(Nerve.simplex_boundary(5), sorted_section_data([0, 1, 2, 4, 7, 11]))
    assert all(q == 0 for q, _, _ in c.c5_tilde.values())
    assert all(0 < c.c4[q].r.real < 1 for q in c.c4)


def test_full_simplex_cocycle():
    c = assemble_class(Nerve.full_simplex(5), random_section_data(6, random.Random(7)))
    assert _cocycle_ok(c), c.residuals


def test_rebranching_changes_by_a_coboundary():
    nerve = Nerve.simplex_boundary(5)
    data = random_section_data(6, random.Random(4))
    shifts = {((0, 1, 2), (0, 1)): 1, ((1, 3, 4), (3, 4)): -2, ((0, 2, 5), (2, 5)): 3}
    r = rebranch_coboundary_check(nerve, data, shifts)
    assert r["c4"] < TOL and r["c5"] == 0


def test_complex_data_satisfying_plucker():
    rng = random.Random(2)
    vs = {i: (complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))
          for i in range(5)}
    c = assemble_class(Nerve.simplex_boundary(4), SectionData.from_vectors(vs))
    assert _cocycle_ok(c), c.residuals


def test_section_data_json_round_trip():
    data = random_section_data(5, random.Random(1))
    assert SectionData.from_json(data.to_json()).deltas == data.deltas


def test_report_is_json_ready():
    c = assemble_class(Nerve.simplex_boundary(5), sorted_section_data([0, 1, 2, 3, 5, 8]))
    rep = c.report()
    assert rep["max_denominator"] == 1 and rep["cocycle_residual"] < TOL
    assert '"audit"' in c.dumps()


def test_recognize_rational():
    q, r = recognize_rational(complex(5 / 6, 1e-13))
    assert q == Fraction(5, 6) and r < 1e-12


def test_recognition_rejects_far_values():
    with pytest.raises(RecognitionError):
        recognize_rational(complex(0.5, 1e-3))
