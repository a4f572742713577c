"""Tests for index and grading arithmetic."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hmrkit.errors import NotDivisibleBy8, OddPairing
from hmrkit.index_grading import (
    GradingSetInfo,
    TopologicalData4,
    closed4_index,
    j_structure,
    loop_grading_shift,
)


def test_index_zero_input():
    assert closed4_index(TopologicalData4(0, 0, 0, 0, 0)) == 0


def test_index_direct_substitution():
    assert closed4_index(TopologicalData4(8, 0, 1, 1, 0)) == 1


def test_index_product_with_circle_shape():
    # for S^1 x Y data the b0 part vanishes and b1 cancels b+, leaving
    # only the characteristic-number term: index = pairing / 2
    for pairing in (0, 2, 4, -6):
        d = TopologicalData4(4 * pairing, 0, 3, 3, 0)
        assert closed4_index(d) == loop_grading_shift(pairing)


def test_index_divisibility_error():
    with pytest.raises(NotDivisibleBy8):
        closed4_index(TopologicalData4(1, 0, 0, 0, 0))


@given(st.integers(-20, 20), st.integers(-20, 20),
       st.integers(0, 5), st.integers(0, 5), st.integers(0, 5),
       st.integers(-20, 20), st.integers(-20, 20),
       st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_index_additive_disjoint_union(c1a, sa, b1a, bpa, b0a,
                                       c1b, sb, b1b, bpb, b0b):
    c1a = 8 * c1a + sa  # force divisibility
    c1b = 8 * c1b + sb
    da = TopologicalData4(c1a, sa, b1a, bpa, b0a)
    db = TopologicalData4(c1b, sb, b1b, bpb, b0b)
    dsum = TopologicalData4(c1a + c1b, sa + sb, b1a + b1b,
                            bpa + bpb, b0a + b0b)
    assert closed4_index(dsum) == closed4_index(da) + closed4_index(db)


def test_loop_shift_basic():
    assert loop_grading_shift(0) == 0
    assert loop_grading_shift(4) == 2
    assert loop_grading_shift(-6) == -3


def test_loop_shift_odd_rejected():
    with pytest.raises(OddPairing):
        loop_grading_shift(3)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_loop_shift_additive(a, b):
    assert loop_grading_shift(2 * a + 2 * b) == \
        loop_grading_shift(2 * a) + loop_grading_shift(2 * b)


def test_j_free_cases():
    assert j_structure([]) == GradingSetInfo(True, 0)
    assert j_structure([0, 0]) == GradingSetInfo(True, 0)


def test_j_single_generator():
    assert j_structure([4]) == GradingSetInfo(False, 2)


def test_j_gcd():
    assert j_structure([6, 4]) == GradingSetInfo(False, 1)


def test_j_odd_pairing_rejected():
    with pytest.raises(OddPairing):
        j_structure([2, 3])


@given(st.lists(st.integers(-20, 20).map(lambda x: 2 * x), max_size=6),
       st.integers(0, 5))
def test_j_invariant_under_permutation_and_sign(pairings, seed):
    import random

    shuffled = pairings[:]
    random.Random(seed).shuffle(shuffled)
    flipped = [-x if i % 2 else x for i, x in enumerate(shuffled)]
    assert j_structure(pairings) == j_structure(flipped)
