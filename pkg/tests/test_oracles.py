import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compjac.oracles import (
    catalan_count,
    closed_hilbert_series,
    dyck_poly,
    elementary_symmetric,
    fixed_point_coordinates,
    localization_betti,
    localization_hilbert,
    row_bounds,
)

from .pairs import COPRIME_UP_TO_13


def test_catalan_small_values():
    assert catalan_count(2, 3) == 2
    assert catalan_count(3, 4) == 5
    assert catalan_count(4, 7) == 30


def test_catalan_rejects_common_factor():
    with pytest.raises(ValueError):
        catalan_count(2, 4)


def test_dyck_poly_hand_counts():
    # (2,3): the empty diagram and one box
    assert dyck_poly(2, 3) == [1, 1]
    # (3,4): rows at most 2 and 1 give the empty diagram, (1), (2), (1,1), (2,1)
    assert row_bounds(3, 4) == [2, 1, 0]
    assert dyck_poly(3, 4) == [1, 1, 2, 1]


@pytest.mark.parametrize("p,q", COPRIME_UP_TO_13)
def test_dyck_total_is_catalan(p, q):
    assert sum(dyck_poly(p, q)) == catalan_count(p, q)


def test_closed_hilbert_series_small():
    assert closed_hilbert_series(2, 3) == [1, 0, 1]
    assert closed_hilbert_series(3, 4) == [1, 0, 1, 1, 1, 0, 1]


@pytest.mark.parametrize("p,q", COPRIME_UP_TO_13)
def test_closed_series_sums_to_catalan_and_is_symmetric(p, q):
    h = closed_hilbert_series(p, q)
    assert sum(h) == catalan_count(p, q)
    assert h == h[::-1]
    assert len(h) == (p - 1) * (q - 1) + 1


def test_elementary_symmetric():
    assert elementary_symmetric([1, 2, 3]) == [1, 6, 11, 6]


def test_fixed_points_are_distinct():
    for p, q in [(2, 3), (3, 4), (3, 5)]:
        pts = fixed_point_coordinates(p, q)
        assert len(set(pts)) == len(pts) == catalan_count(p, q)
        # e_1 is the sum of the p-basis over p, pinned by the balance condition
        assert {pt[0] for pt in pts} == {Fraction(q * (p - 1), 2)}


@pytest.mark.parametrize("p,q", [(2, 3), (3, 4), (2, 5), (3, 5), (4, 5)])
def test_localization_agrees_with_closed_forms(p, q):
    assert localization_betti(p, q) == dyck_poly(p, q) + [0] * ((p - 1) * (q - 1) // 2 + 1 - len(dyck_poly(p, q)))
    assert localization_hilbert(p, q) == closed_hilbert_series(p, q)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(2, 9))
def test_dyck_coefficients_nonnegative_and_sum(p, q):
    if math.gcd(p, q) != 1:
        return
    d = dyck_poly(p, q)
    assert d[0] == 1 and all(c >= 0 for c in d)
    assert sum(d) == catalan_count(p, q)
