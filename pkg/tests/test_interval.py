import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivo import interval as iv
from ivo.interval import ZERO, Interval, Order

unit = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)


@st.composite
def intervals(draw):
    a, b = draw(unit), draw(unit)
    return Interval(min(a, b), max(a, b))


def test_constructor_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ValueError):
        Interval(0, math.inf)
    with pytest.raises(ValueError):
        Interval(math.nan, 1)


@pytest.mark.parametrize("a, b, want", [
    ((1, 2), (0, 5), (1, 7)),
    ((1, 2), (-1, 3), (0, 5)),
    ((3, 4), (0, 0), (3, 4)),
])
def test_add(a, b, want):
    assert iv.add(Interval(*a), Interval(*b)) == Interval(*want)


@pytest.mark.parametrize("lam, a, want", [(-1, (1, 2), (-2, -1)), (0, (3, 7), (0, 0)), (2, (-1, 3), (-2, 6))])
def test_scale(lam, a, want):
    assert iv.scale(lam, Interval(*a)) == Interval(*want)


def test_gh_diff_examples():
    assert iv.gh_diff(Interval(1, 2), Interval(-1, 3)) == Interval(-1, 2)
    assert iv.gh_diff(Interval(0, 5), Interval(-1, 3)) == Interval(1, 2)
    A = Interval(-0.3, 4.1)
    assert iv.gh_diff(A, A) == ZERO


def test_metric_and_norm_examples():
    assert iv.hausdorff(Interval(1, 2), Interval(0, 5)) == 3
    assert iv.hausdorff(Interval(1, 2), Interval(-1, 3)) == 2 == iv.norm(iv.gh_diff(Interval(1, 2), Interval(-1, 3)))
    assert iv.norm(Interval(-1, 2)) == 2
    assert iv.norm(ZERO) == 0
    assert iv.norm(iv.scale(-3, Interval(1, 2))) == 6


@pytest.mark.parametrize("a, b, want", [
    ((1, 2), (0, 5), Order.INCOMPARABLE),
    ((1, 2), (1, 3), Order.LESS),
    ((1, 2), (-1, 1), Order.GREATER),
    ((1, 2), (1, 2), Order.EQUAL),
])
def test_compare(a, b, want):
    assert iv.compare(Interval(*a), Interval(*b)) is want


def test_non_converse_triples():
    A, B, C = Interval(1, 2), Interval(0, 5), Interval(-1, 3)
    assert iv.preceq(iv.gh_diff(A, C), iv.gh_diff(B, C))
    assert iv.compare(A, B) is Order.INCOMPARABLE
    A, B, C = Interval(0, 0), Interval(0, 3), Interval(1, 2)
    assert iv.nprec(B, iv.add(A, C))
    assert not iv.preceq(A, iv.gh_diff(B, C))


def test_tolerant_compare_treats_small_gaps_as_ties():
    assert iv.compare(Interval(-1, 1e-9), ZERO) is Order.INCOMPARABLE
    assert iv.compare(Interval(-1, 1e-9), ZERO, tol=1e-6) is Order.LESS
    assert iv.equal(Interval(1e-9, 2e-9), ZERO, tol=1e-6)


@given(intervals(), intervals())
def test_gh_diff_defining_property(A, B):
    C = iv.gh_diff(A, B)
    tol = 1e-12 * (1 + iv.norm(A) + iv.norm(B))
    assert min(iv.hausdorff(A, iv.add(B, C)), iv.hausdorff(B, iv.sub(A, C))) <= tol


@given(intervals(), intervals())
def test_hausdorff_is_norm_of_gh_diff(A, B):
    assert iv.hausdorff(A, B) == iv.norm(iv.gh_diff(A, B))


@given(intervals(), intervals(), intervals())
def test_gh_diff_is_one_lipschitz(A, B, C):
    # only the inequality survives; equality fails for general triples
    assert iv.hausdorff(iv.gh_diff(A, B), iv.gh_diff(A, C)) <= iv.hausdorff(B, C) + 1e-12 * (1 + iv.norm(A))


def test_gh_cancellation_equality_fails_for_some_triples():
    A, B, C = Interval(0, 2), Interval(0, 0), Interval(0, 3)
    assert iv.hausdorff(iv.gh_diff(A, B), iv.gh_diff(A, C)) == 2
    assert iv.hausdorff(B, C) == 3


@given(st.floats(min_value=-1e3, max_value=1e3), intervals(), intervals())
def test_gh_cancellation_holds_for_degenerate_minuend(a, B, C):
    A = Interval(a, a)
    lhs = iv.hausdorff(iv.gh_diff(A, B), iv.gh_diff(A, C))
    assert abs(lhs - iv.hausdorff(B, C)) <= 1e-12 * (1 + abs(a) + iv.norm(B) + iv.norm(C))


@given(intervals(), intervals())
def test_exactly_one_order_tag_and_antisymmetry(A, B):
    flip = {Order.LESS: Order.GREATER, Order.GREATER: Order.LESS, Order.EQUAL: Order.EQUAL,
            Order.INCOMPARABLE: Order.INCOMPARABLE}
    assert iv.compare(B, A) is flip[iv.compare(A, B)]
    assert iv.preceq(A, B) == (iv.prec(A, B) or iv.equal(A, B))


@given(intervals(), intervals(), intervals())
def test_less_is_transitive(A, B, C):
    if iv.prec(A, B) and iv.prec(B, C):
        assert iv.prec(A, C)


@given(intervals(), intervals())
def test_order_through_gh_diff(A, B):
    assert iv.preceq(A, B) == iv.preceq(iv.gh_diff(A, B), ZERO)
    assert iv.nprec(A, B) == iv.nprec(iv.gh_diff(A, B), ZERO)


@settings(max_examples=200)
@given(st.floats(min_value=-5, max_value=5), intervals())
def test_scale_homogeneity_of_norm(lam, A):
    assert abs(iv.norm(iv.scale(lam, A)) - abs(lam) * iv.norm(A)) <= 1e-12 * (1 + iv.norm(A))


def test_random_interval_sorted(rng):
    for _ in range(100):
        A = iv.random_interval(rng, -2, 3)
        assert -2 <= A.lo <= A.hi <= 3


def test_serialization_round_trip():
    A = Interval(-1.5, 2.25)
    assert A.to_list() == [-1.5, 2.25]
    assert Interval.from_list(A.to_list()) == A
