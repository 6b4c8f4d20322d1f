"""The interval/label algebra, checked point-wise against Python sets."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from policytree.values import (
    ANY,
    EMPTY_INTERVALS,
    EMPTY_LABELS,
    ValueSet,
    ValueSetError,
    contains_point,
    enumerate_points,
    interval_endpoints,
    intervals,
    labels,
    point,
    vs_difference,
    vs_disjoint,
    vs_equal,
    vs_intersect,
    vs_is_empty,
    vs_proper_subset,
    vs_subset,
    vs_union,
)

DOM = intervals(((0, 30),))
LDOM = labels("a", "b", "c", "d")


def pts(v: ValueSet) -> set:
    return set(enumerate_points(v, DOM))


span = st.tuples(st.integers(0, 30), st.integers(0, 30)).map(
    lambda p: (min(p), max(p))
)
ivals = st.lists(span, max_size=3).map(lambda ps: intervals(tuple(ps)))
operand = st.one_of(st.just(ANY), ivals)


def assert_canonical(v: ValueSet) -> None:
    if v.is_wildcard:
        return
    prev_hi = None
    for lo, hi in v.intervals:
        assert lo <= hi
        if prev_hi is not None:
            assert lo > prev_hi + 1, "adjacent intervals must coalesce"
        prev_hi = hi
    assert pts(v) != pts(ANY), "full-domain results must compress to the wildcard"


@given(operand, operand)
def test_intersection_matches_set_semantics(a, b):
    out = vs_intersect(a, b, DOM)
    assert pts(out) == pts(a) & pts(b)
    assert_canonical(out)


@given(operand, operand)
def test_union_matches_set_semantics(a, b):
    out = vs_union(a, b, DOM)
    assert pts(out) == pts(a) | pts(b)
    assert_canonical(out)


@given(operand, operand)
def test_difference_matches_set_semantics(a, b):
    out = vs_difference(a, b, DOM)
    assert pts(out) == pts(a) - pts(b)
    assert_canonical(out)


@given(operand, operand)
def test_relations_match_set_semantics(a, b):
    assert vs_equal(a, b, DOM) == (pts(a) == pts(b))
    assert vs_subset(a, b, DOM) == (pts(a) <= pts(b))
    assert vs_proper_subset(a, b, DOM) == (pts(a) < pts(b))
    assert vs_disjoint(a, b, DOM) == pts(a).isdisjoint(pts(b))


@given(operand)
def test_difference_from_wildcard_complements(v):
    assert pts(vs_difference(ANY, v, DOM)) == pts(ANY) - pts(v)


@given(st.integers(0, 30), operand)
def test_contains_point_matches_enumeration(x, v):
    assert contains_point(v, x, DOM) == (x in pts(v))


def test_wildcard_vs_explicit_domain():
    assert vs_equal(ANY, DOM, DOM)
    assert vs_union(intervals(((0, 10),)), intervals(((11, 30),)), DOM) == ANY
    assert vs_intersect(ANY, ANY, DOM) == ANY


def test_empty_is_not_wildcard():
    assert vs_is_empty(EMPTY_INTERVALS)
    assert vs_is_empty(EMPTY_LABELS)
    assert not vs_is_empty(ANY)
    assert EMPTY_INTERVALS != ANY
    assert vs_is_empty(vs_intersect(intervals(((0, 4),)), intervals(((6, 9),)), DOM))


def test_canonical_construction():
    assert intervals(((10, 15), (7, 9))) == intervals(((7, 15),))
    assert intervals(((3, 5), (5, 8))) == intervals(((3, 8),))
    assert intervals(((9, 2),)) == EMPTY_INTERVALS  # inverted pairs drop out
    assert point(7) == intervals(((7, 7),))


def test_label_algebra():
    ab, bc = labels("a", "b"), labels("b", "c")
    assert vs_intersect(ab, bc, LDOM) == labels("b")
    assert vs_union(ab, bc, LDOM) == labels("a", "b", "c")
    assert vs_difference(ab, bc, LDOM) == labels("a")
    assert vs_difference(ANY, labels("a"), LDOM) == labels("b", "c", "d")
    assert vs_union(labels("a", "b"), labels("c", "d"), LDOM) == ANY
    assert vs_subset(labels("a"), ab, LDOM)
    assert not vs_subset(ab, labels("a"), LDOM)


def test_shape_mismatch_raises():
    with pytest.raises(ValueSetError):
        vs_intersect(labels("a"), intervals(((0, 1),)), DOM)
    with pytest.raises(ValueSetError):
        ValueSet(labels=frozenset({"a"}), intervals=((0, 1),))


def test_wildcard_domain_rejected():
    with pytest.raises(ValueSetError):
        vs_union(ANY, ANY, ANY)


def test_string_point_in_interval_set_raises():
    with pytest.raises(ValueSetError):
        contains_point(intervals(((0, 5),)), "TCP", DOM)


def test_interval_endpoints():
    assert interval_endpoints(intervals(((3, 5), (9, 9)))) == [3, 5, 9, 9]
    assert interval_endpoints(ANY) == []
    assert interval_endpoints(labels("a")) == []
