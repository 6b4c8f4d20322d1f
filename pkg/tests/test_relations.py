"""Pairwise rule relations: the six-way classification and its symmetries."""

import itertools
import random

from hypothesis import given
from hypothesis import strategies as st

from _corpus import interval_schema, random_ruleset
from policytree.model import Rule
from policytree.relations import FieldRel, RelationKind, field_relation, is_correlated, relate
from policytree.values import ANY, enumerate_points, intervals

SCHEMA = interval_schema(2)  # f0 in 0..39, f1 in 0..14
F0 = SCHEMA.attribute("f0")
F1 = SCHEMA.attribute("f1")


def rule(f0, f1, action="accept", rid=1):
    return Rule(rid, {"f0": f0, "f1": f1}, action)


def box(r):
    return set(
        itertools.product(
            enumerate_points(r.condition["f0"], F0.domain),
            enumerate_points(r.condition["f1"], F1.domain),
        )
    )


def test_field_relation_cases():
    assert field_relation(intervals(((0, 5),)), intervals(((0, 5),)), F0) is FieldRel.EQUAL
    assert field_relation(intervals(((1, 4),)), intervals(((0, 5),)), F0) is FieldRel.PROPER_SUBSET
    assert field_relation(intervals(((0, 5),)), intervals(((1, 4),)), F0) is FieldRel.PROPER_SUPERSET
    assert field_relation(intervals(((0, 5),)), intervals(((4, 9),)), F0) is FieldRel.OVERLAPPING
    assert field_relation(intervals(((0, 5),)), intervals(((7, 9),)), F0) is FieldRel.DISJOINT
    assert field_relation(ANY, F0.domain, F0) is FieldRel.EQUAL


def test_kind_examples():
    a = rule(intervals(((0, 20),)), intervals(((0, 10),)))
    assert relate(a, rule(a.condition["f0"], a.condition["f1"]), SCHEMA).kind is RelationKind.EXACT
    inner = rule(intervals(((5, 10),)), intervals(((0, 10),)))
    assert relate(inner, a, SCHEMA).kind is RelationKind.FORWARD
    assert relate(a, inner, SCHEMA).kind is RelationKind.BACKWARD
    crossed = rule(intervals(((5, 10),)), ANY)
    assert relate(a, crossed, SCHEMA).kind is RelationKind.CORRELATED
    slid = rule(intervals(((10, 30),)), intervals(((5, 12),)))
    assert relate(a, slid, SCHEMA).kind is RelationKind.CORRELATED_GENERAL
    apart = rule(intervals(((30, 39),)), ANY)
    assert relate(a, apart, SCHEMA).kind is RelationKind.DISJOINT


def test_disjoint_wins_over_partial_overlap():
    # one disjoint field makes the rules disjoint no matter the others
    a = rule(intervals(((0, 10),)), intervals(((0, 5),)))
    b = rule(intervals(((0, 10),)), intervals(((7, 9),)))
    assert relate(a, b, SCHEMA).kind is RelationKind.DISJOINT


def test_evidence_names_every_attribute():
    a = rule(ANY, intervals(((0, 5),)))
    b = rule(intervals(((3, 9),)), ANY)
    rel = relate(a, b, SCHEMA)
    assert [e.attribute for e in rel.evidence] == ["f0", "f1"]


def test_is_correlated():
    assert is_correlated(RelationKind.CORRELATED)
    assert is_correlated(RelationKind.CORRELATED_GENERAL)
    assert not is_correlated(RelationKind.FORWARD)
    assert not is_correlated(RelationKind.DISJOINT)


@given(st.integers(0, 10_000))
def test_classification_total_and_symmetric(seed):
    rng = random.Random(seed)
    rs = random_ruleset(rng, max_rules=6, n_attrs=2)
    for a, b in itertools.combinations(rs.rules, 2):
        ab = relate(a, b, rs.schema).kind
        ba = relate(b, a, rs.schema).kind
        assert ab in RelationKind
        if ab is RelationKind.FORWARD:
            assert ba is RelationKind.BACKWARD
        elif ab is RelationKind.BACKWARD:
            assert ba is RelationKind.FORWARD
        else:
            assert ba is ab  # exact, correlated, and disjoint are symmetric


@given(st.integers(0, 10_000))
def test_classification_matches_point_semantics(seed):
    rng = random.Random(seed)
    rs = random_ruleset(rng, max_rules=5, n_attrs=2)
    for a, b in itertools.combinations(rs.rules, 2):
        kind = relate(a, b, rs.schema).kind
        pa, pb = box(a), box(b)
        assert (pa <= pb) == (kind in (RelationKind.EXACT, RelationKind.FORWARD))
        assert (pa >= pb) == (kind in (RelationKind.EXACT, RelationKind.BACKWARD))
        assert pa.isdisjoint(pb) == (kind is RelationKind.DISJOINT)


def test_case_study_relations(fw):
    r1, r2, r3, r4 = fw.rules
    assert relate(r1, r2, fw.schema).kind is RelationKind.BACKWARD
    assert relate(r1, r3, fw.schema).kind is RelationKind.BACKWARD
    assert relate(r1, r4, fw.schema).kind is RelationKind.BACKWARD
    assert relate(r2, r3, fw.schema).kind is RelationKind.FORWARD
    assert relate(r3, r4, fw.schema).kind is RelationKind.CORRELATED
