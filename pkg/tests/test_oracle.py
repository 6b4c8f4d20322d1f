"""The packet-level referee: scalar evaluation, sampling, grid comparison."""

from __future__ import annotations

import random
from itertools import islice

import pytest
from hypothesis import given, strategies as st

from policytree.dtree import build_tree, evaluate_tree
from policytree.model import Rule, RuleSet, SchemaError
from policytree.oracle import (
    Semantics,
    check_reliability,
    endpoint_space,
    equivalence,
    evaluate,
    evaluate_rule,
    matches,
)
from policytree.rdt import ConflictPolicy, build_rdt
from policytree.ruleio import parse_point
from policytree.values import ANY, intervals

from _corpus import interval_schema, random_ruleset

SCHEMA1 = interval_schema(1, (40,))


def _rs1(*rows: tuple[tuple[tuple[int, int], ...] | None, str]) -> RuleSet:
    rules = tuple(
        Rule(i, {"f0": ANY if spans is None else intervals(spans)}, action)
        for i, (spans, action) in enumerate(rows, start=1)
    )
    return RuleSet(schema=SCHEMA1, rules=rules, component_name="T1")


def _fw_packet(fw, proto="TCP", src="140.192.10.30", dst="129.170.20.40"):
    a = {x.name: x for x in fw.schema.condition_attributes}
    return {
        "protocol": proto,
        "src_addr": parse_point(src, a["src_addr"]),
        "src_port": 1234,
        "dst_addr": parse_point(dst, a["dst_addr"]),
        "dst_port": 80,
    }


# ---------------------------------------------------------------------------
# scalar evaluation
# ---------------------------------------------------------------------------


def test_matches_checks_every_field(fw):
    pkt = _fw_packet(fw)
    assert all(matches(pkt, r, fw.schema) for r in fw.rules)
    assert not matches(_fw_packet(fw, proto="ICMP"), fw.rules[0], fw.schema)
    with pytest.raises(SchemaError, match="missing 'dst_port'"):
        pkt2 = dict(pkt)
        del pkt2["dst_port"]
        matches(pkt2, fw.rules[0], fw.schema)


def test_the_two_semantics_disagree_inside_the_exception(fw):
    pkt = _fw_packet(fw)  # inside rules 1-4; rule 2 is the most specific
    assert evaluate(fw, pkt, Semantics.FIRST_MATCH) == "deny"
    assert evaluate(fw, pkt, Semantics.OWNER_CAPTURE) == "accept"
    assert evaluate_rule(fw, pkt, Semantics.FIRST_MATCH).id == 1
    assert evaluate_rule(fw, pkt, Semantics.OWNER_CAPTURE).id == 2


def test_unmatched_packet_returns_none(fw):
    pkt = _fw_packet(fw, proto="ICMP")
    for sem in Semantics:
        assert evaluate_rule(fw, pkt, sem) is None
        assert evaluate(fw, pkt, sem) is None


def test_capture_chains_through_nested_rules():
    rs = _rs1((((0, 20),), "accept"), (((5, 15),), "deny"), (((7, 9),), "accept"))
    assert evaluate(rs, {"f0": 8}, Semantics.OWNER_CAPTURE) == "accept"  # r3 over r2
    assert evaluate(rs, {"f0": 6}, Semantics.OWNER_CAPTURE) == "deny"  # r2 over r1
    assert evaluate(rs, {"f0": 2}, Semantics.OWNER_CAPTURE) == "accept"  # r1 alone
    assert evaluate(rs, {"f0": 8}, Semantics.FIRST_MATCH) == "accept"  # still r1


def test_partial_overlap_never_captures():
    rs = _rs1((((0, 10),), "accept"), (((5, 15),), "deny"))
    assert evaluate(rs, {"f0": 7}, Semantics.OWNER_CAPTURE) == "accept"  # r1 keeps it
    assert evaluate(rs, {"f0": 12}, Semantics.OWNER_CAPTURE) == "deny"  # r2's own part


# ---------------------------------------------------------------------------
# domain sampling
# ---------------------------------------------------------------------------


def test_endpoint_space_brackets_every_rule_boundary():
    rs = _rs1((((5, 10),), "accept"))
    pts = endpoint_space(rs).points["f0"]
    assert set(pts) >= {0, 4, 5, 6, 9, 10, 11, 39}
    assert list(pts) == sorted(set(pts))
    assert all(0 <= p <= 39 for p in pts)
    # interior probes land between consecutive kept points
    assert any(11 < p < 39 for p in pts)


def test_endpoint_space_enumerates_label_domains(fw):
    space = endpoint_space(fw)
    assert space.points["protocol"] == ("ICMP", "TCP", "UDP")
    assert space.size() == len(list(islice(space.iter_packets(), space.size() + 1)))


def test_endpoint_space_input_checks(fw, ids):
    with pytest.raises(ValueError, match="at least one"):
        endpoint_space()
    with pytest.raises(SchemaError, match="shared schema"):
        endpoint_space(fw, ids)


# ---------------------------------------------------------------------------
# coverage and equivalence over the grid
# ---------------------------------------------------------------------------


def test_uncovered_packets_are_reported(fw):
    space = endpoint_space(fw)
    holes = check_reliability(fw, space)
    assert holes  # ICMP and UDP traffic has no rule at all
    for pkt in holes[:5]:
        assert evaluate(fw, pkt, Semantics.FIRST_MATCH) is None
    # the corrected tree covers exactly the same ground
    assert check_reliability(build_rdt(fw).tree, space) == holes


def test_full_domain_rule_leaves_no_holes():
    rs = _rs1((None, "accept"))
    assert check_reliability(rs, endpoint_space(rs)) == []


def test_equivalence_agrees_per_semantics(fw):
    space = endpoint_space(fw)
    corrected = build_rdt(fw).tree
    first = build_rdt(fw, ConflictPolicy.FIRST_MATCH).tree
    assert equivalence(corrected, fw, Semantics.OWNER_CAPTURE, space) == []
    assert equivalence(first, fw, Semantics.FIRST_MATCH, space) == []

    crossed = equivalence(corrected, fw, Semantics.FIRST_MATCH, space)
    assert crossed
    pkt, by_tree, by_rules = crossed[0]
    assert {by_tree, by_rules} == {"accept", "deny"}
    assert evaluate(fw, pkt, Semantics.FIRST_MATCH) == by_rules


def test_equivalence_requires_one_schema(fw, ids):
    with pytest.raises(SchemaError, match="share a schema"):
        equivalence(build_rdt(fw).tree, ids, Semantics.FIRST_MATCH, endpoint_space(fw))


def test_no_decision_counts_as_agreement():
    rs = _rs1((((5, 10),), "accept"))
    space = endpoint_space(rs)
    assert equivalence(build_rdt(rs).tree, rs, Semantics.OWNER_CAPTURE, space) == []


# ---------------------------------------------------------------------------
# scalar and grid referee agree with the trees
# ---------------------------------------------------------------------------


@given(st.integers(0, 10_000))
def test_scalar_referee_matches_the_trees(seed):
    rs = random_ruleset(random.Random(seed), max_rules=8, n_attrs=2)
    space = endpoint_space(rs)
    corrected = build_rdt(rs).tree
    first = build_rdt(rs, ConflictPolicy.FIRST_MATCH).tree
    naive = build_tree(rs)
    for pkt in islice(space.iter_packets(), 120):
        assert evaluate_tree(corrected, pkt) == evaluate(rs, pkt, Semantics.OWNER_CAPTURE)
        assert evaluate_tree(first, pkt) == evaluate(rs, pkt, Semantics.FIRST_MATCH)
        assert evaluate_tree(naive, pkt) == evaluate(rs, pkt, Semantics.FIRST_MATCH)
