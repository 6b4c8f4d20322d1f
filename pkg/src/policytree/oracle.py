"""Packet-level referee, independent of the tree construction.

This module answers "what does this rule set do to this packet?" straight
from the ordered rules, under two semantics:

* ``first-match``: the first matching rule wins;
* ``owner-capture``: rule 1 owns whatever it matches; each later rule
  claims the still-unowned part of its region and additionally takes over
  any region whose current owner it fits strictly inside (it is the more
  specific rule).  This is the reference for the specificity construction
  policy, computed here rule-by-rule without any tree involved.

It also discretizes attribute domains down to the points that can possibly
distinguish rules (interval endpoints, their neighbours, one probe per gap,
and full label enumerations) and compares a tree against a rule set over
that space, reporting counterexample packets.  "No decision" is a first
class outcome throughout (``None`` scalar, ``-1`` in grids).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import prod

import numpy as np

from .dtree import DecisionTree, Node, action_label
from .model import AttributeDef, Rule, RuleSet, Schema, SchemaError
from .values import ValueSet, contains_point, interval_endpoints, vs_equal, vs_subset

__all__ = [
    "Packet",
    "Semantics",
    "DomainSpace",
    "endpoint_space",
    "matches",
    "evaluate",
    "evaluate_rule",
    "check_reliability",
    "equivalence",
]

Packet = dict[str, "int | str"]


class Semantics(str, Enum):
    FIRST_MATCH = "first-match"
    OWNER_CAPTURE = "owner-capture"


# ---------------------------------------------------------------------------
# scalar evaluation
# ---------------------------------------------------------------------------


def matches(packet: Packet, rule: Rule, schema: Schema) -> bool:
    """Does the packet satisfy every field constraint of the rule?"""
    for attr in schema.condition_attributes:
        try:
            value = packet[attr.name]
        except KeyError:
            raise SchemaError(f"packet is missing {attr.name!r}") from None
        if not contains_point(rule.condition[attr.name], value, attr.domain):
            return False
    return True


def _strictly_inside(a: Rule, b: Rule, schema: Schema) -> bool:
    """Every field of ``a`` within ``b``'s, at least one properly."""
    strict = False
    for attr in schema.condition_attributes:
        va = a.condition[attr.name]
        vb = b.condition[attr.name]
        if not vs_subset(va, vb, attr.domain):
            return False
        if not vs_equal(va, vb, attr.domain):
            strict = True
    return strict


def evaluate_rule(rs: RuleSet, packet: Packet, semantics: Semantics) -> Rule | None:
    """The rule that decides one packet, or ``None`` for no match."""
    if semantics is Semantics.FIRST_MATCH:
        for rule in rs.rules:
            if matches(packet, rule, rs.schema):
                return rule
        return None
    owner: Rule | None = None
    for rule in rs.rules:
        if matches(packet, rule, rs.schema):
            if owner is None or _strictly_inside(rule, owner, rs.schema):
                owner = rule
    return owner


def evaluate(rs: RuleSet, packet: Packet, semantics: Semantics) -> str | None:
    """The rule set's decision for one packet, or ``None`` for no match."""
    rule = evaluate_rule(rs, packet, semantics)
    return rule.action if rule else None


# ---------------------------------------------------------------------------
# domain discretization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainSpace:
    """A finite sample of the packet space, one point list per attribute."""

    schema: Schema
    points: dict[str, tuple]

    def size(self) -> int:
        return prod(len(p) for p in self.points.values())

    def iter_packets(self):
        names = self.schema.condition_names
        for combo in itertools.product(*(self.points[n] for n in names)):
            yield dict(zip(names, combo))


def _numeric_points(attr: AttributeDef, value_sets: list[ValueSet]) -> tuple[int, ...]:
    dom = attr.domain
    candidates: set[int] = set(interval_endpoints(dom))
    for v in value_sets:
        for e in interval_endpoints(v):
            candidates.update((e - 1, e, e + 1))
    pts = sorted(c for c in candidates if contains_point(dom, c, dom))
    with_gaps = list(pts)
    for a, b in zip(pts, pts[1:]):
        if b - a > 1:
            mid = (a + b) // 2
            if contains_point(dom, mid, dom):
                with_gaps.append(mid)
    return tuple(sorted(with_gaps))


def endpoint_space(*rulesets: RuleSet) -> DomainSpace:
    """Sample points per attribute from every rule in the given sets.

    All rule sets must share one schema.  Label attributes enumerate their
    whole domain; interval attributes keep each endpoint, its neighbours,
    and one interior probe per gap, clamped to the domain.
    """
    if not rulesets:
        raise ValueError("endpoint_space needs at least one rule set")
    schema = rulesets[0].schema
    for rs in rulesets[1:]:
        if rs.schema != schema:
            raise SchemaError("endpoint_space requires a shared schema")
    points: dict[str, tuple] = {}
    for attr in schema.condition_attributes:
        if attr.kind.is_numeric:
            vals = [r.condition[attr.name] for rs in rulesets for r in rs.rules]
            points[attr.name] = _numeric_points(attr, vals)
        else:
            points[attr.name] = tuple(sorted(attr.domain.labels or ()))
    return DomainSpace(schema=schema, points=points)


# ---------------------------------------------------------------------------
# grid evaluation (whole space at once)
# ---------------------------------------------------------------------------


class _Grid:
    def __init__(self, schema: Schema, space: DomainSpace):
        self.schema = schema
        self.names = schema.condition_names
        self.shape = tuple(len(space.points[n]) for n in self.names)
        self.space = space
        self._axis_cache: dict[tuple[str, ValueSet], np.ndarray] = {}
        codes = sorted(schema.decision_attribute.domain.labels or ())
        self.code_of = {label: i for i, label in enumerate(codes)}
        self.label_of = dict(enumerate(codes))

    def axis_mask(self, axis: int, v: ValueSet) -> np.ndarray:
        attr = self.schema.condition_attributes[axis]
        key = (attr.name, v)
        mask = self._axis_cache.get(key)
        if mask is None:
            pts = self.space.points[attr.name]
            mask = np.fromiter(
                (contains_point(v, p, attr.domain) for p in pts), dtype=bool, count=len(pts)
            )
            self._axis_cache[key] = mask
        shape = tuple(self.shape[k] if k == axis else 1 for k in range(len(self.shape)))
        return mask.reshape(shape)

    def rule_mask(self, rule: Rule) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        for axis, name in enumerate(self.names):
            mask = mask & self.axis_mask(axis, rule.condition[name])
        return mask

    def packet_at(self, index: tuple[int, ...]) -> Packet:
        return {
            name: self.space.points[name][i] for name, i in zip(self.names, index)
        }


def _grid_rules(grid: _Grid, rs: RuleSet, semantics: Semantics) -> np.ndarray:
    decisions = np.full(grid.shape, -1, dtype=np.int16)
    if semantics is Semantics.FIRST_MATCH:
        for rule in rs.rules:
            todo = grid.rule_mask(rule) & (decisions == -1)
            decisions[todo] = grid.code_of[rule.action]
        return decisions

    owner = np.full(grid.shape, -1, dtype=np.int16)
    rules = rs.rules
    for idx, rule in enumerate(rules):
        mask = grid.rule_mask(rule)
        capturable = [o for o in range(idx) if _strictly_inside(rule, rules[o], rs.schema)]
        takeover = np.isin(owner, capturable) if capturable else np.zeros(grid.shape, dtype=bool)
        claim = mask & ((owner == -1) | takeover)
        owner[claim] = idx
    action_codes = np.array(
        [-1] + [grid.code_of[r.action] for r in rules], dtype=np.int16
    )
    return action_codes[owner + 1]


def _grid_tree(grid: _Grid, tree: DecisionTree) -> np.ndarray:
    decisions = np.full(grid.shape, -1, dtype=np.int16)
    action_level = tree.action_level

    def walk(node: Node, mask: np.ndarray) -> None:
        if node.level == action_level:
            for e in node.edges:
                todo = mask & (decisions == -1)
                decisions[todo] = grid.code_of[action_label(e)]
            return
        axis = node.level - 1
        for e in node.edges:
            sub = mask & grid.axis_mask(axis, e.label)
            if sub.any():
                walk(e.child, sub)

    walk(tree.root, np.ones(grid.shape, dtype=bool))
    return decisions


def check_reliability(target: "RuleSet | DecisionTree", space: DomainSpace) -> list[Packet]:
    """Sampled packets that receive no decision at all."""
    if isinstance(target, RuleSet):
        grid = _Grid(target.schema, space)
        covered = np.zeros(grid.shape, dtype=bool)
        for rule in target.rules:
            covered |= grid.rule_mask(rule)
    else:
        grid = _Grid(target.schema, space)
        covered = _grid_tree(grid, target) != -1
    return [grid.packet_at(tuple(idx)) for idx in np.argwhere(~covered)]


def equivalence(
    tree: DecisionTree, rs: RuleSet, semantics: Semantics, space: DomainSpace
) -> list[tuple[Packet, str | None, str | None]]:
    """Counterexamples where the tree and the rules disagree.

    Returns ``(packet, tree decision, rule decision)`` triples in point
    order; empty means the tree reproduces the reference semantics over the
    sampled space.
    """
    if tree.schema != rs.schema:
        raise SchemaError("tree and rule set must share a schema")
    grid = _Grid(rs.schema, space)
    by_tree = _grid_tree(grid, tree)
    by_rules = _grid_rules(grid, rs, semantics)
    out = []
    for idx in np.argwhere(by_tree != by_rules):
        index = tuple(idx)
        out.append(
            (
                grid.packet_at(index),
                grid.label_of.get(int(by_tree[index])),
                grid.label_of.get(int(by_rules[index])),
            )
        )
    return out
