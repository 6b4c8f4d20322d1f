"""Building relevant decision trees from ordered rule sets.

Rules are inserted in order.  At each node the incoming value set is
decomposed against the sibling edges: the part covered by an existing edge
descends into (a copy of) that subtree, splitting the edge when the overlap
is proper, and whatever remains becomes a fresh edge carrying the rest of
the rule.  When an insertion reaches an action leaf, the region already has
an owner and the conflict policy decides who keeps it:

* ``specificity-then-order`` (default): the incoming rule captures the
  region only when its original condition fits strictly inside the owner's
  original condition (it is the more specific rule).  Ownership transfers
  even when both rules agree on the action.  Otherwise the owner keeps the
  region and the incoming suffix is dropped there; normalization afterwards
  heals any splits this left behind.
* ``first-match``: the owner always keeps the region, reproducing ordered
  first-match semantics.

The result is always relevant: sibling labels are pairwise disjoint by
construction, and every action node carries exactly one action edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .dtree import (
    DecisionTree,
    Edge,
    Node,
    check_relevant,
    copy_node,
    normalize,
    tree_to_rules,
)
from .model import Rule, RuleSet
from .relations import RelationKind, relate
from .values import ValueSet, vs_difference, vs_equal, vs_intersect, vs_is_empty

__all__ = [
    "ConflictPolicy",
    "RelevantDecisionTree",
    "build_rdt",
    "RdtVerification",
    "verify_rdt",
]


class ConflictPolicy(str, Enum):
    SPECIFICITY = "specificity-then-order"
    FIRST_MATCH = "first-match"


@dataclass
class RelevantDecisionTree:
    """A normalized relevant tree plus the policy that built it."""

    tree: DecisionTree
    policy: ConflictPolicy


class _Inserter:
    def __init__(self, rs: RuleSet, policy: ConflictPolicy):
        self.schema = rs.schema
        self.policy = policy
        self.action_level = len(rs.schema.condition_attributes) + 1
        self.originals: dict[int, Rule] = {}
        self._capture_cache: dict[tuple[int, int], bool] = {}

    def _captures(self, incoming: Rule, owner_id: int) -> bool:
        if self.policy is ConflictPolicy.FIRST_MATCH:
            return False
        key = (incoming.id, owner_id)
        if key not in self._capture_cache:
            rel = relate(incoming, self.originals[owner_id], self.schema)
            self._capture_cache[key] = rel.kind is RelationKind.FORWARD
        return self._capture_cache[key]

    def _chain(self, rule: Rule, level: int) -> Node:
        node = Node(level=level)
        if level == self.action_level:
            node.edges.append(
                Edge(label=ValueSet(labels=frozenset({rule.action})), child=None, owner=rule.id)
            )
            return node
        attr = self.schema.condition_attributes[level - 1]
        node.edges.append(Edge(label=rule.condition[attr.name], child=self._chain(rule, level + 1)))
        return node

    def insert(self, root: Node, rule: Rule) -> None:
        self.originals[rule.id] = rule
        self._insert(root, rule)

    def _insert(self, node: Node, rule: Rule) -> None:
        if node.level == self.action_level:
            incumbent = node.edges[0]
            if incumbent.owner is not None and self._captures(rule, incumbent.owner):
                node.edges[0] = Edge(
                    label=ValueSet(labels=frozenset({rule.action})), child=None, owner=rule.id
                )
            return

        attr = self.schema.condition_attributes[node.level - 1]
        dom = attr.domain
        v = rule.condition[attr.name]
        for edge in list(node.edges):
            if vs_is_empty(v):
                break
            inter = vs_intersect(v, edge.label, dom)
            if vs_is_empty(inter):
                continue
            if vs_equal(inter, edge.label, dom):
                # the whole edge lies inside the incoming value: descend
                self._insert(edge.child, rule)
            else:
                # proper overlap: the untouched remainder keeps the subtree,
                # the intersection continues with a private copy
                edge.label = vs_difference(edge.label, inter, dom)
                carved = Edge(label=inter, child=copy_node(edge.child))
                node.edges.append(carved)
                self._insert(carved.child, rule)
            v = vs_difference(v, inter, dom)
        if not vs_is_empty(v):
            node.edges.append(Edge(label=v, child=self._chain(rule, node.level + 1)))


def build_rdt(rs: RuleSet, policy: ConflictPolicy = ConflictPolicy.SPECIFICITY) -> RelevantDecisionTree:
    """Insert every rule in order and normalize the result."""
    root = Node(level=1)
    inserter = _Inserter(rs, policy)
    for rule in rs.rules:
        inserter.insert(root, rule)
    tree = DecisionTree(
        schema=rs.schema,
        root=root,
        component_name=rs.component_name,
        component_kind=rs.component_kind,
    )
    return RelevantDecisionTree(tree=normalize(tree), policy=policy)


@dataclass
class RdtVerification:
    """Outcome of the three independent checks on a built tree."""

    relevancy_violations: list = field(default_factory=list)
    anomalies: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.relevancy_violations or self.anomalies or self.mismatches)


def verify_rdt(rdt: RelevantDecisionTree, rs: RuleSet, space=None) -> RdtVerification:
    """Check relevancy, absence of anomalies, and packet-level equivalence.

    The equivalence check replays the original rules under the matching
    reference semantics (first-match, or owner-capture for the specificity
    policy) over a discretized packet space and compares decisions with the
    tree's.
    """
    from .intra import detect_intra
    from .oracle import Semantics, endpoint_space, equivalence

    if space is None:
        space = endpoint_space(rs)
    semantics = (
        Semantics.FIRST_MATCH
        if rdt.policy is ConflictPolicy.FIRST_MATCH
        else Semantics.OWNER_CAPTURE
    )
    return RdtVerification(
        relevancy_violations=check_relevant(rdt.tree),
        anomalies=detect_intra(tree_to_rules(rdt.tree)),
        mismatches=equivalence(rdt.tree, rs, semantics, space),
    )
