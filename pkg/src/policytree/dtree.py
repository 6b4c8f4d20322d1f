"""Decision trees over rule schemas.

A tree has one level per condition attribute, in schema order, then an
action level.  Edges at condition levels carry value sets; edges at the
action level carry a single decision label plus the id of the rule that
owns that region (branches end in an implicit null leaf).  A root-to-leaf
path is a branch and reads as one rule.

A tree is *relevant* when, at every node, the labels of the outgoing edges
are pairwise disjoint, so any packet follows at most one branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .model import ComponentKind, Rule, RuleSet, Schema, SchemaError
from .ruleio import format_value
from .values import (
    ANY,
    ValueSet,
    contains_point,
    vs_equal,
    vs_intersect,
    vs_is_empty,
    vs_union,
)

__all__ = [
    "Edge",
    "Node",
    "DecisionTree",
    "Branch",
    "BranchSuffix",
    "RelevancyViolation",
    "build_tree",
    "branches",
    "suffix_node",
    "suffix_edge",
    "check_relevant",
    "normalize",
    "tree_to_rules",
    "evaluate_tree",
    "dump_tree",
    "copy_node",
    "action_label",
]


@dataclass
class Edge:
    """A labelled edge.  ``owner`` is set on action edges only."""

    label: ValueSet
    child: "Node | None"
    owner: int | None = None


@dataclass
class Node:
    """A tree node at a 1-based level; the last level is the action level."""

    level: int
    edges: list[Edge] = field(default_factory=list)


@dataclass
class DecisionTree:
    schema: Schema
    root: Node
    component_name: str = ""
    component_kind: ComponentKind = ComponentKind.FILTERING

    @property
    def n_condition(self) -> int:
        return len(self.schema.condition_attributes)

    @property
    def action_level(self) -> int:
        return self.n_condition + 1

    def attribute_at(self, level: int):
        return self.schema.condition_attributes[level - 1]


@dataclass(frozen=True)
class Branch:
    """One root-to-leaf path: condition labels in level order, then the action."""

    labels: tuple[ValueSet, ...]
    action: str
    owner: int


@dataclass(frozen=True)
class BranchSuffix:
    """The tail of a branch from a given level.

    ``includes_node`` distinguishes a suffix that starts *at* a node (ready
    to hang off an incoming edge) from one that starts at that level's edge
    (ready to append to an existing node).
    """

    start_level: int
    includes_node: bool
    labels: tuple[ValueSet, ...]
    action: str
    owner: int


def action_label(edge: Edge) -> str:
    (label,) = tuple(edge.label.labels or ())
    return label


def copy_node(node: Node) -> Node:
    return Node(
        level=node.level,
        edges=[Edge(e.label, copy_node(e.child) if e.child else None, e.owner) for e in node.edges],
    )


# ---------------------------------------------------------------------------
# construction and traversal
# ---------------------------------------------------------------------------


def build_tree(rs: RuleSet) -> DecisionTree:
    """Build the plain (uncorrected) tree: one branch per rule.

    Prefixes are shared only when edge labels are structurally identical,
    so the branch list reads back as the original ordered rules.
    """
    root = Node(level=1)
    for rule in rs.rules:
        node = root
        for level, attr in enumerate(rs.schema.condition_attributes, start=1):
            v = rule.condition[attr.name]
            edge = next((e for e in node.edges if e.label == v), None)
            if edge is None:
                edge = Edge(label=v, child=Node(level=level + 1))
                node.edges.append(edge)
            node = edge.child
        node.edges.append(
            Edge(label=ValueSet(labels=frozenset({rule.action})), child=None, owner=rule.id)
        )
    return DecisionTree(
        schema=rs.schema,
        root=root,
        component_name=rs.component_name,
        component_kind=rs.component_kind,
    )


def branches(t: DecisionTree) -> list[Branch]:
    """All branches in depth-first order (sibling edges in stored order)."""
    out: list[Branch] = []

    def walk(node: Node, acc: list[ValueSet]) -> None:
        if node.level == t.action_level:
            for e in node.edges:
                out.append(Branch(labels=tuple(acc), action=action_label(e), owner=e.owner or 0))
            return
        for e in node.edges:
            acc.append(e.label)
            walk(e.child, acc)
            acc.pop()

    walk(t.root, [])
    return out


def _check_suffix_level(b: Branch, level: int) -> None:
    if not 1 <= level <= len(b.labels) + 1:
        raise ValueError(f"suffix level {level} out of range for this branch")


def suffix_node(b: Branch, level: int) -> BranchSuffix:
    """The branch tail starting at the node of ``level`` (inclusive)."""
    _check_suffix_level(b, level)
    return BranchSuffix(
        start_level=level,
        includes_node=True,
        labels=b.labels[level - 1 :],
        action=b.action,
        owner=b.owner,
    )


def suffix_edge(b: Branch, level: int) -> BranchSuffix:
    """The branch tail starting at the edge leaving ``level``'s node."""
    _check_suffix_level(b, level)
    return BranchSuffix(
        start_level=level,
        includes_node=False,
        labels=b.labels[level - 1 :],
        action=b.action,
        owner=b.owner,
    )


# ---------------------------------------------------------------------------
# relevancy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelevancyViolation:
    """Two sibling edges whose labels overlap, with the path leading there."""

    attribute: str
    path: tuple[ValueSet, ...]
    label_a: ValueSet
    label_b: ValueSet


def check_relevant(t: DecisionTree) -> list[RelevancyViolation]:
    """Empty iff every node's outgoing labels are pairwise disjoint."""
    out: list[RelevancyViolation] = []

    def walk(node: Node, path: tuple[ValueSet, ...]) -> None:
        if node.level == t.action_level:
            for i in range(len(node.edges)):
                for j in range(i + 1, len(node.edges)):
                    if node.edges[i].label == node.edges[j].label:
                        out.append(
                            RelevancyViolation(
                                attribute=t.schema.decision_attribute.name,
                                path=path,
                                label_a=node.edges[i].label,
                                label_b=node.edges[j].label,
                            )
                        )
            return
        attr = t.attribute_at(node.level)
        for i in range(len(node.edges)):
            for j in range(i + 1, len(node.edges)):
                inter = vs_intersect(node.edges[i].label, node.edges[j].label, attr.domain)
                if not vs_is_empty(inter):
                    out.append(
                        RelevancyViolation(
                            attribute=attr.name,
                            path=path,
                            label_a=node.edges[i].label,
                            label_b=node.edges[j].label,
                        )
                    )
        for e in node.edges:
            walk(e.child, path + (e.label,))

    walk(t.root, ())
    return out


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------


def _vs_key(v: ValueSet) -> str:
    if v.is_wildcard:
        return "*"
    if v.labels is not None:
        return "L{" + ",".join(sorted(v.labels)) + "}"
    return "I" + ";".join(f"{lo}-{hi}" for lo, hi in v.intervals or ())


def _min_owner(node: Node | None) -> int:
    if node is None:
        return 1 << 62
    best = 1 << 62
    for e in node.edges:
        if e.child is None:
            if e.owner is not None:
                best = min(best, e.owner)
        else:
            best = min(best, _min_owner(e.child))
    return best


def normalize(t: DecisionTree) -> DecisionTree:
    """Merge sibling edges whose subtrees match (same labels and actions).

    Merged labels are unioned; a label covering the whole domain compresses
    back to the wildcard.  Packet decisions are unchanged.  When subtrees
    that differ only in owning rule are merged, the merged region keeps the
    earliest owner.
    """
    root = copy_node(t.root)
    _normalize_node(root, t)
    return replace(t, root=root)


def _normalize_node(node: Node, t: DecisionTree) -> str:
    if node.level == t.action_level:
        merged: dict[str, Edge] = {}
        order: list[str] = []
        for e in node.edges:
            k = _vs_key(e.label)
            if k not in merged:
                merged[k] = e
                order.append(k)
            elif e.owner is not None and (merged[k].owner is None or e.owner < merged[k].owner):
                merged[k] = e
        node.edges = [merged[k] for k in order]
        return "A(" + "|".join(sorted(order)) + ")"

    attr = t.attribute_at(node.level)
    keyed: list[tuple[str, Edge]] = []
    for e in node.edges:
        child_key = _normalize_node(e.child, t)
        if not e.label.is_wildcard and vs_equal(e.label, attr.domain, attr.domain):
            e.label = ANY
        keyed.append((child_key, e))

    groups: dict[str, list[Edge]] = {}
    order = []
    for child_key, e in keyed:
        if child_key not in groups:
            groups[child_key] = []
            order.append(child_key)
        groups[child_key].append(e)

    new_edges: list[Edge] = []
    parts: list[str] = []
    for child_key in order:
        group = groups[child_key]
        if len(group) == 1:
            edge = group[0]
        else:
            label = group[0].label
            for e in group[1:]:
                label = vs_union(label, e.label, attr.domain)
            keep = min(range(len(group)), key=lambda i: (_min_owner(group[i].child), i))
            edge = Edge(label=label, child=group[keep].child)
        new_edges.append(edge)
        parts.append(f"{_vs_key(edge.label)}=>{child_key}")
    node.edges = new_edges
    return "N(" + "|".join(sorted(parts)) + ")"


# ---------------------------------------------------------------------------
# extraction and evaluation
# ---------------------------------------------------------------------------


def _branch_sort_key(b: Branch) -> tuple:
    region = []
    for v in b.labels:
        if v.is_wildcard:
            region.append((0, "", 0, ""))
        elif v.intervals is not None:
            lo = v.intervals[0][0] if v.intervals else -1
            region.append((1, "", lo, _vs_key(v)))
        else:
            region.append((2, ",".join(sorted(v.labels or ())), 0, ""))
    return (b.owner, tuple(region))


def tree_to_rules(t: DecisionTree, origin_map: dict[int, str] | None = None) -> RuleSet:
    """Read the branches back as an ordered rule set.

    Branches sort by owning rule id, then by region; ids are renumbered
    consecutively.  On a plain per-rule tree this inverts ``build_tree``.
    """
    names = t.schema.condition_names
    rules = []
    ordered = sorted(branches(t), key=_branch_sort_key)
    for new_id, b in enumerate(ordered, start=1):
        origin = (origin_map or {}).get(b.owner, t.component_name)
        rules.append(
            Rule(
                id=new_id,
                condition=dict(zip(names, b.labels)),
                action=b.action,
                origin=origin,
            )
        )
    return RuleSet(
        schema=t.schema,
        rules=tuple(rules),
        component_kind=t.component_kind,
        component_name=t.component_name,
    )


def evaluate_tree(t: DecisionTree, packet: dict) -> str | None:
    """Decision for one packet; ``None`` when no branch matches.

    When several branches match (possible only on non-relevant trees) the
    branch with the smallest owner wins, so trees straight out of
    :func:`build_tree` reproduce first-match order.  Depth-first order
    alone would not: a later rule that shares a prefix with rule 1 sits
    ahead of rule 2's unshared edge.
    """
    missing = set(t.schema.condition_names) - set(packet)
    if missing:
        raise SchemaError("packet is missing " + ", ".join(sorted(missing)))

    hits: list[tuple[float, int, str]] = []

    def walk(node: Node) -> None:
        if node.level == t.action_level:
            for e in node.edges:
                rank = float(e.owner) if e.owner is not None else math.inf
                hits.append((rank, len(hits), action_label(e)))
            return
        attr = t.attribute_at(node.level)
        for e in node.edges:
            if contains_point(e.label, packet[attr.name], attr.domain):
                walk(e.child)

    walk(t.root)
    return min(hits)[2] if hits else None


def dump_tree(t: DecisionTree) -> str:
    """Indented text rendering, one edge per line (diagnostics only)."""
    lines: list[str] = [f"tree {t.component_name or '<unnamed>'}"]

    def walk(node: Node, depth: int) -> None:
        pad = "  " * depth
        if node.level == t.action_level:
            for e in node.edges:
                owner = f" [r{e.owner}]" if e.owner is not None else ""
                lines.append(f"{pad}{t.schema.decision_attribute.name}: {action_label(e)}{owner}")
            return
        attr = t.attribute_at(node.level)
        for e in node.edges:
            lines.append(f"{pad}{attr.name} = {format_value(e.label, attr)}")
            walk(e.child, depth + 1)

    walk(t.root, 1)
    return "\n".join(lines) + "\n"
