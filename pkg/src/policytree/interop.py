"""Interoperability checks between a preceding and a following component.

Traffic flows through components in path order (say, a firewall and then an
IDS).  Once both rule sets are expressed over a shared attribute union,
every cross pair (preceding rule, following rule) is classified:

* inter-shadowing (error): the preceding component blocks traffic the
  following one was meant to see and permit;
* inter-spuriousness (error): the preceding component lets traffic through
  that the following one blocks or alerts on;
* inter-redundancy (warning): both block the same traffic, so the
  following rule is dead weight;
* inter-correlation (error): the regions overlap both ways with different
  action classes, so behaviour depends on how packets straddle the overlap.

The containment checks compare the more specific following rule against the
preceding rule's region.  Two components interoperate when no pair at all
is reported.

The module also reads simple topology files and flags paths that place an
alerting component in front of a filtering one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    ActionClass,
    AttributeDef,
    ComponentKind,
    Rule,
    RuleSet,
    Schema,
    SchemaError,
    Severity,
    action_class,
)
from .relations import RelationKind, RuleRelation, is_correlated, relate
from .values import ValueSet, intervals, vs_subset

__all__ = [
    "InterKind",
    "InterAnomaly",
    "InteropVerdict",
    "extract_attributes",
    "union_schema",
    "extend_schema",
    "detect_inter",
    "check_interoperable",
    "Topology",
    "TopologyComponent",
    "TopologyError",
    "PositioningViolation",
    "parse_topology",
    "check_positioning",
]


class InterKind(str, Enum):
    SHADOWING = "inter-shadowing"
    SPURIOUSNESS = "inter-spuriousness"
    REDUNDANCY = "inter-redundancy"
    CORRELATION = "inter-correlation"


_SEVERITY = {
    InterKind.SHADOWING: Severity.ERROR,
    InterKind.SPURIOUSNESS: Severity.ERROR,
    InterKind.REDUNDANCY: Severity.WARNING,
    InterKind.CORRELATION: Severity.ERROR,
}

_KIND_ORDER = {k: i for i, k in enumerate(InterKind)}


@dataclass(frozen=True)
class InterAnomaly:
    kind: InterKind
    preceding_rule: int
    following_rule: int
    evidence: RuleRelation
    severity: Severity


@dataclass(frozen=True)
class InteropVerdict:
    interoperable: bool
    anomalies: tuple[InterAnomaly, ...]


# ---------------------------------------------------------------------------
# schema extraction and extension
# ---------------------------------------------------------------------------


def extract_attributes(rs: RuleSet) -> Schema:
    """The component's schema (trivially available, kept as an operation)."""
    return rs.schema


def _domain_union(a: AttributeDef, b: AttributeDef) -> ValueSet:
    # plain union of two concrete domains; never collapses to the wildcard
    if a.domain == b.domain:
        return a.domain
    if a.kind.is_numeric:
        return intervals(a.domain.intervals + b.domain.intervals)
    return ValueSet(labels=(a.domain.labels or frozenset()) | (b.domain.labels or frozenset()))


def union_schema(preceding: Schema, following: Schema) -> Schema:
    """Shared schema: preceding attributes first, then following-only ones.

    Attributes present in both must agree in kind; their domains are
    unioned.  The decision attribute keeps the preceding component's name
    and takes the union of both label sets.
    """
    by_name = {a.name: a for a in following.condition_attributes}
    merged: list[AttributeDef] = []
    for attr in preceding.condition_attributes:
        other = by_name.get(attr.name)
        if other is None:
            merged.append(attr)
            continue
        if other.kind is not attr.kind:
            raise SchemaError(
                f"attribute {attr.name!r} declared as {attr.kind.value} and {other.kind.value}"
            )
        merged.append(AttributeDef(name=attr.name, kind=attr.kind, domain=_domain_union(attr, other)))
    seen = {a.name for a in merged}
    merged.extend(a for a in following.condition_attributes if a.name not in seen)

    dec_p = preceding.decision_attribute
    dec_f = following.decision_attribute
    decision = AttributeDef(
        name=dec_p.name,
        kind=dec_p.kind,
        domain=ValueSet(labels=(dec_p.domain.labels or frozenset()) | (dec_f.domain.labels or frozenset())),
    )
    return Schema(condition_attributes=tuple(merged), decision_attribute=decision)


def extend_schema(rs: RuleSet, target: Schema) -> RuleSet:
    """Restate ``rs`` over ``target``, which must cover all its attributes.

    Rules gain the wildcard for attributes they never constrained.  A
    wildcard over an attribute whose domain grew in ``target`` is first
    pinned to the original domain, so no rule matches more than before.
    """
    target_by_name = {a.name: a for a in target.condition_attributes}
    for attr in rs.schema.condition_attributes:
        other = target_by_name.get(attr.name)
        if other is None:
            raise SchemaError(f"target schema lacks attribute {attr.name!r}")
        if other.kind is not attr.kind:
            raise SchemaError(f"attribute {attr.name!r} changes kind in the target schema")
        if not vs_subset(attr.domain, other.domain, other.domain):
            raise SchemaError(f"target domain for {attr.name!r} does not cover the original")
    source_labels = rs.schema.decision_attribute.domain.labels or frozenset()
    target_labels = target.decision_attribute.domain.labels or frozenset()
    if not source_labels <= target_labels:
        raise SchemaError("target decision domain does not cover the original")

    own = set(rs.schema.condition_names)
    new_rules = []
    for rule in rs.rules:
        condition = {}
        for attr in target.condition_attributes:
            if attr.name not in own:
                condition[attr.name] = ValueSet()  # wildcard
                continue
            v = rule.condition[attr.name]
            original = rs.schema.attribute(attr.name)
            if v.is_wildcard and original.domain != attr.domain:
                v = original.domain  # keep the original reach, not the wider one
            condition[attr.name] = v
        new_rules.append(Rule(id=rule.id, condition=condition, action=rule.action, origin=rule.origin))
    return RuleSet(
        schema=target,
        rules=tuple(new_rules),
        component_kind=rs.component_kind,
        component_name=rs.component_name,
    )


# ---------------------------------------------------------------------------
# cross-component anomalies
# ---------------------------------------------------------------------------


def _classify(rel: RuleRelation, preceding: Rule, following: Rule) -> InterKind | None:
    p_class = action_class(preceding.action)
    f_class = action_class(following.action)
    if rel.kind in (RelationKind.BACKWARD, RelationKind.EXACT):
        # the following rule's traffic is entirely decided upstream
        if p_class is ActionClass.BLOCK and f_class is ActionClass.PERMIT:
            return InterKind.SHADOWING
        if p_class is ActionClass.PERMIT and f_class is ActionClass.BLOCK:
            return InterKind.SPURIOUSNESS
        if p_class is ActionClass.BLOCK and f_class is ActionClass.BLOCK:
            return InterKind.REDUNDANCY
        return None
    if is_correlated(rel.kind) and p_class is not f_class:
        return InterKind.CORRELATION
    return None


def detect_inter(preceding: RuleSet, following: RuleSet) -> list[InterAnomaly]:
    """All anomalous cross pairs.  Both sets must share one (union) schema."""
    if preceding.schema != following.schema:
        raise SchemaError("extend both components to the shared schema first")
    found: list[InterAnomaly] = []
    for p in preceding.rules:
        for f in following.rules:
            rel = relate(p, f, preceding.schema)
            kind = _classify(rel, p, f)
            if kind is not None:
                found.append(
                    InterAnomaly(
                        kind=kind,
                        preceding_rule=p.id,
                        following_rule=f.id,
                        evidence=rel,
                        severity=_SEVERITY[kind],
                    )
                )
    found.sort(key=lambda a: (a.preceding_rule, a.following_rule, _KIND_ORDER[a.kind]))
    return found


def check_interoperable(preceding: RuleSet, following: RuleSet) -> InteropVerdict:
    anomalies = tuple(detect_inter(preceding, following))
    return InteropVerdict(interoperable=not anomalies, anomalies=anomalies)


# ---------------------------------------------------------------------------
# topologies
# ---------------------------------------------------------------------------


class TopologyError(ValueError):
    """A malformed topology file."""


@dataclass(frozen=True)
class TopologyComponent:
    name: str
    kind: ComponentKind
    rules_path: str | None = None


@dataclass(frozen=True)
class Topology:
    components: dict[str, TopologyComponent]
    paths: tuple[tuple[str, tuple[str, ...]], ...]


def parse_topology(text: str, *, source: str = "<string>") -> Topology:
    """Read a topology file.

    ``component <name> <kind> [<rules-file>]`` declares a component;
    ``path <name> <member> <member> ...`` lists a traffic path in order.
    Path members name declared components, or use inline ``name:kind``.
    """
    components: dict[str, TopologyComponent] = {}
    paths: list[tuple[str, tuple[str, ...]]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "component":
            if len(rest) not in (2, 3):
                raise TopologyError(f"{source}:{line_no}: expected component <name> <kind> [<file>]")
            name, kind_s = rest[0], rest[1]
            try:
                kind = ComponentKind(kind_s)
            except ValueError:
                raise TopologyError(f"{source}:{line_no}: unknown kind {kind_s!r}") from None
            components[name] = TopologyComponent(
                name=name, kind=kind, rules_path=rest[2] if len(rest) == 3 else None
            )
        elif head == "path":
            if len(rest) < 2:
                raise TopologyError(f"{source}:{line_no}: a path needs a name and members")
            path_name, members = rest[0], []
            for member in rest[1:]:
                if ":" in member:
                    name, kind_s = member.split(":", 1)
                    try:
                        kind = ComponentKind(kind_s)
                    except ValueError:
                        raise TopologyError(
                            f"{source}:{line_no}: unknown kind {kind_s!r}"
                        ) from None
                    components.setdefault(name, TopologyComponent(name=name, kind=kind))
                    members.append(name)
                elif member in components:
                    members.append(member)
                else:
                    raise TopologyError(
                        f"{source}:{line_no}: undeclared component {member!r}"
                    )
            paths.append((path_name, tuple(members)))
        else:
            raise TopologyError(f"{source}:{line_no}: unknown directive {head!r}")
    return Topology(components=components, paths=tuple(paths))


@dataclass(frozen=True)
class PositioningViolation:
    """An alerting component placed before a filtering one on a path."""

    path: str
    alerting: str
    filtering: str


def check_positioning(topology: Topology) -> list[PositioningViolation]:
    """Alerting components must not precede filtering ones on any path."""
    out: list[PositioningViolation] = []
    for path_name, members in topology.paths:
        kinds = [topology.components[m].kind for m in members]
        for i in range(len(members)):
            if kinds[i] is not ComponentKind.ALERTING:
                continue
            for j in range(i + 1, len(members)):
                if kinds[j] is ComponentKind.FILTERING:
                    out.append(
                        PositioningViolation(
                            path=path_name, alerting=members[i], filtering=members[j]
                        )
                    )
    return out
