"""Core policy model: attributes, schemas, rules, and rule sets.

A security component (firewall, IDS, ...) carries an ordered list of rules.
Each rule is a conjunction of per-attribute value constraints plus one
decision label.  Decision labels fall into two classes: ``accept``/``pass``
permit traffic, ``deny``/``reject``/``discard`` block it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .values import (
    ANY,
    AttrKind,
    COMPLEMENT_LABEL,
    ValueSet,
    vs_difference,
    vs_disjoint,
    vs_equal,
    vs_intersect,
    vs_is_empty,
    vs_proper_subset,
    vs_subset,
    vs_union,
)

__all__ = [
    "SchemaError",
    "ActionClass",
    "ComponentKind",
    "Severity",
    "AttributeDef",
    "Schema",
    "Rule",
    "RuleSet",
    "PERMIT_ACTIONS",
    "BLOCK_ACTIONS",
    "DECISION_LABELS",
    "action_class",
    "value_set_op",
    "value_set_rel",
]


class SchemaError(ValueError):
    """A rule, packet, or operation does not fit the schema it was used with."""


PERMIT_ACTIONS = frozenset({"accept", "pass"})
BLOCK_ACTIONS = frozenset({"deny", "reject", "discard"})
DECISION_LABELS = PERMIT_ACTIONS | BLOCK_ACTIONS


class ActionClass(Enum):
    PERMIT = "permit"
    BLOCK = "block"


def action_class(label: str) -> ActionClass:
    if label in PERMIT_ACTIONS:
        return ActionClass.PERMIT
    if label in BLOCK_ACTIONS:
        return ActionClass.BLOCK
    raise SchemaError(f"unknown decision label {label!r}")


class ComponentKind(str, Enum):
    FILTERING = "filtering"
    ALERTING = "alerting"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class AttributeDef:
    """One attribute: a name, a kind, and a concrete (non-wildcard) domain."""

    name: str
    kind: AttrKind
    domain: ValueSet

    def __post_init__(self) -> None:
        if self.domain.is_wildcard:
            raise SchemaError(f"attribute {self.name!r} needs an explicit domain")
        if self.kind.is_numeric and self.domain.intervals is None:
            raise SchemaError(f"attribute {self.name!r} needs an interval domain")
        if not self.kind.is_numeric and self.domain.labels is None:
            raise SchemaError(f"attribute {self.name!r} needs a label domain")
        if vs_is_empty(self.domain):
            raise SchemaError(f"attribute {self.name!r} has an empty domain")


@dataclass(frozen=True)
class Schema:
    """Ordered condition attributes plus the decision attribute."""

    condition_attributes: tuple[AttributeDef, ...]
    decision_attribute: AttributeDef

    def __post_init__(self) -> None:
        if not self.condition_attributes:
            raise SchemaError("a schema needs at least one condition attribute")
        names = [a.name for a in self.condition_attributes]
        names.append(self.decision_attribute.name)
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        dec = self.decision_attribute
        if dec.domain.labels is None or not dec.domain.labels <= DECISION_LABELS:
            raise SchemaError(
                "decision domain must be drawn from "
                + "/".join(sorted(DECISION_LABELS))
            )

    @property
    def condition_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.condition_attributes)

    def attribute(self, name: str) -> AttributeDef:
        for a in self.condition_attributes:
            if a.name == name:
                return a
        raise SchemaError(f"no condition attribute named {name!r}")


@dataclass(frozen=True)
class Rule:
    """One rule: id, per-attribute constraints, and a decision label.

    ``origin`` records where the rule came from (a component name, possibly
    qualified with the source rule id after a correction pass).
    """

    id: int
    condition: Mapping[str, ValueSet]
    action: str
    origin: str = ""

    def value(self, name: str) -> ValueSet:
        return self.condition[name]


def _validate_rule(rule: Rule, schema: Schema) -> None:
    expected = set(schema.condition_names)
    got = set(rule.condition)
    if expected != got:
        missing = expected - got
        extra = got - expected
        parts = []
        if missing:
            parts.append("missing " + ", ".join(sorted(missing)))
        if extra:
            parts.append("unexpected " + ", ".join(sorted(extra)))
        raise SchemaError(f"rule {rule.id}: {'; '.join(parts)}")
    for attr in schema.condition_attributes:
        v = rule.condition[attr.name]
        if v.is_wildcard:
            continue
        if not vs_subset(v, attr.domain, attr.domain):
            raise SchemaError(
                f"rule {rule.id}: value for {attr.name!r} falls outside its domain"
            )
    if rule.action not in (schema.decision_attribute.domain.labels or ()):
        raise SchemaError(f"rule {rule.id}: action {rule.action!r} not in decision domain")


@dataclass(frozen=True)
class RuleSet:
    """A component's ordered rules.  Rule ids must run 1..t in order."""

    schema: Schema
    rules: tuple[Rule, ...]
    component_kind: ComponentKind = ComponentKind.FILTERING
    component_name: str = ""

    def __post_init__(self) -> None:
        for pos, rule in enumerate(self.rules, start=1):
            if rule.id != pos:
                raise SchemaError(
                    f"rule ids must be consecutive from 1; found {rule.id} at position {pos}"
                )
            _validate_rule(rule, self.schema)

    def __len__(self) -> int:
        return len(self.rules)

    def rule(self, rule_id: int) -> Rule:
        return self.rules[rule_id - 1]


def complete_label_domain(kind: AttrKind, declared: frozenset[str]) -> frozenset[str]:
    """Domain of a condition label attribute.

    Open enumerations (``label-enum``) reserve an extra member standing for
    every label not named, so complements of declared labels stay inside the
    domain.  Protocol enumerations are closed.
    """
    if kind is AttrKind.LABEL_ENUM:
        return declared | {COMPLEMENT_LABEL}
    return declared


# ---------------------------------------------------------------------------
# string-dispatch wrappers over the value-set algebra
# ---------------------------------------------------------------------------

_OPS = {
    "intersect": vs_intersect,
    "union": vs_union,
    "difference": vs_difference,
}

_RELS = {
    "equal": vs_equal,
    "subset": vs_subset,
    "proper-subset": vs_proper_subset,
    "disjoint": vs_disjoint,
}


def value_set_op(op: str, a: ValueSet, b: ValueSet, attr: AttributeDef) -> ValueSet:
    """Apply a named set operation under ``attr``'s domain."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown value-set operation {op!r}") from None
    return fn(a, b, attr.domain)


def value_set_rel(rel: str, a: ValueSet, b: ValueSet, attr: AttributeDef) -> bool:
    """Test a named set relation under ``attr``'s domain."""
    try:
        fn = _RELS[rel]
    except KeyError:
        raise ValueError(f"unknown value-set relation {rel!r}") from None
    return fn(a, b, attr.domain)


# Convenience re-export so callers can build wildcard conditions tersely.
WILDCARD = ANY
