"""Anomaly detection inside a single ordered rule set.

For every ordered pair (earlier rule i, later rule j):

* shadowing (error): j fits inside i and their action classes differ, so j
  can never fire and would have acted differently;
* redundancy (error): j fits inside i with the same action class, so j is
  dead weight;
* generalization (warning): i fits properly inside j with a different
  action class; j acts as i's catch-all;
* correlation (warning): the rules overlap both ways (correlated) with
  different action classes, so their relative order changes behaviour.

Rules with identical conditions count as shadowing when the actions differ
and as redundancy when they agree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import RuleSet, Severity, action_class
from .relations import RelationKind, RuleRelation, is_correlated, relate

__all__ = ["IntraKind", "IntraAnomaly", "detect_intra", "is_relevant_ruleset"]

from enum import Enum


class IntraKind(str, Enum):
    SHADOWING = "shadowing"
    GENERALIZATION = "generalization"
    REDUNDANCY = "redundancy"
    CORRELATION = "correlation"


_SEVERITY = {
    IntraKind.SHADOWING: Severity.ERROR,
    IntraKind.REDUNDANCY: Severity.ERROR,
    IntraKind.GENERALIZATION: Severity.WARNING,
    IntraKind.CORRELATION: Severity.WARNING,
}

_KIND_ORDER = {k: i for i, k in enumerate(IntraKind)}


@dataclass(frozen=True)
class IntraAnomaly:
    kind: IntraKind
    earlier: int
    later: int
    evidence: RuleRelation
    severity: Severity


def _classify(rel: RuleRelation, same_class: bool) -> IntraKind | None:
    if rel.kind is RelationKind.EXACT or rel.kind is RelationKind.BACKWARD:
        # the later rule never fires on anything of its own
        return IntraKind.REDUNDANCY if same_class else IntraKind.SHADOWING
    if rel.kind is RelationKind.FORWARD and not same_class:
        return IntraKind.GENERALIZATION
    if is_correlated(rel.kind) and not same_class:
        return IntraKind.CORRELATION
    return None


def detect_intra(rs: RuleSet) -> list[IntraAnomaly]:
    """All anomalous pairs, sorted by earlier id, later id, then kind."""
    found: list[IntraAnomaly] = []
    rules = rs.rules
    for i in range(len(rules)):
        for j in range(i + 1, len(rules)):
            rel = relate(rules[i], rules[j], rs.schema)
            same = action_class(rules[i].action) == action_class(rules[j].action)
            kind = _classify(rel, same)
            if kind is not None:
                found.append(
                    IntraAnomaly(
                        kind=kind,
                        earlier=rules[i].id,
                        later=rules[j].id,
                        evidence=rel,
                        severity=_SEVERITY[kind],
                    )
                )
    found.sort(key=lambda a: (a.earlier, a.later, _KIND_ORDER[a.kind]))
    return found


def is_relevant_ruleset(rs: RuleSet) -> bool:
    """True when no packet can match two rules (all pairs disjoint)."""
    rules = rs.rules
    for i in range(len(rules)):
        for j in range(i + 1, len(rules)):
            if relate(rules[i], rules[j], rs.schema).kind is not RelationKind.DISJOINT:
                return False
    return True
