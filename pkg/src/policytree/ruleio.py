"""Reading and writing rule files.

The text format, line by line (``#`` starts a comment anywhere):

.. code-block:: text

    component FW
    kind filtering
    attr protocol protocol-enum TCP,UDP,ICMP
    attr src_addr ipv4-range 140.192.0.0-140.192.255.255
    decision action accept,deny
    rules
    1 | TCP | 140.192.10.1-140.192.10.100 | deny

Header lines declare the component and its kind, ``attr`` lines declare the
ordered condition attributes (name, kind, domain), ``decision`` declares the
decision attribute, and everything after the ``rules`` marker is one rule
per line: ``id | value | ... | action`` with an optional trailing origin
column.  Values are ``any``/``All`` (wildcard), a single value, ``lo-hi``,
or a comma-joined union of those.  IPv4 values may use ``a.b.c.*`` blocks;
a ``/nn`` suffix is accepted and ignored.

``ruleset_to_dict``/``ruleset_from_dict`` mirror the same fields as plain
dictionaries for machine consumption; both representations round-trip.
"""

from __future__ import annotations

import ipaddress
import json
from pathlib import Path

from .model import (
    AttributeDef,
    ComponentKind,
    Rule,
    RuleSet,
    Schema,
    SchemaError,
    complete_label_domain,
)
from .values import (
    ANY,
    AttrKind,
    COMPLEMENT_LABEL,
    ValueSet,
    ValueSetError,
    contains_point,
    intervals as make_intervals,
    vs_subset,
)

__all__ = [
    "RuleFileError",
    "parse_ruleset",
    "serialize_ruleset",
    "ruleset_to_dict",
    "ruleset_from_dict",
    "load_ruleset",
    "save_ruleset",
    "parse_value",
    "parse_point",
    "format_value",
]

_WILDCARD_TOKENS = {"any", "all"}


class RuleFileError(ValueError):
    """A syntax or consistency problem in a rule file, with its line number."""

    def __init__(self, message: str, line: int | None = None, source: str = ""):
        self.line = line
        self.source = source
        where = source or "<input>"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# scalar conversions
# ---------------------------------------------------------------------------


def _ip_to_int(token: str) -> int:
    return int(ipaddress.IPv4Address(token))


def _int_to_ip(n: int) -> str:
    return str(ipaddress.IPv4Address(n))


def _parse_ipv4_atom(token: str) -> tuple[int, int]:
    """One IPv4 atom: an address, or a block written with trailing ``*``."""
    token = token.split("/", 1)[0]  # prefix lengths carry no extra meaning
    parts = token.split(".")
    if len(parts) != 4:
        raise ValueError(f"bad IPv4 value {token!r}")
    if "*" in parts:
        first_star = parts.index("*")
        if any(p != "*" for p in parts[first_star:]):
            raise ValueError(f"wildcard octets must be a suffix in {token!r}")
        lo = ".".join(p if p != "*" else "0" for p in parts)
        hi = ".".join(p if p != "*" else "255" for p in parts)
        return _ip_to_int(lo), _ip_to_int(hi)
    n = _ip_to_int(token)
    return n, n


def _parse_numeric_atom(token: str, kind: AttrKind) -> tuple[int, int]:
    if kind is AttrKind.IPV4_RANGE:
        if "-" in token:
            lo_s, hi_s = token.split("-", 1)
            lo, _ = _parse_ipv4_atom(lo_s.strip())
            _, hi = _parse_ipv4_atom(hi_s.strip())
            return lo, hi
        return _parse_ipv4_atom(token)
    if "-" in token:
        lo_s, hi_s = token.split("-", 1)
        return int(lo_s), int(hi_s)
    return int(token), int(token)


def _parse_intervals(token: str, kind: AttrKind) -> ValueSet:
    spans = []
    for atom in token.split(","):
        atom = atom.strip()
        if not atom:
            raise ValueError("empty value atom")
        lo, hi = _parse_numeric_atom(atom, kind)
        if lo > hi:
            raise ValueError(f"inverted range {atom!r}")
        spans.append((lo, hi))
    return make_intervals(spans)


def parse_value(token: str, attr: AttributeDef) -> ValueSet:
    """Parse one rule-file value token for ``attr`` (wildcards allowed)."""
    token = token.strip()
    if token.lower() in _WILDCARD_TOKENS:
        return ANY
    if attr.kind.is_numeric:
        try:
            v = _parse_intervals(token, attr.kind)
        except ValueError as exc:
            raise ValueError(f"{attr.name}: {exc}") from None
        if not vs_subset(v, attr.domain, attr.domain):
            raise ValueError(f"{attr.name}: value {token!r} outside the declared domain")
        return v
    names = frozenset(p.strip() for p in token.split(","))
    if "" in names:
        raise ValueError(f"{attr.name}: empty label in {token!r}")
    unknown = names - (attr.domain.labels or frozenset())
    if unknown:
        raise ValueError(
            f"{attr.name}: label(s) {', '.join(sorted(unknown))} outside the declared domain"
        )
    return ValueSet(labels=names)


def parse_point(token: str, attr: AttributeDef) -> int | str:
    """Parse a single packet value (one point, no ranges or wildcards)."""
    token = token.strip()
    if attr.kind.is_numeric:
        try:
            if attr.kind is AttrKind.IPV4_RANGE:
                lo, hi = _parse_ipv4_atom(token)
                if lo != hi:
                    raise ValueError("a packet needs a single address")
                value: int | str = lo
            else:
                value = int(token)
        except ValueError as exc:
            raise ValueSetError(f"{attr.name}: {exc}") from None
    else:
        value = token
    if not contains_point(ANY, value, attr.domain):
        raise ValueSetError(f"{attr.name}: {token!r} outside the declared domain")
    return value


def format_value(v: ValueSet, attr: AttributeDef) -> str:
    """Render a value set in rule-file syntax (canonical form)."""
    if v.is_wildcard:
        return "any"
    if v.labels is not None:
        return ",".join(sorted(v.labels))
    atoms = []
    for lo, hi in v.intervals or ():
        if attr.kind is AttrKind.IPV4_RANGE:
            atoms.append(_int_to_ip(lo) if lo == hi else f"{_int_to_ip(lo)}-{_int_to_ip(hi)}")
        else:
            atoms.append(str(lo) if lo == hi else f"{lo}-{hi}")
    return ",".join(atoms)


def _format_domain(attr: AttributeDef) -> str:
    if attr.kind.is_numeric:
        return format_value(attr.domain, attr)
    names = set(attr.domain.labels or ())
    if attr.kind is AttrKind.LABEL_ENUM:
        names.discard(COMPLEMENT_LABEL)
    return ",".join(sorted(names))


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _parse_attr_decl(rest: str, line: int, source: str) -> AttributeDef:
    parts = rest.split(None, 2)
    if len(parts) != 3:
        raise RuleFileError("expected: attr <name> <kind> <domain>", line, source)
    name, kind_s, domain_s = parts
    try:
        kind = AttrKind(kind_s)
    except ValueError:
        raise RuleFileError(f"unknown attribute kind {kind_s!r}", line, source) from None
    if kind.is_numeric:
        try:
            domain = _parse_intervals(domain_s, kind)
        except ValueError as exc:
            raise RuleFileError(f"bad domain for {name!r}: {exc}", line, source) from None
    else:
        names = frozenset(p.strip() for p in domain_s.split(","))
        if "" in names:
            raise RuleFileError(f"bad domain for {name!r}: empty label", line, source)
        if COMPLEMENT_LABEL in names:
            raise RuleFileError(
                f"{COMPLEMENT_LABEL!r} is reserved and cannot be declared", line, source
            )
        domain = ValueSet(labels=complete_label_domain(kind, names))
    try:
        return AttributeDef(name=name, kind=kind, domain=domain)
    except SchemaError as exc:
        raise RuleFileError(str(exc), line, source) from None


def parse_ruleset(text: str, *, source: str = "<string>") -> RuleSet:
    component: str | None = None
    kind: ComponentKind | None = None
    attrs: list[AttributeDef] = []
    decision: AttributeDef | None = None
    rules: list[Rule] = []
    in_rules = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if in_rules:
            rules.append(
                _parse_rule_line(line, line_no, source, attrs, decision, component, len(rules) + 1)
            )
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "component":
            if not rest:
                raise RuleFileError("component needs a name", line_no, source)
            component = rest
        elif head == "kind":
            try:
                kind = ComponentKind(rest)
            except ValueError:
                raise RuleFileError(
                    f"kind must be filtering or alerting, not {rest!r}", line_no, source
                ) from None
        elif head == "attr":
            attr = _parse_attr_decl(rest, line_no, source)
            if any(a.name == attr.name for a in attrs):
                raise RuleFileError(f"duplicate attribute {attr.name!r}", line_no, source)
            attrs.append(attr)
        elif head == "decision":
            parts = rest.split(None, 1)
            if len(parts) != 2:
                raise RuleFileError("expected: decision <name> <labels>", line_no, source)
            name, labels_s = parts
            names = frozenset(p.strip() for p in labels_s.split(","))
            try:
                decision = AttributeDef(
                    name=name, kind=AttrKind.LABEL_ENUM, domain=ValueSet(labels=names)
                )
            except SchemaError as exc:
                raise RuleFileError(str(exc), line_no, source) from None
        elif head == "rules":
            if component is None or kind is None or decision is None or not attrs:
                raise RuleFileError(
                    "component, kind, attr and decision lines must precede rules",
                    line_no,
                    source,
                )
            in_rules = True
        else:
            raise RuleFileError(f"unknown directive {head!r}", line_no, source)

    if not in_rules:
        raise RuleFileError("missing 'rules' section", None, source)

    schema = Schema(condition_attributes=tuple(attrs), decision_attribute=decision)
    try:
        return RuleSet(
            schema=schema,
            rules=tuple(rules),
            component_kind=kind,
            component_name=component,
        )
    except SchemaError as exc:
        raise RuleFileError(str(exc), None, source) from None


def _parse_rule_line(
    line: str,
    line_no: int,
    source: str,
    attrs: list[AttributeDef],
    decision: AttributeDef,
    component: str,
    expected_id: int,
) -> Rule:
    cells = [c.strip() for c in line.split("|")]
    n = len(attrs)
    if len(cells) not in (n + 2, n + 3):
        raise RuleFileError(
            f"expected {n + 2} columns (id, {n} values, action), got {len(cells)}",
            line_no,
            source,
        )
    try:
        rule_id = int(cells[0])
    except ValueError:
        raise RuleFileError(f"bad rule id {cells[0]!r}", line_no, source) from None
    if rule_id != expected_id:
        raise RuleFileError(
            f"rule ids must be consecutive from 1; expected {expected_id}, got {rule_id}",
            line_no,
            source,
        )
    condition = {}
    for attr, cell in zip(attrs, cells[1 : n + 1]):
        try:
            condition[attr.name] = parse_value(cell, attr)
        except ValueError as exc:
            raise RuleFileError(str(exc), line_no, source) from None
    action = cells[n + 1]
    if action not in (decision.domain.labels or ()):
        raise RuleFileError(f"action {action!r} not in decision domain", line_no, source)
    origin = cells[n + 2] if len(cells) == n + 3 else component
    return Rule(id=rule_id, condition=condition, action=action, origin=origin)


def serialize_ruleset(rs: RuleSet) -> str:
    lines = [f"component {rs.component_name}", f"kind {rs.component_kind.value}"]
    for attr in rs.schema.condition_attributes:
        lines.append(f"attr {attr.name} {attr.kind.value} {_format_domain(attr)}")
    dec = rs.schema.decision_attribute
    lines.append(f"decision {dec.name} {','.join(sorted(dec.domain.labels or ()))}")
    lines.append("rules")
    for rule in rs.rules:
        cells = [str(rule.id)]
        cells.extend(
            format_value(rule.condition[a.name], a) for a in rs.schema.condition_attributes
        )
        cells.append(rule.action)
        if rule.origin and rule.origin != rs.component_name:
            cells.append(rule.origin)
        lines.append(" | ".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# dict / JSON mirror
# ---------------------------------------------------------------------------


def ruleset_to_dict(rs: RuleSet) -> dict:
    return {
        "component": rs.component_name,
        "kind": rs.component_kind.value,
        "attributes": [
            {"name": a.name, "kind": a.kind.value, "domain": _format_domain(a)}
            for a in rs.schema.condition_attributes
        ],
        "decision": {
            "name": rs.schema.decision_attribute.name,
            "labels": sorted(rs.schema.decision_attribute.domain.labels or ()),
        },
        "rules": [
            {
                "id": r.id,
                "values": {
                    a.name: format_value(r.condition[a.name], a)
                    for a in rs.schema.condition_attributes
                },
                "action": r.action,
                "origin": r.origin,
            }
            for r in rs.rules
        ],
    }


def ruleset_from_dict(d: dict) -> RuleSet:
    lines = [f"component {d['component']}", f"kind {d['kind']}"]
    for a in d["attributes"]:
        lines.append(f"attr {a['name']} {a['kind']} {a['domain']}")
    lines.append(f"decision {d['decision']['name']} {','.join(d['decision']['labels'])}")
    lines.append("rules")
    text = "\n".join(lines) + "\n"
    base = parse_ruleset(text, source="<dict>")
    attrs = base.schema.condition_attributes
    rules = []
    for entry in d["rules"]:
        condition = {}
        for attr in attrs:
            condition[attr.name] = parse_value(str(entry["values"][attr.name]), attr)
        rules.append(
            Rule(
                id=int(entry["id"]),
                condition=condition,
                action=entry["action"],
                origin=entry.get("origin", d["component"]),
            )
        )
    return RuleSet(
        schema=base.schema,
        rules=tuple(rules),
        component_kind=base.component_kind,
        component_name=base.component_name,
    )


def load_ruleset(path: str | Path) -> RuleSet:
    """Load a rule set from a ``.rules`` text file or a ``.json`` mirror."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            return ruleset_from_dict(json.loads(text))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise RuleFileError(f"bad JSON rule file: {exc}", None, str(path)) from None
    return parse_ruleset(text, source=str(path))


def save_ruleset(path: str | Path, rs: RuleSet) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(ruleset_to_dict(rs), indent=2, sort_keys=True) + "\n")
    else:
        path.write_text(serialize_ruleset(rs))
