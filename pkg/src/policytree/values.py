"""Value sets: the constraint algebra shared by every rule attribute.

A rule constrains each attribute to a set of values.  Three shapes cover
everything we need:

* the wildcard (written ``any`` or ``All`` in rule files), meaning the
  attribute's whole domain;
* a finite label set, for enumerated attributes such as protocols or
  attack classes;
* a union of closed integer intervals, for numeric attributes (ports,
  packet lengths) and IPv4 addresses mapped to unsigned 32-bit integers.

Interval unions are kept canonical: sorted, non-overlapping, and with no
two adjacent intervals (``[7,9]`` and ``[10,15]`` coalesce to ``[7,15]``).
The empty set is representable and is distinct from the wildcard.

All binary operations take the attribute's domain so that wildcards can be
expanded, and results equal to the whole domain are re-compressed back to
the wildcard.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

__all__ = [
    "AttrKind",
    "ValueSet",
    "ValueSetError",
    "ANY",
    "EMPTY_LABELS",
    "EMPTY_INTERVALS",
    "COMPLEMENT_LABEL",
    "labels",
    "intervals",
    "point",
    "vs_intersect",
    "vs_union",
    "vs_difference",
    "vs_is_empty",
    "vs_equal",
    "vs_subset",
    "vs_proper_subset",
    "vs_disjoint",
    "contains_point",
    "enumerate_points",
    "interval_endpoints",
]


class ValueSetError(ValueError):
    """Raised when value sets of incompatible shapes are combined."""


class AttrKind(str, Enum):
    """The attribute kinds accepted in rule files."""

    PROTOCOL_ENUM = "protocol-enum"
    IPV4_RANGE = "ipv4-range"
    PORT_RANGE = "port-range"
    INTEGER_RANGE = "integer-range"
    LABEL_ENUM = "label-enum"

    @property
    def is_numeric(self) -> bool:
        return self in (
            AttrKind.IPV4_RANGE,
            AttrKind.PORT_RANGE,
            AttrKind.INTEGER_RANGE,
        )


#: Reserved member of every open label enumeration.  It stands for "any
#: label not named in the declaration", so that the complement of a label
#: set (e.g. All minus {winworm}) stays representable inside the domain.
COMPLEMENT_LABEL = "~other~"


@dataclass(frozen=True)
class ValueSet:
    """One attribute constraint.  Wildcard when both fields are ``None``."""

    labels: frozenset[str] | None = None
    intervals: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        if self.labels is not None and self.intervals is not None:
            raise ValueSetError("a value set is either labels or intervals, not both")

    @property
    def is_wildcard(self) -> bool:
        return self.labels is None and self.intervals is None

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.is_wildcard:
            return "ValueSet(any)"
        if self.labels is not None:
            return f"ValueSet({{{', '.join(sorted(self.labels))}}})"
        spans = ",".join(f"[{lo},{hi}]" for lo, hi in self.intervals or ())
        return f"ValueSet({spans})"


ANY = ValueSet()
EMPTY_LABELS = ValueSet(labels=frozenset())
EMPTY_INTERVALS = ValueSet(intervals=())


def labels(*names: str) -> ValueSet:
    return ValueSet(labels=frozenset(names))


def intervals(pairs) -> ValueSet:
    """Build a canonical interval union from (lo, hi) pairs."""
    return ValueSet(intervals=_canonical(pairs))


def point(value: int) -> ValueSet:
    return ValueSet(intervals=((value, value),))


def _canonical(pairs) -> tuple[tuple[int, int], ...]:
    spans = sorted((int(lo), int(hi)) for lo, hi in pairs if lo <= hi)
    out: list[list[int]] = []
    for lo, hi in spans:
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


# ---------------------------------------------------------------------------
# raw interval arithmetic (canonical in, canonical out)
# ---------------------------------------------------------------------------


def _ivals_intersect(a, b):
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return tuple(out)


def _ivals_difference(a, b):
    out = []
    for lo, hi in a:
        pieces = [(lo, hi)]
        for blo, bhi in b:
            next_pieces = []
            for plo, phi in pieces:
                if bhi < plo or blo > phi:
                    next_pieces.append((plo, phi))
                    continue
                if plo < blo:
                    next_pieces.append((plo, blo - 1))
                if bhi < phi:
                    next_pieces.append((bhi + 1, phi))
            pieces = next_pieces
        out.extend(pieces)
    return _canonical(out)


def _expand(v: ValueSet, domain: ValueSet) -> ValueSet:
    if v.is_wildcard:
        return domain
    return v


def _check_domain(domain: ValueSet) -> None:
    if domain.is_wildcard:
        raise ValueSetError("attribute domains must be concrete, not wildcard")


def _pair(a: ValueSet, b: ValueSet, domain: ValueSet) -> tuple[ValueSet, ValueSet]:
    _check_domain(domain)
    ea, eb = _expand(a, domain), _expand(b, domain)
    if (ea.labels is None) != (eb.labels is None):
        raise ValueSetError("cannot combine a label set with an interval set")
    return ea, eb


def _compress(v: ValueSet, domain: ValueSet) -> ValueSet:
    if v == domain:
        return ANY
    return v


def vs_intersect(a: ValueSet, b: ValueSet, domain: ValueSet) -> ValueSet:
    ea, eb = _pair(a, b, domain)
    if ea.labels is not None:
        out = ValueSet(labels=ea.labels & eb.labels)
    else:
        out = ValueSet(intervals=_ivals_intersect(ea.intervals, eb.intervals))
    return _compress(out, domain)


def vs_union(a: ValueSet, b: ValueSet, domain: ValueSet) -> ValueSet:
    ea, eb = _pair(a, b, domain)
    if ea.labels is not None:
        out = ValueSet(labels=ea.labels | eb.labels)
    else:
        out = ValueSet(intervals=_canonical(list(ea.intervals) + list(eb.intervals)))
    return _compress(out, domain)


def vs_difference(a: ValueSet, b: ValueSet, domain: ValueSet) -> ValueSet:
    ea, eb = _pair(a, b, domain)
    if ea.labels is not None:
        out = ValueSet(labels=ea.labels - eb.labels)
    else:
        out = ValueSet(intervals=_ivals_difference(ea.intervals, eb.intervals))
    return _compress(out, domain)


def vs_is_empty(v: ValueSet) -> bool:
    if v.is_wildcard:
        return False
    if v.labels is not None:
        return not v.labels
    return not v.intervals


def vs_equal(a: ValueSet, b: ValueSet, domain: ValueSet) -> bool:
    ea, eb = _pair(a, b, domain)
    return ea == eb


def vs_subset(a: ValueSet, b: ValueSet, domain: ValueSet) -> bool:
    """True when every value of ``a`` also belongs to ``b``."""
    ea, eb = _pair(a, b, domain)
    if ea.labels is not None:
        return ea.labels <= eb.labels
    for lo, hi in ea.intervals:
        if not any(blo <= lo and hi <= bhi for blo, bhi in eb.intervals):
            return False
    return True


def vs_proper_subset(a: ValueSet, b: ValueSet, domain: ValueSet) -> bool:
    return vs_subset(a, b, domain) and not vs_equal(a, b, domain)


def vs_disjoint(a: ValueSet, b: ValueSet, domain: ValueSet) -> bool:
    return vs_is_empty(vs_intersect(a, b, domain))


def contains_point(v: ValueSet, value: int | str, domain: ValueSet) -> bool:
    ev = _expand(v, domain)
    if ev.labels is not None:
        return value in ev.labels
    if isinstance(value, str):
        raise ValueSetError(f"interval sets hold integers, not {value!r}")
    return any(lo <= value <= hi for lo, hi in ev.intervals)


def enumerate_points(v: ValueSet, domain: ValueSet):
    """Yield every value of ``v``.  Only sensible for small domains."""
    ev = _expand(v, domain)
    if ev.labels is not None:
        yield from sorted(ev.labels)
        return
    for lo, hi in ev.intervals:
        yield from range(lo, hi + 1)


def interval_endpoints(v: ValueSet) -> list[int]:
    """The interval bounds of ``v`` (empty for wildcards and label sets)."""
    if v.intervals is None:
        return []
    out: list[int] = []
    for lo, hi in v.intervals:
        out.append(lo)
        out.append(hi)
    return out
