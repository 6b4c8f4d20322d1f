#!/usr/bin/env python3
"""Rough timings for the expensive paths over seeded random rule sets.

Covers tree construction under both conflict policies, single-set
correction, and pairwise repair.  Numbers are wall-clock per call; the
point is spotting regressions of an order of magnitude, not precision.

Usage:
    python3 scripts/benchmark.py [--sets N] [--pairs N] [--seed N]
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from policytree.correction import correct_pair, correct_ruleset
from policytree.model import AttributeDef, ComponentKind, Rule, RuleSet, Schema
from policytree.rdt import ConflictPolicy, build_rdt
from policytree.values import ANY, AttrKind, intervals, labels

_SIZES = (40, 15, 8, 8)


def random_set(
    rng: random.Random,
    *,
    name: str = "GEN",
    kind: ComponentKind | None = None,
    n_attrs: int = 3,
    max_rules: int = 20,
) -> RuleSet:
    attrs = tuple(
        AttributeDef(f"f{i}", AttrKind.INTEGER_RANGE, intervals(((0, _SIZES[i] - 1),)))
        for i in range(n_attrs)
    )
    schema = Schema(
        condition_attributes=attrs,
        decision_attribute=AttributeDef("action", AttrKind.LABEL_ENUM, labels("accept", "deny")),
    )

    def value(a: AttributeDef):
        if rng.random() < 0.15:
            return ANY
        hi = a.domain.intervals[0][1]
        x, y = rng.randint(0, hi), rng.randint(0, hi)
        return intervals(((min(x, y), max(x, y)),))

    rules = tuple(
        Rule(i, {a.name: value(a) for a in attrs}, rng.choice(("accept", "deny")))
        for i in range(1, rng.randint(2, max_rules) + 1)
    )
    return RuleSet(schema=schema, rules=rules, component_name=name, component_kind=kind)


def timed(fn, args_iter) -> list[float]:
    out = []
    for args in args_iter:
        t0 = time.perf_counter()
        fn(*args)
        out.append(time.perf_counter() - t0)
    return out


def report(label: str, durations: list[float]) -> None:
    total = sum(durations)
    print(
        f"{label:<28} n={len(durations):<4} total {total:7.2f}s"
        f"  mean {1e3 * statistics.mean(durations):7.2f}ms"
        f"  max {1e3 * max(durations):7.2f}ms"
    )


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sets", type=int, default=200, help="rule sets per single-set benchmark")
    ap.add_argument("--pairs", type=int, default=50, help="component pairs for pair repair")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    sets = [random_set(rng) for _ in range(args.sets)]
    pairs = [
        (
            random_set(rng, name="P", kind=ComponentKind.FILTERING, max_rules=10),
            random_set(rng, name="S", kind=ComponentKind.ALERTING, max_rules=6),
        )
        for _ in range(args.pairs)
    ]

    report(
        "tree build (specificity)",
        timed(build_rdt, ((rs, ConflictPolicy.SPECIFICITY) for rs in sets)),
    )
    report(
        "tree build (first-match)",
        timed(build_rdt, ((rs, ConflictPolicy.FIRST_MATCH) for rs in sets)),
    )
    report("single-set correction", timed(correct_ruleset, ((rs,) for rs in sets)))
    report("pair repair", timed(correct_pair, pairs))


if __name__ == "__main__":
    main()
