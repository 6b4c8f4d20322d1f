"""Command-line front end.

Exit codes are uniform across subcommands: 0 means nothing to report
(clean, interoperable, or a successful evaluation), 1 means findings were
reported (anomalies, a non-interoperable pair, a packet no rule matches),
and 2 means the inputs themselves were unusable (parse errors, schema
mismatches, a packet naming unknown attributes, or overlapping rules where
relevant input is required).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import click

from .correction import correct_pair, correct_ruleset
from .dtree import dump_tree
from .interop import (
    TopologyError,
    check_positioning,
    detect_inter,
    extend_schema,
    parse_topology,
    union_schema,
)
from .intra import detect_intra, is_relevant_ruleset
from .model import RuleSet, SchemaError, Severity
from .oracle import Semantics, evaluate_rule
from .rdt import ConflictPolicy, build_rdt
from .report import Report, input_entry, render_json, render_text
from .ruleio import (
    RuleFileError,
    parse_point,
    parse_ruleset,
    ruleset_from_dict,
    save_ruleset,
    serialize_ruleset,
)
from .values import ValueSetError

_POLICIES = {
    "specificity": ConflictPolicy.SPECIFICITY,
    "first-match": ConflictPolicy.FIRST_MATCH,
}

_INPUT_ERRORS = (RuleFileError, SchemaError, ValueSetError, TopologyError)


@dataclass
class Options:
    policy: ConflictPolicy
    fmt: str
    assume_relevant: bool
    dump_tree: bool


@click.group()
@click.option(
    "--policy",
    type=click.Choice(sorted(_POLICIES)),
    default="specificity",
    show_default=True,
    help="How conflicting rules are resolved when building trees.",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
    help="Report format.",
)
@click.option(
    "--assume-relevant",
    is_flag=True,
    help="Skip the overlap pre-check on commands that need relevant input.",
)
@click.option("--dump-tree", is_flag=True, help="Include the decision tree in the report.")
@click.pass_context
def main(ctx: click.Context, policy: str, fmt: str, assume_relevant: bool, dump_tree: bool):
    """Analyze, correct, and align ordered security rule sets."""
    ctx.obj = Options(
        policy=_POLICIES[policy],
        fmt=fmt,
        assume_relevant=assume_relevant,
        dump_tree=dump_tree,
    )


def _fail(ctx: click.Context, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    ctx.exit(2)


def _load(ctx: click.Context, path: str) -> tuple[RuleSet, dict]:
    p = Path(path)
    try:
        data = p.read_bytes()
        text = data.decode("utf-8")
        if p.suffix == ".json":
            rs = ruleset_from_dict(json.loads(text))
        else:
            rs = parse_ruleset(text, source=str(p))
    except OSError as exc:
        _fail(ctx, str(exc))
    except json.JSONDecodeError as exc:
        _fail(ctx, f"{p}: {exc}")
    except _INPUT_ERRORS as exc:
        _fail(ctx, str(exc))
    return rs, input_entry(str(p), data)


def _gate_relevant(ctx: click.Context, rs: RuleSet, opts: Options) -> None:
    if opts.assume_relevant or is_relevant_ruleset(rs):
        return
    _fail(
        ctx,
        f"rules of {rs.component_name!r} overlap; run 'policytree correct' first "
        "or pass --assume-relevant",
    )


def _emit(report: Report, opts: Options) -> None:
    text = render_json(report) if opts.fmt == "json" else render_text(report)
    click.echo(text, nl=False)


def _plural(n: int, noun: str) -> str:
    return f"{n} {noun}" if n == 1 else f"{n} {noun}s"


def _verdict(findings: list[dict]) -> str:
    if not findings:
        return "clean"
    errors = sum(1 for f in findings if f["severity"] == Severity.ERROR.value)
    warnings = len(findings) - errors
    return (
        f"{_plural(len(findings), 'finding')} "
        f"({_plural(errors, 'error')}, {_plural(warnings, 'warning')})"
    )


def _finish(ctx: click.Context, report: Report, opts: Options) -> None:
    _emit(report, opts)
    ctx.exit(1 if report.findings else 0)


def _intra_findings(rs: RuleSet) -> list[dict]:
    return [
        {
            "kind": a.kind.value,
            "severity": a.severity.value,
            "earlier": f"r{a.earlier}",
            "later": f"r{a.later}",
        }
        for a in detect_intra(rs)
    ]


def _inter_findings(preceding: RuleSet, following: RuleSet) -> list[dict]:
    return [
        {
            "kind": a.kind.value,
            "severity": a.severity.value,
            "preceding": f"{preceding.component_name}:r{a.preceding_rule}",
            "following": f"{following.component_name}:r{a.following_rule}",
        }
        for a in detect_inter(preceding, following)
    ]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@main.command()
@click.argument("rules_file", type=click.Path())
@click.pass_context
def lint(ctx: click.Context, rules_file: str):
    """Report redundancy, shadowing, generalization, and correlation."""
    opts: Options = ctx.obj
    rs, entry = _load(ctx, rules_file)
    report = Report(command="lint", policy=opts.policy.value, inputs=[entry])
    report.findings = _intra_findings(rs)
    report.verdict = _verdict(report.findings)
    if opts.dump_tree:
        report.tree = dump_tree(build_rdt(rs, opts.policy).tree)
    _finish(ctx, report, opts)


@main.command()
@click.argument("rules_file", type=click.Path())
@click.option("-o", "--output", type=click.Path(), default=None, help="Corrected rules file.")
@click.pass_context
def correct(ctx: click.Context, rules_file: str, output: str | None):
    """Rewrite a rule set as disjoint rules free of internal anomalies."""
    opts: Options = ctx.obj
    rs, entry = _load(ctx, rules_file)
    corrected = correct_ruleset(rs, opts.policy)
    if output is None:
        click.echo(serialize_ruleset(corrected), nl=False)
        ctx.exit(1 if detect_intra(rs) else 0)
    save_ruleset(Path(output), corrected)
    report = Report(command="correct", policy=opts.policy.value, inputs=[entry])
    report.findings = _intra_findings(rs)
    report.verdict = _verdict(report.findings)
    report.outputs = [{"path": output, "rules": len(corrected.rules)}]
    if opts.dump_tree:
        report.tree = dump_tree(build_rdt(rs, opts.policy).tree)
    _finish(ctx, report, opts)


@main.command(name="check-interop")
@click.argument("preceding_file", type=click.Path())
@click.argument("following_file", type=click.Path())
@click.pass_context
def check_interop(ctx: click.Context, preceding_file: str, following_file: str):
    """Check a preceding/following pair for cross-component anomalies."""
    opts: Options = ctx.obj
    preceding, p_entry = _load(ctx, preceding_file)
    following, f_entry = _load(ctx, following_file)
    _gate_relevant(ctx, preceding, opts)
    _gate_relevant(ctx, following, opts)
    report = Report(
        command="check-interop", policy=opts.policy.value, inputs=[p_entry, f_entry]
    )
    try:
        target = union_schema(preceding.schema, following.schema)
        p_ext = extend_schema(preceding, target)
        f_ext = extend_schema(following, target)
    except _INPUT_ERRORS as exc:
        _fail(ctx, str(exc))
    report.findings = _inter_findings(p_ext, f_ext)
    report.verdict = "interoperable" if not report.findings else (
        f"not interoperable ({_verdict(report.findings)})"
    )
    _finish(ctx, report, opts)


@main.command(name="fix-interop")
@click.argument("preceding_file", type=click.Path())
@click.argument("following_file", type=click.Path())
@click.option(
    "-o",
    "--output-dir",
    type=click.Path(),
    required=True,
    help="Directory for the corrected rule files.",
)
@click.pass_context
def fix_interop(ctx: click.Context, preceding_file: str, following_file: str, output_dir: str):
    """Correct both components so the pair interoperates.

    A component with overlapping rules is first corrected on its own; then
    both are merged, re-split, and written back as <component>-corrected
    files whose rule origins trace to the input rules.
    """
    opts: Options = ctx.obj
    preceding, p_entry = _load(ctx, preceding_file)
    following, f_entry = _load(ctx, following_file)
    report = Report(
        command="fix-interop", policy=opts.policy.value, inputs=[p_entry, f_entry]
    )
    for rs, tag in ((preceding, "preceding"), (following, "following")):
        for f in _intra_findings(rs):
            report.add_finding(
                f["kind"],
                f["severity"],
                component=rs.component_name,
                earlier=f["earlier"],
                later=f["later"],
                role=tag,
            )
    p_c = preceding if is_relevant_ruleset(preceding) else correct_ruleset(preceding, opts.policy)
    f_c = following if is_relevant_ruleset(following) else correct_ruleset(following, opts.policy)
    try:
        target = union_schema(p_c.schema, f_c.schema)
        report.findings.extend(
            _inter_findings(extend_schema(p_c, target), extend_schema(f_c, target))
        )
        pair = correct_pair(p_c, f_c, opts.policy)
    except _INPUT_ERRORS as exc:
        _fail(ctx, str(exc))
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for corrected, source in ((pair.preceding, preceding_file), (pair.following, following_file)):
        suffix = Path(source).suffix or ".rules"
        dest = out / f"{corrected.component_name}-corrected{suffix}"
        save_ruleset(dest, corrected)
        report.outputs.append({"path": str(dest), "rules": len(corrected.rules)})
    report.verdict = (
        "already interoperable" if not report.findings else _verdict(report.findings)
    )
    if opts.dump_tree:
        report.tree = dump_tree(pair.rdt.tree)
    _finish(ctx, report, opts)


@main.command(name="check-topology")
@click.argument("topology_file", type=click.Path())
@click.pass_context
def check_topology(ctx: click.Context, topology_file: str):
    """Validate component ordering (and pairwise interop) along paths."""
    opts: Options = ctx.obj
    p = Path(topology_file)
    try:
        data = p.read_bytes()
        topo = parse_topology(data.decode("utf-8"), source=str(p))
    except OSError as exc:
        _fail(ctx, str(exc))
    except TopologyError as exc:
        _fail(ctx, str(exc))
    report = Report(command="check-topology", inputs=[input_entry(str(p), data)])
    for v in check_positioning(topo):
        report.add_finding(
            "mis-positioning",
            Severity.ERROR.value,
            path=v.path,
            alerting=v.alerting,
            filtering=v.filtering,
        )

    loaded: dict[str, RuleSet | None] = {}
    for name, comp in sorted(topo.components.items()):
        if comp.rules_path is None:
            continue
        rules_path = p.parent / comp.rules_path
        rs, entry = _load(ctx, str(rules_path))
        report.inputs.append(entry)
        if not opts.assume_relevant and not is_relevant_ruleset(rs):
            report.add_finding(
                "component-not-relevant", Severity.ERROR.value, component=name
            )
            rs = None
        loaded[name] = rs
    for path_name, members in topo.paths:
        for left, right in zip(members, members[1:]):
            p_rs, f_rs = loaded.get(left), loaded.get(right)
            if p_rs is None or f_rs is None:
                continue
            try:
                target = union_schema(p_rs.schema, f_rs.schema)
                findings = _inter_findings(
                    extend_schema(p_rs, target), extend_schema(f_rs, target)
                )
            except _INPUT_ERRORS as exc:
                _fail(ctx, str(exc))
            for f in findings:
                report.add_finding(
                    f["kind"],
                    f["severity"],
                    path=path_name,
                    preceding=f["preceding"],
                    following=f["following"],
                )
    report.verdict = "clean" if not report.findings else _verdict(report.findings)
    _finish(ctx, report, opts)


@main.command(name="eval")
@click.argument("rules_file", type=click.Path())
@click.option(
    "--packet",
    "packet_arg",
    required=True,
    help="Comma-separated attribute=value pairs covering every attribute.",
)
@click.option(
    "--semantics",
    type=click.Choice([s.value for s in Semantics]),
    default=Semantics.FIRST_MATCH.value,
    show_default=True,
    help="Which rule wins when several match.",
)
@click.pass_context
def eval_packet(ctx: click.Context, rules_file: str, packet_arg: str, semantics: str):
    """Decide one packet against a rule set."""
    opts: Options = ctx.obj
    rs, entry = _load(ctx, rules_file)
    packet: dict[str, int | str] = {}
    try:
        for item in packet_arg.split(","):
            name, _, token = item.partition("=")
            name, token = name.strip(), token.strip()
            if not name or not token:
                raise ValueSetError(f"malformed packet field {item.strip()!r}")
            attr = rs.schema.attribute(name)
            packet[attr.name] = parse_point(token, attr)
    except (KeyError, *_INPUT_ERRORS) as exc:
        _fail(ctx, f"bad --packet: {exc}")
    missing = set(rs.schema.condition_names) - set(packet)
    if missing:
        _fail(ctx, f"bad --packet: missing attributes {sorted(missing)}")
    report = Report(command="eval", inputs=[entry])
    rule = evaluate_rule(rs, packet, Semantics(semantics))
    if rule is None:
        report.result = {"decision": "no-match"}
        report.verdict = "no rule matches this packet"
        report.findings = [{"kind": "unmatched-packet", "severity": "error"}]
    else:
        report.result = {
            "decision": rule.action,
            "rule": f"r{rule.id}",
            "origin": rule.origin,
        }
        report.verdict = f"decision: {rule.action}"
    _finish(ctx, report, opts)


if __name__ == "__main__":
    main()
