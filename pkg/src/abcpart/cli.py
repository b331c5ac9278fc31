"""Command-line front end.

Exit codes: 0 when the computation finished (and, for check verbs, nothing
was found), 1 when a witness or violation was found, 2 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from abcpart import io, participation, sequential
from abcpart.errors import AbcError
from abcpart.generators import (GRAPH_LIBRARY, concurrence_profile, indset_reduction,
                                mes_unrep_instance, planted_rx3c, rx3c_reduction,
                                noshow_family)
from abcpart.laminar import is_laminar, laminar_forest, random_laminar
from abcpart.model import ElectionInstance, Outcome, fmt_rational
from abcpart.rules import compute_outcome, is_sequential, parse_rule, rule_label
from abcpart.scoring import builtin_scoring

EXIT_OK, EXIT_FOUND, EXIT_ERROR = 0, 1, 2


def _jsonable(x):
    from fractions import Fraction

    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _emit(args, data: dict, text: str):
    if args.format == "json":
        print(json.dumps(_jsonable(data), indent=1, sort_keys=True))
    else:
        print(text)


def _committee_text(w, labels=None) -> str:
    name = (lambda c: labels[c]) if labels else str
    return "{" + ", ".join(name(c) for c in w) + "}"


def _outcome_data(outcome: Outcome) -> dict:
    return {
        "committees": [list(w) for w in outcome.canonical()],
        "flags": sorted(outcome.flags),
        "partial": outcome.partial,
    }


def _outcome_text(outcome: Outcome, labels=None) -> str:
    lines = [_committee_text(w, labels) for w in outcome.canonical()]
    if outcome.flags:
        lines.append("flags: " + ", ".join(sorted(outcome.flags)))
    if outcome.partial:
        lines.append("partial: committees may be smaller than k")
    return "\n".join(lines)


def _load(args) -> ElectionInstance:
    return io.read_profile(args.profile, getattr(args, "k", None))


def _caps(args) -> dict:
    return {"max_subsets": args.max_subsets, "max_branches": args.max_branches}


def _tracer():
    def on_step(state, c, ties, cost):
        depth = len(state.chosen)
        value = "-" if cost is None else fmt_rational(cost)
        chosen = ",".join(str(x) for x in sorted(state.chosen))
        print(f"[trace] depth={depth} phase={state.phase} chosen={{{chosen}}} "
              f"pick={c} level={value} ties={list(ties)}", file=sys.stderr)
    return on_step


def cmd_elect(args) -> int:
    instance = _load(args)
    rule = parse_rule(args.rule)
    on_step = _tracer() if args.trace and is_sequential(rule) else None
    if is_sequential(rule):
        result = sequential.search(rule, instance, max_branches=args.max_branches, on_step=on_step)
        outcome = result.outcome
        data = _outcome_data(outcome)
        data["sequences"] = [list(result.sequences[frozenset(w)]) for w in outcome.canonical()]
    else:
        outcome = compute_outcome(rule, instance, **_caps(args))
        data = _outcome_data(outcome)
    data.update({"rule": rule_label(rule), "k": instance.k})
    _emit(args, data, _outcome_text(outcome, instance.profile.labels))
    return EXIT_OK


def cmd_participation(args) -> int:
    instance = _load(args)
    rule = parse_rule(args.rule)
    caps = _caps(args)
    if args.unrepresented:
        w = participation.unrepresented_check(rule, instance, **caps)
        witnesses = [w] if w else []
    elif args.group is not None:
        w = participation.benefits_by_abstaining(rule, instance, args.group, args.count, **caps)
        witnesses = [w] if w else []
    elif args.group_size > 1:
        witnesses = participation.scan_group_participation(rule, instance, args.group_size,
                                                           threads=args.threads, **caps)
    else:
        witnesses = participation.scan_participation(rule, instance, threads=args.threads, **caps)
    data = {"rule": rule_label(rule), "witnesses": [w.to_dict() for w in witnesses]}
    text = "\n".join(participation.witness_summary(w) for w in witnesses) or "no witness"
    _emit(args, data, text)
    return EXIT_FOUND if witnesses else EXIT_OK


def _read_claimed(path) -> list:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data["committees"]
    return [frozenset(w) for w in data]


def cmd_verify(args) -> int:
    instance = _load(args)
    rule = parse_rule(args.rule)
    claimed = _read_claimed(args.claimed)
    ok = participation.is_outcome(rule, instance, claimed, **_caps(args))
    _emit(args, {"rule": rule_label(rule), "is_outcome": ok}, "outcome confirmed" if ok else "outcome differs")
    return EXIT_OK if ok else EXIT_FOUND


def cmd_robustness(args) -> int:
    instance = _load(args)
    rule = parse_rule(args.rule)
    change = participation.single_approval_robustness(rule, instance, **_caps(args))
    if change is None:
        _emit(args, {"rule": rule_label(rule), "change": None}, "no single approval changes the outcome")
        return EXIT_OK
    text = f"{change.action} candidate {change.candidate} for one voter of group {change.group}"
    _emit(args, {"rule": rule_label(rule), "change": change.to_dict()}, text)
    return EXIT_FOUND


def cmd_check_laminar(args) -> int:
    instance = _load(args)
    ok = is_laminar(instance.profile)
    data = {"laminar": ok}
    if ok:
        forest = laminar_forest(instance.profile)
        dot = forest.to_dot(instance.profile.labels)
        data["dot"] = dot
        if args.dot:
            Path(args.dot).write_text(dot)
    _emit(args, data, "laminar" if ok else "not laminar")
    return EXIT_OK if ok else EXIT_FOUND


def cmd_axiom_scan(args) -> int:
    instance = _load(args)
    rule = parse_rule(args.rule)
    if not is_sequential(rule):
        raise AbcError("axioms on query functions need a sequential rule")
    profile, k = instance.profile, instance.k
    standard = sequential.check_standardness(rule, instance)
    violations = []
    premises = 0
    for length in range(args.depth + 1):
        for seq in _sequences(profile.m, length):
            for c in range(profile.m):
                for d in range(profile.m):
                    verdict = sequential.check_concurrence(rule, profile, k, seq, c, d)
                    if verdict != "premise_fails":
                        premises += 1
                    if verdict == "violated":
                        violations.append({"sequence": list(seq), "c": c, "d": d})
    data = {"rule": rule_label(rule), "standard": standard,
            "concurrence_checked": premises, "concurrence_violations": violations}
    text = f"standard: {standard}\nconcurrence: {premises} applicable cases, {len(violations)} violated"
    _emit(args, data, text)
    return EXIT_OK if standard and not violations else EXIT_FOUND


def _sequences(m, length):
    import itertools

    return itertools.permutations(range(m), length)


def cmd_generate(args) -> int:
    kind = args.kind
    comments = []
    if kind == "concurrence":
        instance = concurrence_profile()
    elif kind == "noshow":
        red = noshow_family(args.k, args.lam)
        instance = red.instance
        comments.append(f"abstainer group {red.abstainer}")
    elif kind == "mes-unrep":
        red = mes_unrep_instance()
        instance = red.instance
        comments.append(f"abstainer group {red.abstainer}")
    elif kind == "indset":
        if args.graph in GRAPH_LIBRARY:
            graph = GRAPH_LIBRARY[args.graph]()
        else:
            graph = io.read_graph(args.graph)
        s = builtin_scoring(args.scoring, max(graph.n + 4, 3))
        red = indset_reduction(graph, args.t, s)
        instance = red.instance
        comments.append(f"abstainer group {red.abstainer}; alpha={red.params['alpha']}")
    elif kind == "rx3c":
        if args.input:
            source = io.read_rx3c(args.input)
        else:
            source = planted_rx3c(args.t, args.seed, args.scramble)
        red = rx3c_reduction(source)
        instance = red.instance
        comments.append(f"abstainer group {red.abstainer}")
    elif kind == "rx3c-source":
        sys.stdout.write(io.format_rx3c(planted_rx3c(args.t, args.seed, args.scramble)))
        return EXIT_OK
    elif kind == "laminar":
        profile = random_laminar(args.m, args.depth, args.branching, (1, args.max_weight), args.seed)
        instance = ElectionInstance(profile, args.k if args.k else max(1, args.m // 2))
    else:
        raise AbcError(f"unknown generator {kind}")
    if args.format == "json":
        print(io.format_profile_json(instance))
    else:
        sys.stdout.write(io.format_profile_text(instance, comments))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abcpart", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-branches", type=int, default=sequential.DEFAULT_MAX_BRANCHES)
    common.add_argument("--max-subsets", type=int, default=10**6)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="verb", required=True)

    def with_profile(p, rule=True):
        if rule:
            p.add_argument("--rule", required=True)
        p.add_argument("--k", type=int, default=None, help="override the committee size in the file")
        p.add_argument("profile", help="profile file, or - for stdin")

    p = sub.add_parser("elect", parents=[common])
    with_profile(p)
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_elect)

    p = sub.add_parser("participation", parents=[common])
    with_profile(p)
    p.add_argument("--group", type=int)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--unrepresented", action="store_true")
    p.add_argument("--group-size", type=int, default=1)
    p.set_defaults(func=cmd_participation)

    p = sub.add_parser("verify-outcome", parents=[common])
    with_profile(p)
    p.add_argument("claimed", help="JSON list of committees")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("robustness", parents=[common])
    with_profile(p)
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("check-laminar", parents=[common])
    with_profile(p, rule=False)
    p.add_argument("--dot", help="write the forest in DOT format to this file")
    p.set_defaults(func=cmd_check_laminar)

    p = sub.add_parser("axiom-scan", parents=[common])
    with_profile(p)
    p.add_argument("--depth", type=int, default=1, help="longest prefix sequence to test")
    p.set_defaults(func=cmd_axiom_scan)

    p = sub.add_parser("generate", parents=[common])
    p.add_argument("kind", choices=("concurrence", "noshow", "mes-unrep", "indset", "rx3c",
                                    "rx3c-source", "laminar"))
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--lambda", dest="lam", type=int, default=1)
    p.add_argument("--graph", default="k4", help="edge-list file or one of " + ", ".join(GRAPH_LIBRARY))
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--scoring", choices=("pav", "ccav"), default="pav")
    p.add_argument("--input", help="RX3C family file (one set per line)")
    p.add_argument("--scramble", type=int, default=None)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--max-weight", type=int, default=3)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (AbcError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
