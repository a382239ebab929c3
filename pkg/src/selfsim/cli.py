"""Command-line front end.

Exit codes: 0 on success (including definite "nontrivial"/"different"
answers), 1 on domain errors or bad usage, 2 when a verdict stayed
undecided or a budget ran out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import catalogue
from .abelian import (
    PostCriticalData,
    predicted_rational_formula,
    rational_map_abelianization,
    vg_abelianization,
)
from .limitspace import moore_diagram, quotient_graph, schreier_graph
from .nucleus import (
    Budget,
    Nucleus,
    NotContractingError,
    compute_nucleus,
    is_level_transitive,
    is_regular,
    is_self_replicating,
)
from .presentation import UndecidedError, emit_presentation, verify_relator
from .ssgroup import GroupDef, perm_to_cycles
from .vg import Table
from .words import Antichain, m_invariant, parse_word


class UndecidedExit(Exception):
    """Raised to signal exit code 2 from subcommands."""


def _budget(args) -> Budget:
    return Budget(max_states=args.budget_states, max_depth=args.budget_depth)


def _cache_path(spec: str) -> str | None:
    if os.path.exists(spec):
        return spec + ".nucleus.json"
    return None


def _nucleus_for(group: GroupDef, spec: str, args) -> Nucleus:
    path = None if getattr(args, "no_cache", False) else _cache_path(spec)
    if path and os.path.exists(path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            if data.get("group") == group.content_hash():
                return Nucleus.from_json(group, data)
        except (OSError, ValueError, KeyError):
            pass  # stale or unreadable cache: recompute
    nucleus = compute_nucleus(group, _budget(args))
    if path:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(nucleus.to_json(), fh)
        except OSError:
            pass
    return nucleus


def _load_table(group: GroupDef, text: str) -> Table:
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    return Table.from_json(group, json.loads(text))


def cmd_catalogue(args) -> None:
    for name, group in catalogue.builtin_groups().items():
        print(f"# {name}")
        print(group.to_text())


def cmd_nucleus(args) -> None:
    group = catalogue.resolve_group(args.group)
    nucleus = _nucleus_for(group, args.group, args)
    if args.json:
        print(json.dumps(nucleus.to_json()))
        return
    print(f"nucleus of {args.group}: {len(nucleus)} states")
    for i in nucleus:
        secs = ", ".join(str(nucleus.reps[nucleus.section(i, x)])
                         for x in range(group.d))
        print(f"  {nucleus.reps[i]} = {perm_to_cycles(nucleus.perm(i))}({secs})")


def cmd_check(args) -> None:
    group = catalogue.resolve_group(args.group)
    try:
        nucleus = compute_nucleus(group, _budget(args))
        print(f"contracting: yes ({len(nucleus)} states)")
        print(f"regular: {'yes' if is_regular(nucleus) else 'no'}")
    except NotContractingError as exc:
        print(f"contracting: {exc}")
    print(f"self-replicating (radius {args.radius}): "
          f"{is_self_replicating(group, args.radius)}")
    print(f"level-transitive up to {args.level}: "
          f"{'yes' if is_level_transitive(group, args.level) else 'no'}")


def cmd_wp(args) -> None:
    group = catalogue.resolve_group(args.group)
    verdict = group.is_trivial(group.word(args.word), args.depth_limit)
    if verdict.status == "nontrivial":
        from .words import format_word

        print(f"nontrivial (moves {format_word(verdict.witness)})")
    else:
        print(verdict.status)
    if verdict.status == "undecided":
        raise UndecidedExit


def cmd_vg(args) -> None:
    group = catalogue.resolve_group(args.group)
    if args.verb == "mul":
        t = _load_table(group, args.args[0]) * _load_table(group, args.args[1])
        print(json.dumps(t.to_json()))
    elif args.verb == "inv":
        print(json.dumps(_load_table(group, args.args[0]).inverse().to_json()))
    elif args.verb == "eq":
        status = _load_table(group, args.args[0]).equals(
            _load_table(group, args.args[1]), args.depth_limit)
        print(status)
        if status == "undecided":
            raise UndecidedExit
    elif args.verb == "canon":
        print(json.dumps(_load_table(group, args.args[0]).canonical_form().to_json()))
    elif args.verb == "apply":
        t = _load_table(group, args.args[0])
        from .words import format_word

        print(format_word(t.apply(parse_word(args.args[1]))))
    else:
        raise ValueError(f"unknown vg verb {args.verb!r}")


def cmd_abel(args) -> None:
    group = catalogue.resolve_group(args.group)
    print(vg_abelianization(group, budget=_budget(args)))


def cmd_abel_rational(args) -> None:
    text = args.portrait
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    portrait = PostCriticalData.from_json(json.loads(text))
    print(rational_map_abelianization(portrait))
    if args.predict:
        k, l = args.predict
        print(f"predicted: {predicted_rational_formula(k, l, args.odd_exception)}")


def cmd_present(args) -> None:
    group = catalogue.resolve_group(args.group)
    bundle = emit_presentation(group, _budget(args))
    if args.json:
        print(json.dumps(bundle.to_json()))
        return
    print(f"generators beyond the prefix-replacement part: {len(bundle.s1)}")
    print("  " + " ".join(bundle.s1))
    for fam in ("C", "N", "S"):
        rels = bundle.relators[fam]
        line = f"family {fam}: {len(rels)} relators"
        if args.verify:
            ok = sum(verify_relator(r) for r in rels)
            line += f" ({ok} verify as identity)"
        print(line)


def cmd_limit(args) -> None:
    group = catalogue.resolve_group(args.group)
    nucleus = _nucleus_for(group, args.group, args)
    q = quotient_graph(nucleus, args.level)
    if args.format == "dot":
        print(q.to_dot())
    else:
        print(json.dumps(q.to_json()))


def cmd_moore(args) -> None:
    group = catalogue.resolve_group(args.group)
    nucleus = _nucleus_for(group, args.group, args)
    md = moore_diagram(nucleus)
    print(md.to_dot() if args.format == "dot" else json.dumps(md.to_json()))


def cmd_schreier(args) -> None:
    group = catalogue.resolve_group(args.group)
    s = schreier_graph(group, args.level)
    if args.format == "dot":
        print(s.to_dot())
    else:
        print(json.dumps(s.to_json()))


def cmd_m_invariant(args) -> None:
    words = [parse_word(s) for s in json.loads(args.antichain)]
    ac = Antichain(words, args.alphabet)
    print(m_invariant(ac.words, args.alphabet))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfsim",
        description="Self-similar groups, their table groups, and limit spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=True):
        p.add_argument("group", help="catalogue name, kneading:BITS, trivial:D, or file")
        if budget:
            p.add_argument("--budget-states", type=int, default=5000)
            p.add_argument("--budget-depth", type=int, default=64)
            p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("catalogue", help="print the built-in groups")
    p.set_defaults(func=cmd_catalogue)

    p = sub.add_parser("nucleus", help="compute and print the nucleus")
    common(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_nucleus)

    p = sub.add_parser("check", help="structural predicates")
    common(p)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--level", type=int, default=6)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("wp", help="word problem: is the element trivial")
    common(p, budget=False)
    p.add_argument("word")
    p.add_argument("--depth-limit", type=int, default=10_000)
    p.set_defaults(func=cmd_wp)

    p = sub.add_parser("vg", help="table arithmetic (JSON tables or @file)")
    common(p, budget=False)
    p.add_argument("verb", choices=["mul", "inv", "eq", "canon", "apply"])
    p.add_argument("args", nargs="+")
    p.add_argument("--depth-limit", type=int, default=10_000)
    p.set_defaults(func=cmd_vg)

    p = sub.add_parser("abel", help="abelianization of the table group")
    common(p)
    p.set_defaults(func=cmd_abel)

    p = sub.add_parser("abel-rational", help="abelianization from a portrait")
    p.add_argument("portrait", help="portrait JSON or @file")
    p.add_argument("--predict", nargs=2, type=int, metavar=("K", "L"))
    p.add_argument("--odd-exception", action="store_true")
    p.set_defaults(func=cmd_abel_rational)

    p = sub.add_parser("present", help="emit the finite-presentation data")
    common(p)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("limit", help="level quotient of the limit space")
    common(p)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--format", choices=["dot", "json"], default="json")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("moore", help="nucleus automaton diagram")
    common(p)
    p.add_argument("--format", choices=["dot", "json"], default="json")
    p.set_defaults(func=cmd_moore)

    p = sub.add_parser("schreier", help="level orbit graph")
    common(p, budget=False)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--format", choices=["dot", "json"], default="json")
    p.set_defaults(func=cmd_schreier)

    p = sub.add_parser("m-invariant", help="cylinder-count residue of an antichain")
    p.add_argument("--alphabet", type=int, required=True)
    p.add_argument("antichain", help='JSON list of words, e.g. \'["0","10"]\'')
    p.set_defaults(func=cmd_m_invariant)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        args.func(args)
        return 0
    except (NotContractingError, UndecidedError, UndecidedExit) as exc:
        if str(exc):
            print(str(exc), file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
