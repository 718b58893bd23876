"""Command-line front door: validate and desugar KBs, run queries with
printed explanation trees, and launch the HTTP service.

Exit codes: 0 on success, 1 for domain errors (diagnostics, parse
failures), 2 for environment errors (missing files, occupied ports).
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import corpus
from .engine import Goal, SolveLimits, solve
from .errors import LexlogError, ParseError
from .explain import (
    ProofNode,
    build_derivation_tree,
    build_proof_view,
    derivation_tree_export,
    instantiate_refutation,
    proof_view_export,
)
from .kb import assemble_program, compile_program, facts_to_rules
from .language import pad_atoms, validate_program
from .parser import parse_goal, parse_program
from .render import render_atom, render_rule


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _EnvironmentExit(f"cannot read {path}: {exc}") from exc


class _EnvironmentExit(Exception):
    pass


def _load_kb(kb_path: Optional[str]):
    if kb_path is None:
        return corpus.builtin_program()
    return parse_program(_read(kb_path))


# ---------------------------------------------------------------------------
# check


def cmd_check(args: argparse.Namespace) -> int:
    parsed = _load_kb(args.kb)
    diagnostics = validate_program(parsed)
    if diagnostics:
        stream = sys.stderr if args.emit else sys.stdout
        for d in diagnostics:
            print(d, file=stream)
        print(f"{len(diagnostics)} diagnostic(s)", file=stream)
        return 1
    kb = compile_program(parsed)
    if args.emit:
        from .kb import pure_program_source

        print(pure_program_source(kb), end="")
        return 0
    print(f"declarations: {len(parsed.decls)}")
    for rule_id, count in kb.expansion_counts:
        rule = next(r for r in kb.parsed.rules if r.id == rule_id)
        label = "expansions" if count != 1 else "expansion"
        print(f"rule {rule_id} ({rule.head.source_form()}): {count} {label}")
    print(f"facts: {len(kb.fact_rules)}")
    print(f"total pure rules: {len(kb.rules)}")
    print("ok")
    return 0


# ---------------------------------------------------------------------------
# query


def _print_proof(node: ProofNode, decls, rules_by_id, indent: int, out: list[str]) -> None:
    mark = "  [fact]" if node.is_fact else ""
    out.append("  " * indent + render_atom(node.atom, decls).text + mark)
    for alt in node.alternatives:
        rule_text = render_rule(rules_by_id[alt.rule_id], decls).text
        out.append("  " * (indent + 1) + f"via {alt.rule_id}: {rule_text}")
        for premise in alt.premises:
            _print_proof(premise, decls, rules_by_id, indent + 2, out)


def cmd_query(args: argparse.Namespace) -> int:
    parsed = _load_kb(args.kb)
    diagnostics = validate_program(parsed)
    if diagnostics:
        for d in diagnostics:
            print(d, file=sys.stderr)
        return 1
    kb = compile_program(parsed)
    decls = kb.decl_map()

    case_atoms = []
    for path in args.facts or []:
        case = parse_program(_read(path))
        if case.rules or case.decls:
            print(f"{path}: fact files must contain facts only", file=sys.stderr)
            return 1
        bad = validate_program(
            type(case)(decls=kb.parsed.decls, facts=case.facts,
                       fact_positions=case.fact_positions)
        )
        if bad:
            for d in bad:
                print(f"{path}: {d}", file=sys.stderr)
            return 1
        case_atoms.extend(case.facts)

    goal_atoms = parse_goal(args.query)
    if len(goal_atoms) != 1:
        print("queries take a single atom", file=sys.stderr)
        return 1

    fact_rules = facts_to_rules(
        pad_atoms(tuple(case_atoms), decls, shared_scope=False),
        start=len(kb.fact_rules) + 1,
    )
    program = assemble_program(kb, fact_rules)
    user_vars = tuple(dict.fromkeys(
        name for a in goal_atoms for name in a.variables()
    ))
    padded_goal = Goal(pad_atoms(goal_atoms, decls))
    limits = SolveLimits(
        max_depth=args.max_depth, max_refutations=args.max_refutations
    )
    result = solve(padded_goal, program, limits, answer_vars=user_vars)

    views = []
    for entry in result.entries:
        instantiated = [instantiate_refutation(r) for r in entry.refutations]
        answer_atom = instantiated[0].query.atoms[0]
        views.append((entry, instantiated, answer_atom))

    if args.json:
        rules_by_id = kb.rules_by_id()
        doc = {
            "goal": args.query,
            "truncated": result.truncated,
            "limits_hit": list(result.limits_hit),
            "answers": [],
        }
        for i, (entry, instantiated, answer_atom) in enumerate(views):
            view = build_proof_view(instantiated, answer_atom)
            tree = build_derivation_tree(instantiated)
            doc["answers"].append({
                "id": f"a{i + 1}",
                "rendered": render_atom(answer_atom, decls).text,
                "atom": answer_atom.source_form(),
                "refutations": len(entry.refutations),
                "proof": proof_view_export(
                    view,
                    lambda a: render_atom(a, decls).text,
                    lambda rid: render_rule(rules_by_id[rid], decls).text,
                ),
                "tree": derivation_tree_export(
                    tree,
                    lambda g: " and ".join(
                        render_atom(a, decls).text for a in g.atoms
                    ) or "nothing left to prove",
                ),
            })
        print(json.dumps(doc, ensure_ascii=False, indent=2))
        return 0

    total = result.refutation_count()
    noun = "answer" if len(views) == 1 else "answers"
    summary = [f"{len(views)} {noun}", f"{total} derivations"]
    summary += [render_atom(atom, decls).text for _, _, atom in views]
    print("; ".join(summary))
    if result.truncated:
        print(f"note: search truncated ({', '.join(result.limits_hit)})")
    for i, (entry, instantiated, answer_atom) in enumerate(views):
        print()
        print(
            f"answer {i + 1}: {render_atom(answer_atom, decls).text} "
            f"({len(entry.refutations)} derivations)"
        )
        view = build_proof_view(instantiated, answer_atom)
        lines: list[str] = []
        _print_proof(view, decls, kb.rules_by_id(), 1, lines)
        print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# serve


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import create_app

    app = create_app(kb_path=args.kb, data_dir=args.data_dir)

    # Probe the port first so an occupied port is a clean exit, not a
    # traceback out of the server loop.
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 2
    finally:
        probe.close()

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexlog",
        description="Explainable Datalog inference over statute-style rule bases.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="validate a KB and report expansion counts")
    check.add_argument("--kb", metavar="PATH", help="KB file (default: built-in)")
    check.add_argument(
        "--emit", action="store_true",
        help="print the desugared pure-Datalog program instead of the report",
    )
    check.set_defaults(func=cmd_check)

    query = sub.add_parser("query", help="run a query and print explanations")
    query.add_argument("--kb", metavar="PATH", help="KB file (default: built-in)")
    query.add_argument(
        "--facts", metavar="PATH", action="append", help="fact file (repeatable)"
    )
    query.add_argument("--query", required=True, metavar="GOAL", help='e.g. "BrokenLaw(P, X, T)"')
    query.add_argument("--json", action="store_true", help="emit the structured export")
    defaults = SolveLimits()
    query.add_argument("--max-depth", type=int, default=defaults.max_depth)
    query.add_argument("--max-refutations", type=int, default=defaults.max_refutations)
    query.set_defaults(func=cmd_query)

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--kb", metavar="PATH", help="KB file (default: built-in)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data-dir", default="lexlog_sessions", metavar="PATH")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _EnvironmentExit as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except LexlogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
