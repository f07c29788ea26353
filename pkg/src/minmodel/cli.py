"""Command-line front end.

Exit status: 0 ok, 2 usage error, 3 parse/type/shape error, 4 budget
exceeded, 5 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from .cellular import CellError, cellularize, is_cellular, is_hereditary_cellular, is_semi_cellular
from .kernel import LambdaError, Signature, parse_signature
from .model import Budget, BudgetExceeded, InvariantViolation, Session
from .oracle import enumerate_terms, quotient_classes
from .syntax import ParseError, parse_term, parse_type, print_term

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET, EXIT_INTERNAL = 0, 2, 3, 4, 5


@dataclass(frozen=True)
class RunConfig:
    constants: Signature
    budget: Budget
    format: str = "text"
    seed: int = 0


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_float(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--constants", required=True, help="comma-separated ground constants, e.g. a,b")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    defaults = Budget()
    common.add_argument("--max-nodes", type=_positive, default=defaults.max_nodes)
    common.add_argument("--max-entries", type=_positive, default=defaults.max_entries)
    common.add_argument("--max-candidates", type=_positive, default=defaults.max_candidates)
    common.add_argument("--time-limit", type=_positive_float, default=None, metavar="SECONDS")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="minmodel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="parse, type and normalize a term")
    p.add_argument("term")
    p = sub.add_parser("normalize", parents=[common], help="beta-normal eta-long form")
    p.add_argument("term")
    p = sub.add_parser("cellular", parents=[common], help="cellularity predicates")
    p.add_argument("term")
    p = sub.add_parser("cellularize", parents=[common], help="an equivalent cellular term")
    p.add_argument("term")
    p.add_argument("--verify", action=argparse.BooleanOptionalAction, default=True)
    p = sub.add_parser("reps", parents=[common], help="representative table for a type")
    p.add_argument("--type", required=True)
    p.add_argument("--dedup", action="store_true")
    p = sub.add_parser("decide", parents=[common], help="observational equivalence")
    p.add_argument("left")
    p.add_argument("right")
    p = sub.add_parser("canon", parents=[common], help="canonical class representative")
    p.add_argument("term")
    p = sub.add_parser("classes", parents=[common], help="number of classes at a type")
    p.add_argument("--type", required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force quotient")
    p.add_argument("--max-size", type=_positive, default=8)
    p = sub.add_parser("enumerate", parents=[common], help="closed normal terms up to a size")
    p.add_argument("--type", required=True)
    p.add_argument("--max-size", type=_positive, required=True)
    return parser


def _execute(args, config: RunConfig) -> dict:
    sig = config.constants
    session = Session(config.budget)
    cmd = args.command
    if cmd in ("check", "normalize"):
        t = parse_term(args.term, sig)
        doc = {"term": print_term(t)}
        if cmd == "check":
            doc["type"] = str(t.type)
        return doc
    if cmd == "cellular":
        t = parse_term(args.term, sig)
        return {
            "term": print_term(t),
            "cellular": is_cellular(t),
            "semi_cellular": is_semi_cellular(t),
            "hereditary_cellular": is_hereditary_cellular(t),
        }
    if cmd == "cellularize":
        t = parse_term(args.term, sig)
        out = cellularize(t)
        doc = {"input": print_term(t), "output": print_term(out), "cellular": is_cellular(out)}
        if args.verify:
            verdict = session.decide(t, out, sig)
            doc["equivalent"] = verdict.equivalent
            if not verdict.equivalent:
                raise InvariantViolation(f"cellularize changed the class of {print_term(t)}")
        return doc
    if cmd == "reps":
        ty = parse_type(args.type)
        if args.dedup:
            return {
                "type": str(ty),
                "constants": list(sig),
                "classes": [print_term(r) for r in session.classes(ty, sig)],
            }
        return session.representatives(ty, sig).to_document()
    if cmd == "decide":
        t = parse_term(args.left, sig)
        u = parse_term(args.right, sig)
        return {"left_term": print_term(t), "right_term": print_term(u), **session.decide(t, u, sig).to_document()}
    if cmd == "canon":
        t = parse_term(args.term, sig)
        return {"term": print_term(t), "canonical": print_term(session.canonical_rep(t, sig))}
    if cmd == "classes":
        ty = parse_type(args.type)
        doc = {"type": str(ty), "constants": list(sig), "count": session.count_classes(ty, sig)}
        if args.oracle:
            q = quotient_classes(ty, sig, args.max_size, session=session)
            doc["oracle"] = {
                "size_bound": args.max_size,
                "arg_bound": q.arg_bound,
                "terms": q.terms,
                "decider": q.decider,
                "brute": q.brute,
                "agrees": q.decider == q.brute == doc["count"],
            }
        return doc
    if cmd == "enumerate":
        ty = parse_type(args.type)
        return {"type": str(ty), "terms": [print_term(t) for t in enumerate_terms(ty, sig, args.max_size)]}
    raise AssertionError(cmd)


def _render_text(cmd: str, doc: dict) -> str:
    if cmd == "decide":
        if doc["equivalent"]:
            return "equivalent"
        return "inequivalent\nwitness: {}\nresults: {} vs {}".format(
            " ".join(doc["witness"]), doc["left"], doc["right"]
        )
    if cmd == "classes":
        line = str(doc["count"])
        if "oracle" in doc:
            o = doc["oracle"]
            line += f"\noracle: {o['terms']} terms, decider {o['decider']}, brute {o['brute']}"
        return line
    if cmd == "enumerate":
        return "\n".join(doc["terms"])
    if cmd == "reps" and "classes" in doc:
        return "\n".join(doc["classes"])
    if cmd == "reps":
        return "\n".join(e["term"] for e in doc["entries"])
    return "\n".join(f"{k}: {v}" for k, v in doc.items())


def run(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        config = RunConfig(
            constants=parse_signature(args.constants),
            budget=Budget(
                max_entries=args.max_entries,
                max_candidates=args.max_candidates,
                max_nodes=args.max_nodes,
                time_limit=args.time_limit,
            ),
            format=args.format,
            seed=args.seed,
        )
    except ValueError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    try:
        doc = _execute(args, config)
    except BudgetExceeded as e:
        err.write(f"budget exceeded: {e}\n")
        return EXIT_BUDGET
    except InvariantViolation as e:
        err.write(f"internal error: {e}\n")
        return EXIT_INTERNAL
    except (ParseError, CellError, LambdaError) as e:
        err.write(f"error: {e}\n")
        return EXIT_INPUT
    if config.format == "structured":
        out.write(json.dumps({"command": args.command, **doc}, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(_render_text(args.command, doc) + "\n")
    return EXIT_OK


def main():
    sys.exit(run())
