"""Command-line entry point.

Exit codes: 0 on success or a passing check, 1 on a failed property check
(with the counterexample on standard output), 2 on usage, format, or parse
errors.  All output is deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import report
from .algebra import AlgebraError, evaluate, parse_expr, print_expr
from .calculus import CalculusError, parse_formula, print_formula, relation_of
from .experiments import EXPERIMENTS
from .harness import (
    CapabilityError,
    check_domain_independence,
    check_equivalence,
    monus_axiom_suite,
)
from .parsing import ParseError
from .relation import (
    DatabaseFormatError,
    RelationError,
    active_domain,
    database_from_json,
    structure_of,
    support_rel,
)
from .semiring import SemiringError
from .transpile import TranslationError, adom_expr, algebra_to_calculus, calculus_to_algebra

USAGE_ERRORS = (
    ParseError,
    SemiringError,
    RelationError,
    AlgebraError,
    CalculusError,
    TranslationError,
    DatabaseFormatError,
    CapabilityError,
    ValueError,
    OSError,
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semirel",
        description="relational algebra and calculus over semirings with monus and support",
    )
    sub = parser.add_subparsers(required=True, metavar="command")

    def command(name, help_, **kwargs):
        p = sub.add_parser(name, help=help_, **kwargs)
        p.add_argument("--out", choices=("table", "json"), default="table")
        return p

    p = command("eval-algebra", "evaluate an algebra expression on a database")
    p.add_argument("query")
    _db_flags(p)
    p.set_defaults(func=cmd_eval_algebra)

    p = command("eval-calculus", "evaluate a calculus formula over the active domain")
    p.add_argument("query")
    _db_flags(p)
    p.set_defaults(func=cmd_eval_calculus)

    p = command("translate", "translate between the two query languages")
    p.add_argument("direction", choices=("a2c", "c2a"))
    p.add_argument("query")
    p.add_argument("--db", help="database file supplying the schema")
    p.add_argument("--schema", help="inline schema, e.g. R:2,S:1")
    p.set_defaults(func=cmd_translate)

    p = command("check-equiv", "translate a query and verify the equivalence on a database")
    p.add_argument("query")
    p.add_argument("--direction", choices=("a2c", "c2a"), default="a2c")
    p.add_argument("--seed", type=int, default=0)
    _db_flags(p, required=True)
    p.set_defaults(func=cmd_check_equiv)

    p = command("check-domind", "check a formula for domain independence on a database")
    p.add_argument("query")
    p.add_argument("--extra", type=int, default=1, help="number of fresh elements")
    p.add_argument("--seed", type=int, default=0)
    _db_flags(p, required=True)
    p.set_defaults(func=cmd_check_domind)

    p = command("adom", "evaluate the active-domain expression on a database")
    _db_flags(p, required=True)
    p.set_defaults(func=cmd_adom)

    p = command("axioms", "run the monus axiom suite for one instance")
    p.add_argument("--semiring", required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_axioms)

    p = command("experiment", "run one of the named experiments")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", metavar="DIR", help="also write JSON, CSV, and a figure")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("repl", help="interactive session over a loaded database")
    _db_flags(p, required=True)
    p.set_defaults(func=cmd_repl)

    return parser


def _db_flags(p, required=False):
    p.add_argument("--db", required=required, help="database JSON file")
    p.add_argument("--semiring", help="expected instance name (checked against the file)")


def load_db(args):
    if not args.db:
        raise ValueError("this command needs --db")
    with open(args.db) as fh:
        db = database_from_json(json.load(fh))
    if getattr(args, "semiring", None) and args.semiring != db.ring.name:
        raise ValueError(f"--semiring {args.semiring} does not match the file's {db.ring.name}")
    return db


def _emit_relation(rel, args) -> None:
    if args.out == "json":
        print(report.dumps(report.relation_to_json(rel)))
    else:
        print(report.format_relation(rel))


def cmd_eval_algebra(args) -> int:
    db = load_db(args)
    _emit_relation(evaluate(parse_expr(args.query), db), args)
    return 0


def cmd_eval_calculus(args) -> int:
    db = load_db(args)
    _emit_relation(relation_of(parse_formula(args.query), structure_of(db)), args)
    return 0


def _schema_from(args):
    if args.db:
        return load_db(args).schema
    if args.schema:
        out = []
        for part in args.schema.split(","):
            name, _, arity = part.strip().partition(":")
            if not name or not arity.isdigit():
                raise ValueError(f"bad schema entry {part!r}; expected name:arity")
            out.append((name, int(arity)))
        return tuple(out)
    raise ValueError("translate needs --db or --schema for the relation arities")


def cmd_translate(args) -> int:
    schema = _schema_from(args)
    if args.direction == "a2c":
        res = algebra_to_calculus(parse_expr(args.query), schema)
        text = print_formula(res.output)
    else:
        res = calculus_to_algebra(parse_formula(args.query), schema)
        text = print_expr(res.output)
    if args.out == "json":
        print(report.dumps({
            "direction": args.direction,
            "input": args.query,
            "output": text,
            "witness": list(res.witness),
            "requires": res.requires,
        }))
    else:
        print(text)
        print(f"witness: {', '.join(res.witness) if res.witness else '(sentence)'}")
        print(f"requires: {res.requires}")
    return 0


def _emit_verdict(verdict, args) -> int:
    if args.out == "json":
        print(json.dumps(verdict.to_json(), sort_keys=True))
    else:
        state = "PASS" if verdict.passed else "FAIL"
        print(f"{verdict.prop}: {state}")
        if verdict.counterexample:
            print(f"counterexample: {json.dumps(verdict.counterexample, sort_keys=True)}")
    return 0 if verdict.passed else 1


def cmd_check_equiv(args) -> int:
    db = load_db(args)
    if args.direction == "a2c":
        expr = parse_expr(args.query)
        res = algebra_to_calculus(expr, db.schema)
        verdict = check_equivalence(expr, res.output, res.witness, db, res.requires,
                                    prop="codd-a2c", seed=args.seed)
    else:
        phi = parse_formula(args.query)
        res = calculus_to_algebra(phi, db.schema)
        verdict = check_equivalence(res.output, phi, res.witness, db, res.requires,
                                    prop="codd-c2a", seed=args.seed)
    return _emit_verdict(verdict, args)


def cmd_check_domind(args) -> int:
    db = load_db(args)
    phi = parse_formula(args.query)
    verdict = check_domain_independence(phi, db, extra=args.extra, seed=args.seed)
    return _emit_verdict(verdict, args)


def cmd_adom(args) -> int:
    db = load_db(args)
    expr = adom_expr(db.schema)
    out = evaluate(expr, db)
    adom = sorted(active_domain(db))
    ok = sorted(t[0] for t in out.rows) == adom and out == support_rel(out)
    if args.out == "json":
        print(report.dumps({
            "expression": print_expr(expr),
            "evaluated": report.relation_to_json(out),
            "active_domain": adom,
            "agree": ok,
        }))
    else:
        print(print_expr(expr))
        print(report.format_relation(out))
        print(f"active domain: {{{', '.join(adom)}}}")
        print(f"agree: {'yes' if ok else 'NO'}")
    return 0 if ok else 1


def cmd_axioms(args) -> int:
    result = monus_axiom_suite(args.semiring, samples=args.samples, seed=args.seed)
    if args.out == "json":
        print(report.dumps(result))
    else:
        state = "PASS" if result["pass"] else "FAIL"
        print(f"monus axioms on {result['semiring']}: {result['samples']} samples, {state}")
        for violation in result["violations"][:5]:
            print(f"violation: {json.dumps(violation, sort_keys=True)}")
    return 0 if result["pass"] else 1


def cmd_experiment(args) -> int:
    name = args.name
    kwargs = {}
    if name == "bag-division":
        kwargs["n_max"] = args.n or 30
    elif name == "expression-bounds":
        kwargs["n"] = args.n or 4
        kwargs["samples"] = args.samples or 200
        kwargs["seed"] = args.seed
    elif name in ("fuzzy-support", "bag-support-even"):
        kwargs["samples"] = args.samples or 500
        kwargs["seed"] = args.seed
    result = EXPERIMENTS[name](**kwargs)
    if args.report:
        paths = report.write_report(result, args.report)
        print(f"report written: {paths['json']}, {paths['csv']}, {paths['png']}", file=sys.stderr)
    if args.out == "json":
        print(report.dumps(result))
    elif name == "bag-division":
        for row in result["rows"]:
            state = "PASS" if row["ok"] else "FAIL"
            print(f"2^{row['n']} = {row['value']} {state}")
    else:
        print(report.format_report(result))
    return 0 if result["pass"] else 1


def cmd_repl(args) -> int:
    db = load_db(args)
    print(f"loaded {args.db} ({db.ring.name}); :translate, :semiring, :quit", file=sys.stderr)
    while True:
        try:
            line = input("semirel> ").strip()
        except EOFError:
            break
        if not line:
            continue
        try:
            if line in (":quit", ":q"):
                break
            if line == ":semiring":
                print(db.ring.name)
            elif line.startswith(":translate"):
                parts = line.split(None, 2)
                if len(parts) < 3 or parts[1] not in ("a2c", "c2a"):
                    raise ValueError("usage: :translate a2c|c2a QUERY")
                if parts[1] == "a2c":
                    res = algebra_to_calculus(parse_expr(parts[2]), db.schema)
                    print(print_formula(res.output))
                else:
                    res = calculus_to_algebra(parse_formula(parts[2]), db.schema)
                    print(print_expr(res.output))
                print(f"witness: {', '.join(res.witness) if res.witness else '(sentence)'}")
            else:
                rel = _eval_either(line, db)
                print(report.format_relation(rel))
        except USAGE_ERRORS as exc:
            print(f"error: {exc}")
    return 0


def _eval_either(line: str, db):
    try:
        return evaluate(parse_expr(line), db)
    except (ParseError, AlgebraError):
        return relation_of(parse_formula(line), structure_of(db))


if __name__ == "__main__":
    sys.exit(main())
