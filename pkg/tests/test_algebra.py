"""Algebra expressions: arity rules, evaluation, grammar round-trips."""

from __future__ import annotations

import random

import pytest

from semirel.algebra import (
    ArityMismatch,
    Div,
    DivArityError,
    Diff,
    Product,
    Project,
    Rel,
    Select,
    Supp,
    TrivialDatabaseWarning,
    Union,
    UnknownRelation,
    arity_of,
    evaluate,
    expr_from_json,
    expr_to_json,
    parse_expr,
    print_expr,
)
from semirel.parsing import ParseError
from semirel.relation import ColEq, ColNeq, CondAnd, CondOr, KDatabase, relation
from semirel.semiring import BAG

SCHEMA = {"R": 2, "S": 1}


def bag_db(r_rows, s_rows):
    return KDatabase(
        (("R", 2), ("S", 1)),
        {"R": relation(BAG, 2, r_rows), "S": relation(BAG, 1, s_rows)},
        BAG,
    )


def witness_db(n):
    """R(a, b_i) = 2 and S(b_i) = 1 for i = 1..n."""
    r = {("a", f"b{i}"): 2 for i in range(1, n + 1)}
    s = {(f"b{i}",): 1 for i in range(1, n + 1)}
    return bag_db(r, s)


def test_arity_examples():
    assert arity_of(Product(Rel("R"), Rel("S")), SCHEMA) == 3
    assert arity_of(Project((), Rel("R")), SCHEMA) == 0
    with pytest.raises(ArityMismatch):
        arity_of(Union(Rel("R"), Rel("S")), SCHEMA)


def test_arity_errors():
    with pytest.raises(UnknownRelation):
        arity_of(Rel("T"), SCHEMA)
    with pytest.raises(IndexError):
        arity_of(Project((1, 1), Rel("R")), SCHEMA)
    with pytest.raises(IndexError):
        arity_of(Project((3,), Rel("R")), SCHEMA)
    with pytest.raises(IndexError):
        arity_of(Select(ColEq(1, 3), Rel("R")), SCHEMA)
    with pytest.raises(DivArityError):
        arity_of(Div(Rel("S"), Rel("R")), SCHEMA)
    with pytest.raises(DivArityError):
        arity_of(Div(Rel("S"), Rel("S")), SCHEMA)
    assert arity_of(Div(Rel("R"), Rel("S")), SCHEMA) == 1


def test_evaluate_base_and_composition():
    db = bag_db({("a", "b"): 2, ("a", "c"): 3}, {("a",): 1})
    assert evaluate(Rel("R"), db) == db.relations["R"]
    assert evaluate(Supp(Project((1,), Rel("R"))), db) == relation(BAG, 1, {("a",): 1})


def test_evaluate_division_witness():
    out = evaluate(Div(Rel("R"), Rel("S")), witness_db(3))
    assert out == relation(BAG, 1, {("a",): 8})


def test_trivial_database_flagged():
    db = bag_db({}, {})
    with pytest.warns(TrivialDatabaseWarning):
        evaluate(Rel("R"), db)


def test_parse_examples():
    assert parse_expr("proj[1,3](times(R,S))") == Project((1, 3), Product(Rel("R"), Rel("S")))
    assert parse_expr("div(R, supp(S))") == Div(Rel("R"), Supp(Rel("S")))
    assert parse_expr("proj[](R)") == Project((), Rel("R"))
    assert parse_expr("select[#1=#2 and #1!=#3](R)") == Select(
        CondAnd(ColEq(1, 2), ColNeq(1, 3)), Rel("R")
    )
    assert parse_expr("select[#1=#2 or #1=#3 and #2=#3](R)") == Select(
        CondOr(ColEq(1, 2), CondAnd(ColEq(1, 3), ColEq(2, 3))), Rel("R")
    )


def test_parse_errors_have_positions():
    for text in ["union(R,)", "proj[1,x](R)", "R )", "select[#1](R)", "union(R", ""]:
        with pytest.raises(ParseError):
            parse_expr(text)


def random_cond(rng, arity, depth):
    if depth == 0 or rng.random() < 0.5:
        i, j = rng.randint(1, arity), rng.randint(1, arity)
        return ColEq(i, j) if rng.random() < 0.5 else ColNeq(i, j)
    node = CondAnd if rng.random() < 0.5 else CondOr
    return node(random_cond(rng, arity, depth - 1), random_cond(rng, arity, depth - 1))


def random_expr(rng, depth):
    """A random AST for grammar round-trips; arities are not constrained."""
    if depth == 0:
        return Rel(rng.choice(["R", "S", "T_0"]))
    kind = rng.choice(["union", "diff", "times", "div", "proj", "select", "supp", "rel"])
    if kind == "rel":
        return Rel(rng.choice(["R", "S"]))
    if kind in ("union", "diff", "times", "div"):
        node = {"union": Union, "diff": Diff, "times": Product, "div": Div}[kind]
        return node(random_expr(rng, depth - 1), random_expr(rng, depth - 1))
    if kind == "proj":
        cols = rng.sample(range(1, 6), rng.randint(0, 3))
        return Project(tuple(cols), random_expr(rng, depth - 1))
    if kind == "select":
        return Select(random_cond(rng, 4, 2), random_expr(rng, depth - 1))
    return Supp(random_expr(rng, depth - 1))


def test_parser_round_trip_on_random_asts():
    rng = random.Random(13)
    for _ in range(1000):
        e = random_expr(rng, rng.randint(0, 4))
        text = print_expr(e)
        assert parse_expr(text) == e
        assert print_expr(parse_expr(text)) == text


def test_json_round_trip_on_random_asts():
    rng = random.Random(14)
    for _ in range(200):
        e = random_expr(rng, rng.randint(0, 4))
        assert expr_from_json(expr_to_json(e)) == e


def test_evaluation_deterministic():
    db = witness_db(4)
    e = parse_expr("union(proj[1](R), supp(S))")
    assert evaluate(e, db) == evaluate(e, db)


def test_supp_values_are_zero_or_one():
    rng = random.Random(30)
    from semirel.harness import GenConfig, gen_algebra_expr, gen_database

    cfg = GenConfig(seed=30, max_depth=4, max_arity=3, semiring="bag", allow_div=True)
    for _ in range(60):
        db = gen_database(cfg, (("R", 2), ("S", 1)), rng)
        e = Supp(gen_algebra_expr(cfg, (("R", 2), ("S", 1)), rng))
        out = evaluate(e, db)
        assert all(v == BAG.one for v in out.rows.values())


def test_difference_requires_monus():
    from semirel.relation import KDatabase, relation
    from semirel.semiring import MonusUnsupported, SECURITY

    db = KDatabase(
        (("R", 1),), {"R": relation(SECURITY, 1, {("a",): (2, "S")})}, SECURITY
    )
    with pytest.raises(MonusUnsupported):
        evaluate(Diff(Rel("R"), Rel("R")), db)
