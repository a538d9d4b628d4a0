"""Translations between the two query languages and their correctness checks."""

from __future__ import annotations

import random

import pytest

from semirel.algebra import Div, Product, Project, Rel, Select, Supp, Union, evaluate
from semirel.calculus import (
    And,
    Atom,
    ButNot,
    Eq,
    Exists,
    Forall,
    Nabla,
    Or,
    free_vars,
    relation_of,
)
from semirel.harness import (
    GenConfig,
    check_domain_independence,
    check_equivalence,
    gen_algebra_expr,
    gen_algebra_expr_with_div,
    gen_database,
    gen_formula,
    gen_formula_with_forall,
)
from semirel.relation import ColEq, KDatabase, relation, structure_of
from semirel.semiring import BAG, BOOLEAN, FUZZY, INT, POLYNOMIAL, TROPICAL
from semirel.transpile import (
    POSITIVE,
    ZERO_SUM_FREE,
    TranslationError,
    adom_expr,
    algebra_to_calculus,
    calculus_to_algebra,
    pad_align,
)

SCHEMA = (("R", 2), ("S", 1))


def bag_db(r_rows, s_rows):
    return KDatabase(
        (("R", 2), ("S", 1)),
        {"R": relation(BAG, 2, r_rows), "S": relation(BAG, 1, s_rows)},
        BAG,
    )


# ---------------------------------------------------------------------------
# the active-domain expression


def test_adom_expr_shape_single_binary_relation():
    expr = adom_expr((("R", 2),))
    assert expr == Supp(Union(Project((1,), Rel("R")), Project((2,), Rel("R"))))


def test_adom_expr_evaluates_to_active_domain():
    db = bag_db({("a", "b"): 2}, {})
    out = evaluate(adom_expr(db.schema), db)
    assert out == relation(BAG, 1, {("a",): 1, ("b",): 1})


def test_adom_expr_fails_without_zero_sum_freeness():
    db = KDatabase(
        (("R", 2),),
        {"R": relation(INT, 2, {("a", "b"): 1, ("b", "a"): -1})},
        INT,
    )
    out = evaluate(adom_expr(db.schema), db)
    assert out == relation(INT, 1, {})
    from semirel.relation import active_domain

    assert active_domain(db) == {"a", "b"}


# ---------------------------------------------------------------------------
# algebra -> calculus


def test_a2c_base_and_supp():
    res = algebra_to_calculus(Rel("R"), SCHEMA)
    assert res.output == Atom("R", ("x1", "x2"))
    assert res.witness == ("x1", "x2")
    assert res.requires == ZERO_SUM_FREE

    res = algebra_to_calculus(Supp(Rel("R")), SCHEMA)
    assert res.output == Nabla(Atom("R", ("x1", "x2")))
    assert res.witness == ("x1", "x2")


def test_a2c_division_shape():
    res = algebra_to_calculus(Div(Rel("R"), Rel("S")), SCHEMA)
    assert res.requires == POSITIVE
    assert res.witness == ("x1",)
    formula = res.output
    assert isinstance(formula, And)
    guard, quant = formula.left, formula.right
    assert isinstance(guard, Nabla) and isinstance(guard.arg, Exists)
    assert isinstance(quant, Forall)
    body = quant.body
    assert isinstance(body, Or)
    assert isinstance(body.left, ButNot) and isinstance(body.left.left, Nabla)
    assert isinstance(body.right, And) and isinstance(body.right.left, Nabla)
    assert free_vars(formula) == ("x1",)


def test_a2c_union_unifies_variables():
    expr = Union(Project((2, 1), Rel("R")), Rel("R"))
    res = algebra_to_calculus(expr, SCHEMA)
    db = bag_db({("a", "b"): 2, ("b", "a"): 5}, {})
    verdict = check_equivalence(expr, res.output, res.witness, db)
    assert verdict.passed


# ---------------------------------------------------------------------------
# calculus -> algebra


def test_c2a_equality_shapes():
    adom = adom_expr(SCHEMA)
    res = calculus_to_algebra(Eq("y1", "y2"), SCHEMA)
    assert res.output == Supp(Select(ColEq(1, 2), Product(adom, adom)))
    assert res.witness == ("y1", "y2")
    res = calculus_to_algebra(Eq("y1", "y1"), SCHEMA)
    assert res.output == adom
    assert res.witness == ("y1",)


def test_c2a_forall_becomes_division():
    res = calculus_to_algebra(Forall("y2", Atom("R", ("y1", "y2"))), SCHEMA)
    assert res.output == Div(Rel("R"), adom_expr(SCHEMA))
    assert res.witness == ("y1",)
    assert res.requires == POSITIVE


def test_c2a_forall_permutes_bound_variable_last():
    res = calculus_to_algebra(Forall("y1", Atom("R", ("y1", "y2"))), SCHEMA)
    assert res.output == Div(Project((2, 1), Rel("R")), adom_expr(SCHEMA))
    assert res.witness == ("y2",)


def test_c2a_forall_sentence_is_rejected():
    with pytest.raises(TranslationError):
        calculus_to_algebra(Forall("y1", Atom("S", ("y1",))), SCHEMA)


def test_c2a_repeated_variable_atom():
    res = calculus_to_algebra(Atom("R", ("y1", "y1")), SCHEMA)
    assert res.output == Project((1,), Select(ColEq(1, 2), Rel("R")))
    assert res.witness == ("y1",)
    db = bag_db({("a", "a"): 2, ("a", "b"): 3}, {})
    assert evaluate(res.output, db) == relation(BAG, 1, {("a",): 2})


def test_c2a_sentences_via_empty_projection():
    res = calculus_to_algebra(Exists("y1", Atom("S", ("y1",))), SCHEMA)
    assert res.output == Project((), Rel("S"))
    assert res.witness == ()
    db = bag_db({}, {("a",): 2, ("b",): 3})
    assert evaluate(res.output, db) == relation(BAG, 0, {(): 5})


def test_pad_align_examples():
    e = Rel("S")
    adom = adom_expr(SCHEMA)
    assert pad_align(e, ("y1",), ("y1",), SCHEMA) == e
    assert pad_align(e, ("y1",), ("y1", "y2"), SCHEMA) == Project((1, 2), Product(e, adom))
    assert pad_align(e, ("y2",), ("y1", "y2"), SCHEMA) == Project((2, 1), Product(e, adom))
    with pytest.raises(TranslationError):
        pad_align(e, ("y1",), ("y2",), SCHEMA)


def test_pad_align_evaluates_correctly():
    db = bag_db({("a", "b"): 1}, {("a",): 3})
    padded = pad_align(Rel("S"), ("y2",), ("y1", "y2"), SCHEMA)
    assert evaluate(padded, db) == relation(
        BAG, 2, {("a", "a"): 3, ("b", "a"): 3}
    )


# ---------------------------------------------------------------------------
# round-trip correctness on random inputs, desk scale

RINGS = [BOOLEAN, BAG, TROPICAL, FUZZY, POLYNOMIAL]


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.name)
def test_codd_round_trip_algebra_to_calculus(ring):
    rng = random.Random(22)
    cfg = GenConfig(seed=22, max_depth=4, max_arity=3, adom_size=3, max_supp_rows=4,
                    semiring=ring.name)
    for trial in range(40):
        db = gen_database(cfg, SCHEMA, rng)
        expr = gen_algebra_expr(cfg, SCHEMA, rng)
        res = algebra_to_calculus(expr, SCHEMA)
        verdict = check_equivalence(expr, res.output, res.witness, db, res.requires, seed=trial)
        assert verdict.passed, verdict.to_json()


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.name)
def test_codd_round_trip_with_division(ring):
    rng = random.Random(23)
    cfg = GenConfig(seed=23, max_depth=3, max_arity=3, adom_size=2, max_supp_rows=3,
                    semiring=ring.name, allow_div=True)
    for trial in range(20):
        db = gen_database(cfg, SCHEMA, rng)
        expr = gen_algebra_expr_with_div(cfg, SCHEMA, rng)
        res = algebra_to_calculus(expr, SCHEMA)
        assert res.requires == POSITIVE
        verdict = check_equivalence(expr, res.output, res.witness, db, res.requires, seed=trial)
        assert verdict.passed, verdict.to_json()


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.name)
def test_codd_round_trip_calculus_to_algebra(ring):
    rng = random.Random(24)
    cfg = GenConfig(seed=24, max_depth=4, max_arity=3, adom_size=3, max_supp_rows=4,
                    semiring=ring.name)
    for trial in range(40):
        db = gen_database(cfg, SCHEMA, rng)
        phi = gen_formula(cfg, SCHEMA, rng)
        res = calculus_to_algebra(phi, SCHEMA)
        assert res.witness == free_vars(phi)
        verdict = check_equivalence(res.output, phi, res.witness, db, res.requires, seed=trial)
        assert verdict.passed, verdict.to_json()


@pytest.mark.parametrize("ring", RINGS, ids=lambda r: r.name)
def test_codd_round_trip_with_forall(ring):
    rng = random.Random(25)
    cfg = GenConfig(seed=25, max_depth=3, max_arity=3, adom_size=2, max_supp_rows=3,
                    semiring=ring.name, allow_forall=True)
    for trial in range(20):
        db = gen_database(cfg, SCHEMA, rng)
        phi = gen_formula_with_forall(cfg, SCHEMA, rng)
        res = calculus_to_algebra(phi, SCHEMA)
        verdict = check_equivalence(res.output, phi, res.witness, db, res.requires, seed=trial)
        assert verdict.passed, verdict.to_json()


# ---------------------------------------------------------------------------
# domain independence


def test_translated_formulas_are_domain_independent():
    rng = random.Random(26)
    cfg = GenConfig(seed=26, max_depth=4, max_arity=3, adom_size=3, semiring="bag",
                    allow_div=True)
    for _ in range(30):
        db = gen_database(cfg, SCHEMA, rng)
        expr = gen_algebra_expr(cfg, SCHEMA, rng)
        res = algebra_to_calculus(expr, SCHEMA)
        for extra in (1, 2):
            verdict = check_domain_independence(res.output, db, extra)
            assert verdict.passed, verdict.to_json()


def test_remark_formula_is_not_domain_independent():
    # R1(y1) or R2(y1, y2) on the witness database disagrees at (a, b)
    db = KDatabase(
        (("R1", 1), ("R2", 2)),
        {"R1": relation(BAG, 1, {("a",): 1}), "R2": relation(BAG, 2, {("a", "a"): 1})},
        BAG,
    )
    phi = Or(Atom("R1", ("y1",)), Atom("R2", ("y1", "y2")))
    verdict = check_domain_independence(phi, db, extra=1, fresh=["b"])
    assert not verdict.passed
    assert verdict.counterexample["tuple"] == ["a", "b"]


def test_codd_round_trip_on_lukasiewicz():
    # zero-sum free but not positive: the basic fragment still round-trips
    rng = random.Random(28)
    cfg = GenConfig(seed=28, max_depth=4, max_arity=3, adom_size=3, semiring="lukasiewicz")
    for trial in range(40):
        db = gen_database(cfg, SCHEMA, rng)
        expr = gen_algebra_expr(cfg, SCHEMA, rng)
        res = algebra_to_calculus(expr, SCHEMA)
        assert check_equivalence(expr, res.output, res.witness, db, res.requires).passed
        phi = gen_formula(cfg, SCHEMA, rng)
        res = calculus_to_algebra(phi, SCHEMA)
        assert check_equivalence(res.output, phi, res.witness, db, res.requires).passed


def test_codd_round_trip_on_security_monus_free_fragment():
    # no monus: difference never appears, and selections are excluded since
    # translating a negated equality would need the butnot connective
    rng = random.Random(29)
    cfg = GenConfig(seed=29, max_depth=4, max_arity=3, adom_size=3, semiring="security")
    for trial in range(40):
        db = gen_database(cfg, SCHEMA, rng)
        expr = gen_algebra_expr(cfg, SCHEMA, rng, exclude=frozenset({"select"}))
        res = algebra_to_calculus(expr, SCHEMA)
        assert check_equivalence(expr, res.output, res.witness, db, res.requires).passed
        phi = gen_formula(cfg, SCHEMA, rng)
        res = calculus_to_algebra(phi, SCHEMA)
        assert check_equivalence(res.output, phi, res.witness, db, res.requires).passed


def test_eta_is_one_on_nonempty_structures():
    eta = Nabla(Exists("z", Eq("z", "z")))
    rng = random.Random(27)
    for ring in RINGS:
        cfg = GenConfig(seed=27, semiring=ring.name)
        db = gen_database(cfg, SCHEMA, rng)
        for universe in (None, {"a", "b", "c", "z9"}):
            struct = structure_of(db) if universe is None else structure_of(
                db, set(universe) | set().union(*(set(t) for r in db.relations.values() for t in r.rows))
            )
            assert relation_of(eta, struct) == relation(ring, 0, {(): ring.one})
