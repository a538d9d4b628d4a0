"""Seeded random generation of databases, expressions, and formulas, plus the
reusable checkers that the acceptance suite is built from.

All generators are deterministic functions of (seed, config).  Checkers
return machine-readable `Verdict` records; a pass is exact pointwise
equality of finite maps, never tolerance-based.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import Diff, Div, Product, Project, Rel, Select, Supp, Union, evaluate
from .calculus import (
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
from .relation import (
    ColEq,
    ColNeq,
    CondAnd,
    CondOr,
    KDatabase,
    KRelation,
    active_domain,
    structure_of,
)
from .semiring import MonusUnsupported, Semiring, add, get_semiring, monus, nat_leq
from .transpile import POSITIVE, ZERO_SUM_FREE

DOMAIN_POOL = "abcdefghij"


class CapabilityError(Exception):
    """The database's instance lacks a capability the check relies on."""


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 4
    max_arity: int = 4
    adom_size: int = 3
    max_supp_rows: int = 5
    semiring: str = "bag"
    allow_div: bool = False
    allow_forall: bool = False

    def __post_init__(self):
        if self.adom_size < 1:
            raise ValueError("adom_size must be at least 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


@dataclass(frozen=True)
class Verdict:
    prop: str
    seed: int
    semiring: str
    passed: bool
    counterexample: dict | None = None

    def to_json(self) -> dict:
        out = {"property": self.prop, "seed": self.seed, "semiring": self.semiring, "pass": self.passed}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


# ---------------------------------------------------------------------------
# generators


def sample_nonzero(ring: Semiring, rng) -> object:
    while True:
        payload = ring.sample(rng)
        if payload != ring.zero_payload:
            return ring.value(payload)


def gen_database(cfg: GenConfig, schema, rng=None) -> KDatabase:
    """A random non-trivial database over the schema's relation names."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    ring = get_semiring(cfg.semiring)
    schema = tuple(schema)
    elems = list(DOMAIN_POOL[: cfg.adom_size])
    relations = {}
    for name, arity in schema:
        rows = {}
        for _ in range(rng.randint(0, cfg.max_supp_rows)):
            t = tuple(rng.choice(elems) for _ in range(arity))
            rows[t] = sample_nonzero(ring, rng)
        relations[name] = KRelation(arity, ring, rows)
    if all(rel.is_empty() for rel in relations.values()):
        name, arity = schema[0]
        t = tuple(rng.choice(elems) for _ in range(arity))
        relations[name] = KRelation(arity, ring, {t: sample_nonzero(ring, rng)})
    return KDatabase(schema, relations, ring)


def gen_algebra_expr(cfg: GenConfig, schema, rng=None, exclude=frozenset()):
    """A random well-formed expression; division and difference appear only
    when the config and the instance allow them."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    ring = get_semiring(cfg.semiring)
    schema = tuple(schema)
    by_arity: dict = {}
    for name, arity in schema:
        by_arity.setdefault(arity, []).append(name)

    def leaf(n):
        if n in by_arity and rng.random() < 0.8:
            return Rel(rng.choice(by_arity[n]))
        # project a product of relation symbols down to arity n
        name, arity = rng.choice(schema)
        expr, m = Rel(name), arity
        while m < n:
            name, arity = rng.choice(schema)
            expr, m = Product(expr, Rel(name)), m + arity
        cols = rng.sample(range(1, m + 1), n)
        return Project(tuple(cols), expr)

    ops = ["union", "proj", "leaf", "leaf"]
    if "supp" not in exclude:
        ops.append("supp")
    if ring.has_monus and "diff" not in exclude:
        ops.append("diff")
    use_div = cfg.allow_div and "div" not in exclude

    def gen(n, depth):
        if depth <= 1:
            return leaf(n)
        choices = list(ops)
        if n >= 1:
            if "select" not in exclude:
                choices.append("select")
            if use_div:
                choices += ["div", "div"]
        if n >= 2 and "times" not in exclude:
            choices.append("times")
        op = rng.choice(choices)
        if op == "leaf":
            return leaf(n)
        if op in ("union", "diff"):
            node = Union if op == "union" else Diff
            return node(gen(n, depth - 1), gen(n, depth - 1))
        if op == "times":
            k = rng.randint(1, n - 1)
            return Product(gen(k, depth - 1), gen(n - k, depth - 1))
        if op == "proj":
            m = rng.randint(max(n, 1), cfg.max_arity)
            cols = rng.sample(range(1, m + 1), n)
            return Project(tuple(cols), gen(m, depth - 1))
        if op == "select":
            return Select(random_condition(rng, n), gen(n, depth - 1))
        if op == "supp":
            return Supp(gen(n, depth - 1))
        # division: a dividend of arity n + k over a divisor of arity k
        k = min(rng.choice([0, 1, 1, 2]), cfg.max_arity - n)
        return Div(gen(n + k, depth - 1), gen(k, depth - 1))

    top = rng.randint(0, cfg.max_arity) if rng.random() < 0.1 else rng.randint(1, cfg.max_arity)
    return gen(top, cfg.max_depth)


def random_condition(rng, arity, depth=2):
    if depth == 0 or rng.random() < 0.6:
        i, j = rng.randint(1, arity), rng.randint(1, arity)
        return ColEq(i, j) if rng.random() < 0.6 else ColNeq(i, j)
    node = CondAnd if rng.random() < 0.5 else CondOr
    return node(random_condition(rng, arity, depth - 1), random_condition(rng, arity, depth - 1))


def gen_formula(cfg: GenConfig, schema, rng=None):
    """A random well-formed formula; `butnot` appears only for instances with
    monus, `forall` only when allowed and never closing the last free variable."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    ring = get_semiring(cfg.semiring)
    schema = tuple(schema)
    pool = tuple(f"y{i}" for i in range(1, cfg.max_arity + 1))

    ops = ["and", "or", "nabla", "exists", "leaf"]
    if ring.has_monus:
        ops.append("butnot")
    if cfg.allow_forall:
        ops += ["forall", "forall"]

    def leaf():
        if rng.random() < 0.25:
            return Eq(rng.choice(pool), rng.choice(pool))
        name, arity = rng.choice(schema)
        if rng.random() < 0.25:
            args = tuple(rng.choice(pool[: max(2, arity)]) for _ in range(arity))
        else:
            args = tuple(rng.sample(pool, arity)) if arity <= len(pool) else tuple(
                rng.choice(pool) for _ in range(arity)
            )
        return Atom(name, args)

    def gen(depth):
        if depth <= 1:
            return leaf()
        op = rng.choice(ops)
        if op == "leaf":
            return leaf()
        if op == "nabla":
            return Nabla(gen(depth - 1))
        if op in ("exists", "forall"):
            body = gen(depth - 1)
            fv = free_vars(body)
            if op == "forall" and len(fv) >= 2:
                return Forall(rng.choice(fv), body)
            if fv:
                return Exists(rng.choice(fv), body)
            return body
        node = {"and": And, "or": Or, "butnot": ButNot}[op]
        for _ in range(4):
            left, right = gen(depth - 1), gen(depth - 1)
            phi = node(left, right)
            if len(free_vars(phi)) <= cfg.max_arity:
                return phi
        return left

    phi = gen(cfg.max_depth)
    if rng.random() < 0.15:
        for var in reversed(free_vars(phi)):
            phi = Exists(var, phi)
    return phi


def contains_node(ast, node_type) -> bool:
    if isinstance(ast, node_type):
        return True
    for attr in ("left", "right", "arg", "body"):
        child = getattr(ast, attr, None)
        if child is not None and contains_node(child, node_type):
            return True
    return False


def gen_algebra_expr_with_div(cfg: GenConfig, schema, rng):
    for _ in range(200):
        expr = gen_algebra_expr(cfg, schema, rng)
        if contains_node(expr, Div):
            return expr
    raise RuntimeError("generator failed to produce a division within 200 draws")


def gen_formula_with_forall(cfg: GenConfig, schema, rng):
    for _ in range(200):
        phi = gen_formula(cfg, schema, rng)
        if contains_node(phi, Forall):
            return phi
    raise RuntimeError("generator failed to produce a universal quantifier within 200 draws")


# ---------------------------------------------------------------------------
# checkers


def _require(db: KDatabase, requires: str) -> None:
    d = db.ring.descriptor()
    if requires == POSITIVE and not d.positive:
        raise CapabilityError(f"{db.ring.name} is not positive")
    if requires == ZERO_SUM_FREE and not d.zero_sum_free:
        raise CapabilityError(f"{db.ring.name} is not zero-sum free")


def _first_difference(ring, left_rows: dict, right_rows: dict):
    for t in sorted(set(left_rows) | set(right_rows)):
        lv = left_rows.get(t, ring.zero)
        rv = right_rows.get(t, ring.zero)
        if lv != rv:
            return t, lv, rv
    return None


def check_equivalence(expr, phi, witness, db: KDatabase, requires: str = ZERO_SUM_FREE,
                      prop: str = "equivalence", seed: int = 0) -> Verdict:
    """Exact equality of the expression's and the formula's defined relations.

    The witness pairs expression column j with free variable witness[j];
    the formula is evaluated over the structure on the active domain.
    """
    if not db.non_trivial:
        raise CapabilityError("equivalence checks need a non-trivial database")
    _require(db, requires)
    left = evaluate(expr, db)
    right = relation_of(phi, structure_of(db))
    fv = free_vars(phi)
    witness = tuple(witness)
    if len(witness) != left.arity or set(witness) != set(fv) or len(fv) != len(witness):
        raise ValueError(f"witness {witness} does not pair columns with {fv}")
    perm = [witness.index(v) for v in fv]
    aligned = {tuple(t[j] for j in perm): v for t, v in left.rows.items()}
    diff = _first_difference(db.ring, aligned, right.rows)
    if diff is None:
        return Verdict(prop, seed, db.ring.name, True)
    t, lv, rv = diff
    return Verdict(prop, seed, db.ring.name, False, {
        "tuple": list(t),
        "algebra": db.ring.encode(lv.payload),
        "calculus": db.ring.encode(rv.payload),
    })


def fresh_elements(db: KDatabase, count: int) -> list:
    adom = active_domain(db)
    out = []
    i = 1
    while len(out) < count:
        candidate = f"u{i}"
        if candidate not in adom:
            out.append(candidate)
        i += 1
    return out


def check_domain_independence(phi, db: KDatabase, extra: int = 1, fresh=None,
                              prop: str = "domain-independence", seed: int = 0) -> Verdict:
    """Compare the formula's relation over the active domain against the one
    over a universe enlarged by `extra` fresh elements."""
    if extra < 1:
        raise ValueError("extra must be at least 1")
    if fresh is None:
        fresh = fresh_elements(db, extra)
    adom = active_domain(db)
    if set(fresh) & adom:
        raise ValueError("fresh elements must avoid the active domain")
    base = relation_of(phi, structure_of(db))
    enlarged = relation_of(phi, structure_of(db, adom | set(fresh)))
    diff = _first_difference(db.ring, base.rows, enlarged.rows)
    if diff is None:
        return Verdict(prop, seed, db.ring.name, True)
    t, bv, ev = diff
    return Verdict(prop, seed, db.ring.name, False, {
        "tuple": list(t),
        "active-domain": db.ring.encode(bv.payload),
        "enlarged": db.ring.encode(ev.payload),
    })


# ---------------------------------------------------------------------------
# monus axiom suite


def _axiom_triples(ring: Semiring, samples: int, rng):
    if ring.name == "boolean":
        vals = [ring.value(False), ring.value(True)]
        return [(a, b, c) for a in vals for b in vals for c in vals]
    return [
        tuple(ring.value(ring.sample(rng)) for _ in range(3)) for _ in range(samples)
    ]


MONUS_PROPERTIES = (
    "a-a=0",
    "0-a=0",
    "a+(b-a)=b+(a-b)",
    "a-(b+c)=(a-b)-c",
    "galois",
)


def monus_axiom_suite(ring, samples: int = 10000, seed: int = 0) -> dict:
    """Check the four monus identities and the Galois law on random triples;
    exhaustive for the Boolean instance."""
    if isinstance(ring, str):
        ring = get_semiring(ring)
    if not ring.has_monus:
        raise MonusUnsupported(f"{ring.name} has no monus")
    rng = random.Random(seed)
    triples = _axiom_triples(ring, samples, rng)
    failures = []
    zero = ring.zero
    for a, b, c in triples:
        checks = (
            ("a-a=0", monus(a, a) == zero),
            ("0-a=0", monus(zero, a) == zero),
            ("a+(b-a)=b+(a-b)", add(a, monus(b, a)) == add(b, monus(a, b))),
            ("a-(b+c)=(a-b)-c", monus(a, add(b, c)) == monus(monus(a, b), c)),
            ("galois", nat_leq(monus(a, b), c) == nat_leq(a, add(b, c))),
        )
        for prop, ok in checks:
            if not ok:
                failures.append({
                    "property": prop,
                    "a": ring.encode(a.payload),
                    "b": ring.encode(b.payload),
                    "c": ring.encode(c.payload),
                })
    return {
        "experiment": "monus-axioms",
        "semiring": ring.name,
        "samples": len(triples),
        "exhaustive": ring.name == "boolean",
        "properties": list(MONUS_PROPERTIES),
        "violations": failures,
        "pass": not failures,
    }
