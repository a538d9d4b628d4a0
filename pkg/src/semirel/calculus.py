"""Formulas of relational calculus and their semiring semantics on structures.

Formulas are built from equalities and relation atoms with `and`, `or`,
`butnot`, the support connective `nabla`, and the quantifiers `exists` and
`forall`.  Every formula carries a canonical free-variable order: first
occurrence from left to right, with the quantified variable removed by
quantifiers.

Two evaluators are provided.  `eval_at` follows the defining recursion on a
single assignment; `relation_of` computes the whole defined relation
bottom-up over finite tables and is the fast path.  The test suite checks
them against each other pointwise.

Grammar:

    atoms      R(y1,y2)   y1=y2   y1!=y2     (the latter expands to
                                              (y1=y1) butnot (y1=y2))
    connectives  and > or > butnot, all left-associative, parentheses allowed
    prefix       nabla F
    quantifiers  exists v. F   and   forall v. F, scoping as far right as
                 possible; parenthesize to delimit
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iterprod

from .parsing import ParseError, Scanner
from .relation import KRelation, KStructure
from .semiring import Value, monus, support_val


class CalculusError(Exception):
    """Base error for ill-formed formulas or evaluations."""


class QuantifierError(CalculusError):
    """A quantifier binds a variable that is not free in its body."""


class UnboundVariable(CalculusError):
    """An assignment misses a free variable or uses one outside the universe."""


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class ButNot:
    left: object
    right: object


@dataclass(frozen=True)
class Nabla:
    arg: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


def neq(left: str, right: str) -> ButNot:
    """The negated-equality shorthand: (x=x) butnot (x=y)."""
    return ButNot(Eq(left, left), Eq(left, right))


def _merge(a: tuple, b: tuple) -> tuple:
    out = list(a)
    seen = set(a)
    for v in b:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return tuple(out)


@lru_cache(maxsize=None)
def free_vars(phi) -> tuple:
    """Canonical free-variable order: first occurrence, left to right."""
    if isinstance(phi, Eq):
        return (phi.left,) if phi.left == phi.right else (phi.left, phi.right)
    if isinstance(phi, Atom):
        return _merge((), phi.args)
    if isinstance(phi, (And, Or, ButNot)):
        return _merge(free_vars(phi.left), free_vars(phi.right))
    if isinstance(phi, Nabla):
        return free_vars(phi.arg)
    if isinstance(phi, (Exists, Forall)):
        inner = free_vars(phi.body)
        if phi.var not in inner:
            kind = "exists" if isinstance(phi, Exists) else "forall"
            raise QuantifierError(f"{kind} {phi.var} binds a variable not free in its body")
        return tuple(v for v in inner if v != phi.var)
    raise CalculusError(f"not a formula: {phi!r}")


def rename_free(phi, mapping: dict):
    """Rename free occurrences of variables; targets must be fresh for phi."""
    if not mapping:
        return phi
    if isinstance(phi, Eq):
        return Eq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, Atom):
        return Atom(phi.name, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, (And, Or, ButNot)):
        return type(phi)(rename_free(phi.left, mapping), rename_free(phi.right, mapping))
    if isinstance(phi, Nabla):
        return Nabla(rename_free(phi.arg, mapping))
    if isinstance(phi, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        if phi.var in inner.values():
            raise CalculusError(f"renaming would capture {phi.var}")
        return type(phi)(phi.var, rename_free(phi.body, inner))
    raise CalculusError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# single-assignment evaluation (the defining recursion)


def eval_at(phi, struct: KStructure, assignment: dict) -> Value:
    """The semantic value of phi under a (total) assignment into the universe."""
    for v in free_vars(phi):
        if v not in assignment:
            raise UnboundVariable(f"assignment misses free variable {v!r}")
        if assignment[v] not in struct.universe:
            raise UnboundVariable(f"{v!r} is assigned outside the universe")
    return _eval(phi, struct, dict(assignment))


def _eval(phi, struct: KStructure, alpha: dict) -> Value:
    ring = struct.ring
    if isinstance(phi, Eq):
        return ring.one if alpha[phi.left] == alpha[phi.right] else ring.zero
    if isinstance(phi, Atom):
        rel = struct.relations.get(phi.name)
        if rel is None:
            raise CalculusError(f"unknown relation {phi.name!r}")
        return rel.value_at(tuple(alpha[a] for a in phi.args))
    if isinstance(phi, And):
        return _eval(phi.left, struct, alpha) * _eval(phi.right, struct, alpha)
    if isinstance(phi, Or):
        return _eval(phi.left, struct, alpha) + _eval(phi.right, struct, alpha)
    if isinstance(phi, ButNot):
        return monus(_eval(phi.left, struct, alpha), _eval(phi.right, struct, alpha))
    if isinstance(phi, Nabla):
        return support_val(_eval(phi.arg, struct, alpha))
    if isinstance(phi, (Exists, Forall)):
        free_vars(phi)  # validates the binder
        saved = alpha.get(phi.var)
        total = ring.zero if isinstance(phi, Exists) else ring.one
        for b in struct.sorted_universe():
            alpha[phi.var] = b
            piece = _eval(phi.body, struct, alpha)
            total = total + piece if isinstance(phi, Exists) else total * piece
        if saved is None:
            alpha.pop(phi.var, None)
        else:
            alpha[phi.var] = saved
        return total
    raise CalculusError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# whole-relation evaluation over finite tables


def relation_of(phi, struct: KStructure) -> KRelation:
    """The relation defined by phi on the structure.

    Columns follow the canonical free-variable order; the value at tuples
    inside the universe is the semantic value, outside it is zero.  A
    sentence yields a 0-ary relation keyed by the empty tuple.
    """
    fv = free_vars(phi)
    rows = _table(phi, struct, {})
    return KRelation(len(fv), struct.ring, rows)


def _table(phi, struct: KStructure, memo: dict) -> dict:
    """Nonzero rows of phi keyed by tuples over free_vars(phi)."""
    if phi in memo:
        return memo[phi]
    ring = struct.ring
    universe = struct.sorted_universe()

    if isinstance(phi, Eq):
        if phi.left == phi.right:
            rows = {(a,): ring.one for a in universe}
        else:
            rows = {(a, a): ring.one for a in universe}

    elif isinstance(phi, Atom):
        if phi.name not in struct.relations:
            raise CalculusError(f"unknown relation {phi.name!r}")
        fv = free_vars(phi)
        rows = {}
        for t, val in struct.relations[phi.name].rows.items():
            asg = {}
            ok = True
            for v, e in zip(phi.args, t):
                if asg.setdefault(v, e) != e:
                    ok = False
                    break
            if ok:
                rows[tuple(asg[v] for v in fv)] = val

    elif isinstance(phi, And):
        lf, rf = free_vars(phi.left), free_vars(phi.right)
        left, right = _table(phi.left, struct, memo), _table(phi.right, struct, memo)
        shared = [v for v in rf if v in set(lf)]
        new = [v for v in rf if v not in set(lf)]
        l_shared = [lf.index(v) for v in shared]
        r_shared = [rf.index(v) for v in shared]
        r_new = [rf.index(v) for v in new]
        index: dict = {}
        for rt, rv in right.items():
            index.setdefault(tuple(rt[i] for i in r_shared), []).append((rt, rv))
        rows = {}
        for lt, lv in left.items():
            for rt, rv in index.get(tuple(lt[i] for i in l_shared), ()):
                v = lv * rv
                if not v.is_zero():
                    rows[lt + tuple(rt[i] for i in r_new)] = v

    elif isinstance(phi, (Or, ButNot)):
        lf, rf = free_vars(phi.left), free_vars(phi.right)
        left, right = _table(phi.left, struct, memo), _table(phi.right, struct, memo)
        fv = _merge(lf, rf)
        r_pos = {v: i for i, v in enumerate(rf)}
        # the left table occupies a prefix of fv; the rest ranges freely
        new_l = len(fv) - len(lf)
        # positions in an fv-keyed tuple that the right table determines
        r_cols = [(i, r_pos[v]) for i, v in enumerate(fv) if v in r_pos]
        acc: dict = {}
        for lt, lv in left.items():
            for ext in iterprod(universe, repeat=new_l):
                key = lt + ext
                acc[key] = acc[key] + lv if key in acc else lv
        if isinstance(phi, Or):
            free_cols = [i for i, v in enumerate(fv) if v not in r_pos]
            for rt, rv in right.items():
                for ext in iterprod(universe, repeat=len(free_cols)):
                    key = [None] * len(fv)
                    for i, e in zip(free_cols, ext):
                        key[i] = e
                    for i, ri in r_cols:
                        key[i] = rt[ri]
                    key = tuple(key)
                    acc[key] = acc[key] + rv if key in acc else rv
            rows = {t: v for t, v in acc.items() if not v.is_zero()}
        else:
            rows = {}
            for key, lv in acc.items():
                rv_key = [None] * len(rf)
                for i, ri in r_cols:
                    rv_key[ri] = key[i]
                v = monus(lv, right.get(tuple(rv_key), ring.zero))
                if not v.is_zero():
                    rows[key] = v

    elif isinstance(phi, Nabla):
        rows = {t: ring.one for t in _table(phi.arg, struct, memo)}

    elif isinstance(phi, Exists):
        body_fv = free_vars(phi.body)
        free_vars(phi)  # validates the binder
        drop = body_fv.index(phi.var)
        acc = {}
        for t, v in _table(phi.body, struct, memo).items():
            key = t[:drop] + t[drop + 1 :]
            acc[key] = acc[key] + v if key in acc else v
        rows = {t: v for t, v in acc.items() if not v.is_zero()}

    elif isinstance(phi, Forall):
        body_fv = free_vars(phi.body)
        free_vars(phi)
        drop = body_fv.index(phi.var)
        groups: dict = {}
        for t, v in _table(phi.body, struct, memo).items():
            groups.setdefault(t[:drop] + t[drop + 1 :], []).append(v)
        rows = {}
        for key, values in groups.items():
            if len(values) < len(universe):
                continue  # a missing row is a zero factor
            v = values[0]
            for w in values[1:]:
                v = v * w
            if not v.is_zero():
                rows[key] = v

    else:
        raise CalculusError(f"not a formula: {phi!r}")

    memo[phi] = rows
    return rows


# ---------------------------------------------------------------------------
# grammar

KEYWORDS = {"and", "or", "butnot", "nabla", "exists", "forall"}


def parse_formula(text: str):
    sc = Scanner(text)
    phi = _parse_formula(sc)
    sc.expect_end()
    return phi


def _parse_formula(sc: Scanner):
    phi = _parse_or(sc)
    while sc.take("butnot"):
        phi = ButNot(phi, _parse_or(sc))
    return phi


def _parse_or(sc: Scanner):
    phi = _parse_and(sc)
    while sc.take("or"):
        phi = Or(phi, _parse_and(sc))
    return phi


def _parse_and(sc: Scanner):
    phi = _parse_unary(sc)
    while sc.take("and"):
        phi = And(phi, _parse_unary(sc))
    return phi


def _parse_unary(sc: Scanner):
    kind, tok, pos = sc.peek()
    if tok == "nabla":
        sc.next()
        return Nabla(_parse_unary(sc))
    if tok in ("exists", "forall"):
        sc.next()
        k, var, p = sc.next()
        if k != "name" or var in KEYWORDS:
            raise ParseError(f"expected a variable after {tok}, found {var!r}", p)
        sc.expect(".")
        body = _parse_formula(sc)
        return Exists(var, body) if tok == "exists" else Forall(var, body)
    return _parse_primary(sc)


def _parse_primary(sc: Scanner):
    kind, tok, pos = sc.next()
    if tok == "(":
        phi = _parse_formula(sc)
        sc.expect(")")
        return phi
    if kind != "name" or tok in KEYWORDS:
        raise ParseError(f"expected a formula, found {tok or 'end of input'!r}", pos)
    if sc.take("("):
        args = []
        while True:
            k, a, p = sc.next()
            if k != "name" or a in KEYWORDS:
                raise ParseError(f"expected a variable, found {a!r}", p)
            args.append(a)
            if not sc.take(","):
                break
        sc.expect(")")
        return Atom(tok, tuple(args))
    k, op, p = sc.next()
    if op == "=":
        pass
    elif op == "!=":
        pass
    else:
        raise ParseError(f"expected ( or = or != after {tok!r}, found {op!r}", p)
    k, other, p = sc.next()
    if k != "name" or other in KEYWORDS:
        raise ParseError(f"expected a variable, found {other!r}", p)
    return Eq(tok, other) if op == "=" else neq(tok, other)


_BINARY = (And, Or, ButNot)
_QUANT = (Exists, Forall)


def _wrap(phi) -> str:
    text = print_formula(phi)
    if isinstance(phi, _BINARY + _QUANT):
        return f"({text})"
    return text


def print_formula(phi) -> str:
    if isinstance(phi, Eq):
        return f"{phi.left}={phi.right}"
    if isinstance(phi, Atom):
        return f"{phi.name}({','.join(phi.args)})"
    if isinstance(phi, And):
        return f"{_wrap(phi.left)} and {_wrap(phi.right)}"
    if isinstance(phi, Or):
        return f"{_wrap(phi.left)} or {_wrap(phi.right)}"
    if isinstance(phi, ButNot):
        return f"{_wrap(phi.left)} butnot {_wrap(phi.right)}"
    if isinstance(phi, Nabla):
        return f"nabla {_wrap(phi.arg)}"
    if isinstance(phi, Exists):
        return f"exists {phi.var}. {print_formula(phi.body)}"
    if isinstance(phi, Forall):
        return f"forall {phi.var}. {print_formula(phi.body)}"
    raise CalculusError(f"not a formula: {phi!r}")
