"""Expressions of relational algebra: AST, arity checking, evaluation, grammar.

The six basic operations (union, difference, product, projection, selection,
support) plus division form the expression language.  The concrete grammar is
keyword-call syntax:

    union(E1, E2)   diff(E1, E2)   times(E1, E2)   div(E1, E2)
    proj[1,3](E)    proj[](E)      select[#1=#2 and #2!=#3](E)   supp(E)

Selection atoms compare 1-based column indices with = and !=, combined by
`and` / `or` (with `and` binding tighter) and parentheses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .parsing import ParseError, Scanner
from .relation import (
    ColEq,
    ColNeq,
    CondAnd,
    CondOr,
    KDatabase,
    KRelation,
    cond_max_index,
    difference,
    divide,
    product,
    project,
    select,
    support_rel,
    union,
)


class AlgebraError(Exception):
    """Base error for ill-formed algebra expressions."""


class UnknownRelation(AlgebraError):
    pass


class ArityMismatch(AlgebraError):
    pass


class DivArityError(AlgebraError):
    pass


class TrivialDatabaseWarning(UserWarning):
    """Evaluation over a database in which every relation is empty."""


@dataclass(frozen=True)
class Rel:
    name: str


@dataclass(frozen=True)
class Union:
    left: object
    right: object


@dataclass(frozen=True)
class Diff:
    left: object
    right: object


@dataclass(frozen=True)
class Product:
    left: object
    right: object


@dataclass(frozen=True)
class Project:
    cols: tuple
    arg: object


@dataclass(frozen=True)
class Select:
    cond: object
    arg: object


@dataclass(frozen=True)
class Supp:
    arg: object


@dataclass(frozen=True)
class Div:
    left: object
    right: object


def arity_of(expr, schema: dict) -> int:
    """Arity of a well-formed expression over {name: arity}; raises otherwise."""
    if isinstance(expr, Rel):
        if expr.name not in schema:
            raise UnknownRelation(f"unknown relation {expr.name!r}")
        return schema[expr.name]
    if isinstance(expr, (Union, Diff)):
        n1 = arity_of(expr.left, schema)
        n2 = arity_of(expr.right, schema)
        if n1 != n2:
            op = "union" if isinstance(expr, Union) else "diff"
            raise ArityMismatch(f"{op} operands have arities {n1} and {n2}")
        return n1
    if isinstance(expr, Product):
        return arity_of(expr.left, schema) + arity_of(expr.right, schema)
    if isinstance(expr, Project):
        n = arity_of(expr.arg, schema)
        if len(set(expr.cols)) != len(expr.cols):
            raise IndexError(f"projection indices must be distinct: {expr.cols}")
        if any(i < 1 or i > n for i in expr.cols):
            raise IndexError(f"projection indices out of range for arity {n}: {expr.cols}")
        return len(expr.cols)
    if isinstance(expr, Select):
        n = arity_of(expr.arg, schema)
        if n == 0 or cond_max_index(expr.cond) > n:
            raise IndexError(f"selection indices out of range for arity {n}")
        return n
    if isinstance(expr, Supp):
        return arity_of(expr.arg, schema)
    if isinstance(expr, Div):
        n1 = arity_of(expr.left, schema)
        n2 = arity_of(expr.right, schema)
        if n1 <= n2:
            raise DivArityError(f"division needs arity {n1} > {n2}")
        return n1 - n2
    raise AlgebraError(f"not an algebra expression: {expr!r}")


def evaluate(expr, db: KDatabase) -> KRelation:
    """Evaluate an expression on a database by structural recursion."""
    arity_of(expr, db.arity_map())
    if not db.non_trivial:
        warnings.warn("evaluating over a trivial database", TrivialDatabaseWarning, stacklevel=2)
    memo: dict = {}

    def go(e):
        if e in memo:
            return memo[e]
        if isinstance(e, Rel):
            out = db.relations[e.name]
        elif isinstance(e, Union):
            out = union(go(e.left), go(e.right))
        elif isinstance(e, Diff):
            out = difference(go(e.left), go(e.right))
        elif isinstance(e, Product):
            out = product(go(e.left), go(e.right))
        elif isinstance(e, Project):
            out = project(go(e.arg), e.cols)
        elif isinstance(e, Select):
            out = select(go(e.arg), e.cond)
        elif isinstance(e, Supp):
            out = support_rel(go(e.arg))
        else:
            out = divide(go(e.left), go(e.right))
        memo[e] = out
        return out

    return go(expr)


# ---------------------------------------------------------------------------
# grammar

KEYWORDS = {"union", "diff", "times", "div", "proj", "select", "supp", "and", "or"}


def parse_expr(text: str):
    sc = Scanner(text)
    expr = _parse_expr(sc)
    sc.expect_end()
    return expr


def _parse_expr(sc: Scanner):
    kind, tok, pos = sc.next()
    if kind != "name":
        raise ParseError(f"expected an expression, found {tok or 'end of input'!r}", pos)
    if tok in ("union", "diff", "times", "div"):
        sc.expect("(")
        left = _parse_expr(sc)
        sc.expect(",")
        right = _parse_expr(sc)
        sc.expect(")")
        node = {"union": Union, "diff": Diff, "times": Product, "div": Div}[tok]
        return node(left, right)
    if tok == "supp":
        sc.expect("(")
        arg = _parse_expr(sc)
        sc.expect(")")
        return Supp(arg)
    if tok == "proj":
        sc.expect("[")
        cols = []
        if not sc.at("]"):
            while True:
                k, t, p = sc.next()
                if k != "int":
                    raise ParseError(f"expected a column index, found {t!r}", p)
                cols.append(int(t))
                if not sc.take(","):
                    break
        sc.expect("]")
        sc.expect("(")
        arg = _parse_expr(sc)
        sc.expect(")")
        return Project(tuple(cols), arg)
    if tok == "select":
        sc.expect("[")
        cond = _parse_cond(sc)
        sc.expect("]")
        sc.expect("(")
        arg = _parse_expr(sc)
        sc.expect(")")
        return Select(cond, arg)
    if tok in KEYWORDS:
        raise ParseError(f"{tok!r} is a reserved word", pos)
    return Rel(tok)


def _parse_cond(sc: Scanner):
    cond = _parse_conj(sc)
    while sc.take("or"):
        cond = CondOr(cond, _parse_conj(sc))
    return cond


def _parse_conj(sc: Scanner):
    cond = _parse_cond_atom(sc)
    while sc.take("and"):
        cond = CondAnd(cond, _parse_cond_atom(sc))
    return cond


def _parse_cond_atom(sc: Scanner):
    if sc.take("("):
        cond = _parse_cond(sc)
        sc.expect(")")
        return cond
    sc.expect("#")
    k, t, p = sc.next()
    if k != "int":
        raise ParseError(f"expected a column index, found {t!r}", p)
    i = int(t)
    kind, op, pos = sc.next()
    if op not in ("=", "!="):
        raise ParseError(f"expected = or != , found {op!r}", pos)
    sc.expect("#")
    k, t, p = sc.next()
    if k != "int":
        raise ParseError(f"expected a column index, found {t!r}", p)
    j = int(t)
    return ColEq(i, j) if op == "=" else ColNeq(i, j)


def print_cond(cond) -> str:
    if isinstance(cond, ColEq):
        return f"#{cond.i}=#{cond.j}"
    if isinstance(cond, ColNeq):
        return f"#{cond.i}!=#{cond.j}"
    op = "and" if isinstance(cond, CondAnd) else "or"
    return f"{_wrap_cond(cond.left)} {op} {_wrap_cond(cond.right)}"


def _wrap_cond(cond) -> str:
    text = print_cond(cond)
    if isinstance(cond, (CondAnd, CondOr)):
        return f"({text})"
    return text


def print_expr(expr) -> str:
    if isinstance(expr, Rel):
        return expr.name
    if isinstance(expr, Union):
        return f"union({print_expr(expr.left)}, {print_expr(expr.right)})"
    if isinstance(expr, Diff):
        return f"diff({print_expr(expr.left)}, {print_expr(expr.right)})"
    if isinstance(expr, Product):
        return f"times({print_expr(expr.left)}, {print_expr(expr.right)})"
    if isinstance(expr, Div):
        return f"div({print_expr(expr.left)}, {print_expr(expr.right)})"
    if isinstance(expr, Supp):
        return f"supp({print_expr(expr.arg)})"
    if isinstance(expr, Project):
        cols = ",".join(str(i) for i in expr.cols)
        return f"proj[{cols}]({print_expr(expr.arg)})"
    if isinstance(expr, Select):
        return f"select[{print_cond(expr.cond)}]({print_expr(expr.arg)})"
    raise AlgebraError(f"not an algebra expression: {expr!r}")


# ---------------------------------------------------------------------------
# AST JSON export mirroring the node constructors


def cond_to_json(cond) -> dict:
    if isinstance(cond, ColEq):
        return {"cond": "eq", "i": cond.i, "j": cond.j}
    if isinstance(cond, ColNeq):
        return {"cond": "neq", "i": cond.i, "j": cond.j}
    kind = "and" if isinstance(cond, CondAnd) else "or"
    return {"cond": kind, "left": cond_to_json(cond.left), "right": cond_to_json(cond.right)}


def cond_from_json(obj: dict):
    kind = obj["cond"]
    if kind == "eq":
        return ColEq(int(obj["i"]), int(obj["j"]))
    if kind == "neq":
        return ColNeq(int(obj["i"]), int(obj["j"]))
    node = CondAnd if kind == "and" else CondOr
    return node(cond_from_json(obj["left"]), cond_from_json(obj["right"]))


def expr_to_json(expr) -> dict:
    if isinstance(expr, Rel):
        return {"op": "rel", "name": expr.name}
    if isinstance(expr, (Union, Diff, Product, Div)):
        op = {Union: "union", Diff: "diff", Product: "times", Div: "div"}[type(expr)]
        return {"op": op, "left": expr_to_json(expr.left), "right": expr_to_json(expr.right)}
    if isinstance(expr, Project):
        return {"op": "proj", "cols": list(expr.cols), "arg": expr_to_json(expr.arg)}
    if isinstance(expr, Select):
        return {"op": "select", "cond": cond_to_json(expr.cond), "arg": expr_to_json(expr.arg)}
    return {"op": "supp", "arg": expr_to_json(expr.arg)}


def expr_from_json(obj: dict):
    op = obj["op"]
    if op == "rel":
        return Rel(obj["name"])
    if op in ("union", "diff", "times", "div"):
        node = {"union": Union, "diff": Diff, "times": Product, "div": Div}[op]
        return node(expr_from_json(obj["left"]), expr_from_json(obj["right"]))
    if op == "proj":
        return Project(tuple(int(i) for i in obj["cols"]), expr_from_json(obj["arg"]))
    if op == "select":
        return Select(cond_from_json(obj["cond"]), expr_from_json(obj["arg"]))
    return Supp(expr_from_json(obj["arg"]))
