"""Constructive translations between algebra expressions and calculus formulas.

Both directions are purely syntactic structural recursions.  A translation
returns the output AST together with a variable-order witness pairing the
input's columns with the output's free variables, and the semiring
capability the equivalence needs: `zero_sum_free` in general, upgraded to
`positive` when division or universal quantification is involved.  The
capability is enforced by the checking harness at evaluation time, not here.

Algebra-to-calculus output satisfies, on every non-trivial database over a
suitable instance,

    E(t1, ..., tn)  =  value of the formula under {witness[j] -> tj},

while calculus-to-algebra output's columns follow the formula's canonical
free-variable order exactly (the witness lists that order).
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Diff, Div, Product, Project, Rel, Select, Supp, Union, arity_of
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
    neq,
    rename_free,
)
from .relation import ColEq, ColNeq, CondAnd

ZERO_SUM_FREE = "zero_sum_free"
POSITIVE = "positive"


class TranslationError(Exception):
    """Raised when a query has no translation under the syntactic contracts."""


@dataclass(frozen=True)
class TranslationResult:
    output: object
    witness: tuple
    requires: str


class _Fresh:
    """Monotone counter for fresh variables, namespaced per translation."""

    def __init__(self, prefix: str = "x"):
        self.prefix = prefix
        self.count = 0

    def next(self) -> str:
        self.count += 1
        return f"{self.prefix}{self.count}"

    def take(self, n: int) -> list:
        return [self.next() for _ in range(n)]


def adom_expr(schema) -> object:
    """The unary expression evaluating to the active domain as a 0/1 relation.

    The support of the union of all single-column projections of all
    relations; on instances that are not zero-sum free, annotations may
    cancel and the expression no longer defines the active domain.
    """
    schema = tuple(schema)
    if not schema:
        raise TranslationError("the active-domain expression needs a nonempty schema")
    terms = [
        Project((j,), Rel(name)) for name, arity in schema for j in range(1, arity + 1)
    ]
    expr = terms[0]
    for term in terms[1:]:
        expr = Union(expr, term)
    return Supp(expr)


# ---------------------------------------------------------------------------
# algebra -> calculus


def _cond_formula(cond, vars_: list):
    if isinstance(cond, ColEq):
        return Eq(vars_[cond.i - 1], vars_[cond.j - 1])
    if isinstance(cond, ColNeq):
        return neq(vars_[cond.i - 1], vars_[cond.j - 1])
    node = And if isinstance(cond, CondAnd) else Or
    return node(_cond_formula(cond.left, vars_), _cond_formula(cond.right, vars_))


def algebra_to_calculus(expr, schema) -> TranslationResult:
    """A formula defining the same query as the expression (Codd, one direction)."""
    schema = dict(schema)
    arity_of(expr, schema)
    fresh = _Fresh()
    saw_div = False
    eta_cache = []

    def eta():
        if not eta_cache:
            z = fresh.next()
            eta_cache.append(Nabla(Exists(z, Eq(z, z))))
        return eta_cache[0]

    def go(e):
        nonlocal saw_div
        if isinstance(e, Rel):
            vars_ = fresh.take(schema[e.name])
            return Atom(e.name, tuple(vars_)), vars_
        if isinstance(e, (Union, Diff)):
            f1, w1 = go(e.left)
            f2, w2 = go(e.right)
            f2 = rename_free(f2, dict(zip(w2, w1)))
            node = Or if isinstance(e, Union) else ButNot
            return node(f1, f2), w1
        if isinstance(e, Product):
            f1, w1 = go(e.left)
            f2, w2 = go(e.right)
            return And(f1, f2), w1 + w2
        if isinstance(e, Project):
            f1, w1 = go(e.arg)
            dropped = [w1[i - 1] for i in range(1, len(w1) + 1) if i not in e.cols]
            for var in reversed(dropped):
                f1 = Exists(var, f1)
            return f1, [w1[i - 1] for i in e.cols]
        if isinstance(e, Select):
            f1, w1 = go(e.arg)
            return And(f1, Nabla(_cond_formula(e.cond, w1))), w1
        if isinstance(e, Supp):
            f1, w1 = go(e.arg)
            return Nabla(f1), w1
        if isinstance(e, Div):
            saw_div = True
            f1, w1 = go(e.left)
            f2, w2 = go(e.right)
            keep = len(w1) - len(w2)
            ybar = w1[keep:]
            f2 = rename_free(f2, dict(zip(w2, ybar)))
            guard = f1
            for var in reversed(ybar):
                guard = Exists(var, guard)
            guard = Nabla(guard)
            body = Or(ButNot(eta(), Nabla(f2)), And(Nabla(f2), f1))
            for var in reversed(ybar):
                body = Forall(var, body)
            return And(guard, body), w1[:keep]
        raise TranslationError(f"not an algebra expression: {e!r}")

    formula, witness = go(expr)
    return TranslationResult(formula, tuple(witness), POSITIVE if saw_div else ZERO_SUM_FREE)


# ---------------------------------------------------------------------------
# calculus -> algebra


def pad_align(expr, have, want, schema) -> object:
    """Widen an expression with active-domain columns and permute to `want`.

    `have` names the expression's columns in order; the result's columns
    follow `want`, which must contain every name in `have`.
    """
    have, want = tuple(have), tuple(want)
    if not set(have) <= set(want):
        raise TranslationError(f"columns {set(have) - set(want)} missing from target order")
    if have == want:
        return expr
    adom = adom_expr(schema)
    cols = list(have)
    for v in want:
        if v not in set(have):
            expr = Product(expr, adom)
            cols.append(v)
    perm = tuple(cols.index(v) + 1 for v in want)
    return Project(perm, expr)


def calculus_to_algebra(phi, schema) -> TranslationResult:
    """An expression defining the same query as the formula (Codd, the converse).

    The output's columns follow the formula's canonical free-variable order.
    A universal quantifier closing the last free variable would need an
    equal-arity division, which the expression syntax rules out; such
    formulas are rejected.
    """
    schema = tuple(schema)
    arities = dict(schema)
    adom = adom_expr(schema)
    saw_forall = False

    def go(f):
        nonlocal saw_forall
        if isinstance(f, Eq):
            if f.left == f.right:
                return adom, (f.left,)
            pair = Supp(Select(ColEq(1, 2), Product(adom, adom)))
            return pair, (f.left, f.right)
        if isinstance(f, Atom):
            if f.name not in arities:
                raise TranslationError(f"unknown relation {f.name!r}")
            if arities[f.name] != len(f.args):
                raise TranslationError(
                    f"atom {f.name} has {len(f.args)} arguments, schema says {arities[f.name]}"
                )
            fv = free_vars(f)
            if len(fv) == len(f.args):
                return Rel(f.name), fv
            # repeated variables: select equal columns, keep first occurrences
            cond = None
            for j, v in enumerate(f.args):
                first = f.args.index(v)
                if first != j:
                    atom = ColEq(first + 1, j + 1)
                    cond = atom if cond is None else CondAnd(cond, atom)
            keep = tuple(f.args.index(v) + 1 for v in fv)
            return Project(keep, Select(cond, Rel(f.name))), fv
        if isinstance(f, And):
            e1, w1 = go(f.left)
            e2, w2 = go(f.right)
            shared = [v for v in w2 if v in set(w1)]
            if not shared:
                return Product(e1, e2), w1 + w2
            n1 = len(w1)
            cond = None
            for v in shared:
                atom = ColEq(w1.index(v) + 1, n1 + w2.index(v) + 1)
                cond = atom if cond is None else CondAnd(cond, atom)
            keep = tuple(range(1, n1 + 1)) + tuple(
                n1 + w2.index(v) + 1 for v in w2 if v not in set(w1)
            )
            return Project(keep, Select(cond, Product(e1, e2))), free_vars(f)
        if isinstance(f, (Or, ButNot)):
            e1, w1 = go(f.left)
            e2, w2 = go(f.right)
            want = free_vars(f)
            node = Union if isinstance(f, Or) else Diff
            return node(pad_align(e1, w1, want, schema), pad_align(e2, w2, want, schema)), want
        if isinstance(f, Nabla):
            e1, w1 = go(f.arg)
            return Supp(e1), w1
        if isinstance(f, Exists):
            e1, w1 = go(f.body)
            pos = w1.index(f.var)
            keep = tuple(i + 1 for i in range(len(w1)) if i != pos)
            return Project(keep, e1), free_vars(f)
        if isinstance(f, Forall):
            saw_forall = True
            e1, w1 = go(f.body)
            if len(w1) == 1:
                raise TranslationError(
                    "a universal quantifier closing the last free variable has no "
                    "translation: it would divide by a relation of equal arity"
                )
            pos = w1.index(f.var)
            if pos != len(w1) - 1:
                perm = tuple(i + 1 for i in range(len(w1)) if i != pos) + (pos + 1,)
                e1 = Project(perm, e1)
            return Div(e1, adom), free_vars(f)
        raise TranslationError(f"not a formula: {f!r}")

    free_vars(phi)  # validates binders before recursing
    expr, witness = go(phi)
    return TranslationResult(expr, tuple(witness), POSITIVE if saw_forall else ZERO_SUM_FREE)
