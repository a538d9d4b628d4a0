"""K-relations over a fixed symbolic domain and the relation-level operations.

A `KRelation` is an arity together with a finite map from domain tuples to
nonzero values of one semiring instance.  Domain elements are interned
strings drawn from a fixed denumerable symbol domain; the empty tuple is the
single key of 0-ary relations.

All operations are pure and return fresh relations with zero-valued rows
dropped, so no relation ever stores a zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .semiring import (
    Semiring,
    SemiringError,
    Value,
    get_semiring,
    prod_values,
    support_val,
    sum_values,
)

Row = tuple  # tuple of domain-element strings


class RelationError(Exception):
    """Raised for arity, instance, or schema violations on relations."""


class DatabaseFormatError(RelationError):
    """Raised when a serialized database is malformed."""


@dataclass(frozen=True, eq=True)
class KRelation:
    """A finite-support function from domain tuples to nonzero values."""

    arity: int
    ring: Semiring
    rows: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.arity < 0:
            raise RelationError(f"arity must be non-negative, got {self.arity}")
        for t, v in self.rows.items():
            if not isinstance(t, tuple) or len(t) != self.arity:
                raise RelationError(f"row {t!r} does not match arity {self.arity}")
            if not isinstance(v, Value) or v.ring is not self.ring:
                raise RelationError(f"row value {v!r} is not a {self.ring.name} value")
            if v.is_zero():
                raise RelationError(f"zero value stored at {t!r}")

    def value_at(self, t: Row) -> Value:
        return self.rows.get(tuple(t), self.ring.zero)

    def support(self) -> set:
        return set(self.rows)

    def sorted_rows(self) -> list:
        return sorted(self.rows.items(), key=lambda kv: kv[0])

    def is_empty(self) -> bool:
        return not self.rows

    def __repr__(self) -> str:
        body = ", ".join(f"{t}->{self.ring.text(v.payload)}" for t, v in self.sorted_rows())
        return f"KRelation[{self.ring.name}/{self.arity}]{{{body}}}"


def relation(ring: Semiring, arity: int, rows: dict | None = None) -> KRelation:
    """Build a relation from {tuple: raw payload or Value}, dropping zeros."""
    out = {}
    for t, v in (rows or {}).items():
        value = v if isinstance(v, Value) else ring.value(v)
        if not value.is_zero():
            out[tuple(t)] = value
    return KRelation(arity, ring, out)


# ---------------------------------------------------------------------------
# selection conditions over 1-based column indices


@dataclass(frozen=True)
class ColEq:
    i: int
    j: int


@dataclass(frozen=True)
class ColNeq:
    i: int
    j: int


@dataclass(frozen=True)
class CondAnd:
    left: object
    right: object


@dataclass(frozen=True)
class CondOr:
    left: object
    right: object


def cond_max_index(cond) -> int:
    if isinstance(cond, (ColEq, ColNeq)):
        return max(cond.i, cond.j)
    return max(cond_max_index(cond.left), cond_max_index(cond.right))


def cond_min_index(cond) -> int:
    if isinstance(cond, (ColEq, ColNeq)):
        return min(cond.i, cond.j)
    return min(cond_min_index(cond.left), cond_min_index(cond.right))


def cond_holds(cond, t: Row) -> bool:
    if isinstance(cond, ColEq):
        return t[cond.i - 1] == t[cond.j - 1]
    if isinstance(cond, ColNeq):
        return t[cond.i - 1] != t[cond.j - 1]
    if isinstance(cond, CondAnd):
        return cond_holds(cond.left, t) and cond_holds(cond.right, t)
    if isinstance(cond, CondOr):
        return cond_holds(cond.left, t) or cond_holds(cond.right, t)
    raise RelationError(f"not a selection condition: {cond!r}")


def _check_cond(cond, arity: int) -> None:
    if cond_min_index(cond) < 1 or cond_max_index(cond) > arity:
        raise IndexError(f"selection condition indices out of range for arity {arity}")


# ---------------------------------------------------------------------------
# the seven operations


def _same_shape(r1: KRelation, r2: KRelation) -> None:
    if r1.ring is not r2.ring:
        raise RelationError(f"semiring mismatch: {r1.ring.name} vs {r2.ring.name}")
    if r1.arity != r2.arity:
        raise RelationError(f"arity mismatch: {r1.arity} vs {r2.arity}")


def union(r1: KRelation, r2: KRelation) -> KRelation:
    """Pointwise addition of annotations."""
    _same_shape(r1, r2)
    rows = dict(r1.rows)
    for t, v in r2.rows.items():
        rows[t] = rows[t] + v if t in rows else v
    return KRelation(r1.arity, r1.ring, {t: v for t, v in rows.items() if not v.is_zero()})


def difference(r1: KRelation, r2: KRelation) -> KRelation:
    """Pointwise monus of annotations."""
    from .semiring import monus

    _same_shape(r1, r2)
    rows = {}
    for t, v in r1.rows.items():
        d = monus(v, r2.value_at(t))
        if not d.is_zero():
            rows[t] = d
    return KRelation(r1.arity, r1.ring, rows)


def product(r1: KRelation, r2: KRelation) -> KRelation:
    """Cartesian product with multiplied annotations."""
    if r1.ring is not r2.ring:
        raise RelationError(f"semiring mismatch: {r1.ring.name} vs {r2.ring.name}")
    rows = {}
    for t1, v1 in r1.rows.items():
        for t2, v2 in r2.rows.items():
            v = v1 * v2
            if not v.is_zero():
                rows[t1 + t2] = v
    return KRelation(r1.arity + r2.arity, r1.ring, rows)


def project(r: KRelation, v) -> KRelation:
    """Projection onto the (possibly empty) index sequence v, summing rows."""
    v = tuple(v)
    if len(set(v)) != len(v):
        raise IndexError(f"projection indices must be distinct: {v}")
    if any(i < 1 or i > r.arity for i in v):
        raise IndexError(f"projection indices out of range for arity {r.arity}: {v}")
    ring = r.ring
    rows: dict = {}
    for t, val in r.rows.items():
        key = tuple(t[i - 1] for i in v)
        rows[key] = rows[key] + val if key in rows else val
    return KRelation(len(v), ring, {t: w for t, w in rows.items() if not w.is_zero()})


def select(r: KRelation, cond) -> KRelation:
    """Keep rows satisfying the condition; annotations are unchanged."""
    _check_cond(cond, r.arity)
    rows = {t: v for t, v in r.rows.items() if cond_holds(cond, t)}
    return KRelation(r.arity, r.ring, rows)


def support_rel(r: KRelation) -> KRelation:
    """Replace every stored annotation by one."""
    return KRelation(r.arity, r.ring, {t: r.ring.one for t in r.rows})


def divide(r1: KRelation, r2: KRelation) -> KRelation:
    """Division: guard times the product of dividend rows over the divisor support.

    The value at a is s(sum over b of r1(a, b)) times the product over the
    stored rows b of r2 of r1(a, b); the empty product is one.  The guard is
    computed by literally summing stored values so instances that are not
    zero-sum free are handled exactly as the formula dictates.
    """
    if r1.ring is not r2.ring:
        raise RelationError(f"semiring mismatch: {r1.ring.name} vs {r2.ring.name}")
    if r1.arity <= r2.arity:
        raise RelationError(
            f"division needs arity({r1.arity}) > arity({r2.arity}) on the dividend"
        )
    ring = r1.ring
    n_out = r1.arity - r2.arity
    # group dividend rows by their leading columns; the guard vanishes at
    # every tuple outside these groups
    groups: dict = {}
    for t, v in r1.rows.items():
        groups.setdefault(t[:n_out], []).append((t[n_out:], v))
    divisor = sorted(r2.rows)
    rows = {}
    for a in sorted(groups):
        tail = dict(groups[a])
        guard = support_val(sum_values(ring, (v for _, v in groups[a])))
        if guard.is_zero():
            continue
        factors = [tail.get(b, ring.zero) for b in divisor]
        value = guard * prod_values(ring, factors)
        if not value.is_zero():
            rows[a] = value
    return KRelation(n_out, ring, rows)


# ---------------------------------------------------------------------------
# databases and structures


@dataclass(frozen=True, eq=True)
class KDatabase:
    """Named K-relations over a schema of positive-arity relation symbols."""

    schema: tuple  # tuple of (name, arity) pairs
    relations: dict  # name -> KRelation
    ring: Semiring

    def __post_init__(self):
        if not self.schema:
            raise RelationError("schema must name at least one relation")
        for name, arity in self.schema:
            if arity < 1:
                raise RelationError(f"schema arity must be positive: {name}:{arity}")
            rel = self.relations.get(name)
            if rel is None:
                raise RelationError(f"missing relation {name!r}")
            if rel.arity != arity:
                raise RelationError(f"relation {name!r} has arity {rel.arity}, schema says {arity}")
            if rel.ring is not self.ring:
                raise RelationError(f"relation {name!r} is not over {self.ring.name}")
        if set(self.relations) != {name for name, _ in self.schema}:
            raise RelationError("relations do not match schema names")

    @property
    def non_trivial(self) -> bool:
        return any(not rel.is_empty() for rel in self.relations.values())

    def arity_map(self) -> dict:
        return {name: arity for name, arity in self.schema}


@dataclass(frozen=True, eq=True)
class KStructure:
    """A finite nonempty universe together with relations supported inside it."""

    universe: frozenset
    schema: tuple
    relations: dict
    ring: Semiring

    def __post_init__(self):
        if not self.universe:
            raise RelationError("structure universe must be nonempty")
        for name, arity in self.schema:
            rel = self.relations.get(name)
            if rel is None or rel.arity != arity or rel.ring is not self.ring:
                raise RelationError(f"relation {name!r} does not match the schema")
            for t in rel.rows:
                if any(e not in self.universe for e in t):
                    raise RelationError(f"support of {name!r} leaves the universe at {t!r}")

    def sorted_universe(self) -> list:
        return sorted(self.universe)


def active_domain(db: KDatabase) -> set:
    """All domain elements occurring in the support of some relation."""
    out: set = set()
    for rel in db.relations.values():
        for t in rel.rows:
            out.update(t)
    return out


def structure_of(db: KDatabase, universe=None) -> KStructure:
    """The structure over the active domain of db, or over a given superset."""
    adom = active_domain(db)
    if universe is None:
        universe = adom
    universe = frozenset(universe)
    if not adom <= universe:
        raise RelationError("universe must contain the active domain")
    return KStructure(universe, db.schema, dict(db.relations), db.ring)


# ---------------------------------------------------------------------------
# JSON database files


def database_to_json(db: KDatabase) -> dict:
    relations = {}
    for name, arity in db.schema:
        rel = db.relations[name]
        relations[name] = {
            "arity": arity,
            "rows": [
                {"t": list(t), "v": db.ring.encode(v.payload)} for t, v in rel.sorted_rows()
            ],
        }
    return {"semiring": db.ring.name, "relations": relations}


def database_from_json(obj: dict) -> KDatabase:
    try:
        ring = get_semiring(obj["semiring"])
        items = list(obj["relations"].items())
    except (KeyError, TypeError, AttributeError, SemiringError) as exc:
        raise DatabaseFormatError(f"malformed database object: {exc}") from None
    schema = []
    relations = {}
    for name, body in items:
        try:
            arity = int(body["arity"])
            raw_rows = body["rows"]
        except (KeyError, TypeError, ValueError):
            raise DatabaseFormatError(f"malformed relation {name!r}") from None
        rows = {}
        for entry in raw_rows:
            try:
                t = tuple(str(e) for e in entry["t"])
                v = Value(ring, ring.decode(entry["v"]))
            except (KeyError, TypeError, SemiringError) as exc:
                raise DatabaseFormatError(f"bad row in {name!r}: {exc}") from None
            if len(t) != arity:
                raise DatabaseFormatError(f"row {t} in {name!r} does not match arity {arity}")
            if t in rows:
                raise DatabaseFormatError(f"duplicate tuple {t} in {name!r}")
            if v.is_zero():
                raise DatabaseFormatError(f"zero value stored at {t} in {name!r}")
            rows[t] = v
        schema.append((name, arity))
        relations[name] = KRelation(arity, ring, rows)
    return KDatabase(tuple(schema), relations, ring)
