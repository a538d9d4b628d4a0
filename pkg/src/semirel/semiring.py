"""Commutative semirings with monus and support, and tagged scalar values.

Eight concrete instances are provided:

    boolean      ({false, true}, or, and)
    bag          (non-negative integers, +, *)
    tropical     (naturals with infinity, min, +); infinity is the zero
    fuzzy        (rationals in [0, 1], max, min)
    lukasiewicz  (rationals in [0, 1], max, a (*) b = max(a + b - 1, 0))
    polynomial   (polynomials over named indeterminates with coefficients
                  in the naturals, +, *)
    security     (pairs of a positive count and a security level, plus a
                  distinguished zero; no monus exists for this instance)
    int          (all integers, +, *; a ring, hence not zero-sum free and
                  without a monus)

Every value is a `Value` tagging a payload with its instance; values of
different instances never combine.  Values are immutable and all operations
are pure, so they can be shared freely.  Monus and the natural order are
implemented by per-instance closed forms; the test suite cross-validates
them against the defining properties.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any


class SemiringError(Exception):
    """Base error for semiring operations."""


class InstanceMismatch(SemiringError):
    """Raised when values of different instances are combined."""


class MonusUnsupported(SemiringError):
    """Raised when monus is requested for an instance that has none."""


class OrderUndecidable(SemiringError):
    """Raised when the natural order is requested but not decidable."""


class ValueDecodeError(SemiringError):
    """Raised when a serialized value cannot be decoded."""


@dataclass(frozen=True)
class SemiringDescriptor:
    """Capability flags of a semiring instance (all instances are commutative)."""

    name: str
    zero_sum_free: bool
    no_zero_divisors: bool
    has_monus: bool
    order_decidable: bool

    @property
    def positive(self) -> bool:
        return self.zero_sum_free and self.no_zero_divisors


@dataclass(frozen=True)
class Value:
    """A scalar of one concrete semiring instance."""

    ring: "Semiring"
    payload: Any

    def is_zero(self) -> bool:
        return self.payload == self.ring.zero_payload

    def __add__(self, other: "Value") -> "Value":
        return add(self, other)

    def __mul__(self, other: "Value") -> "Value":
        return mul(self, other)

    def __repr__(self) -> str:
        return f"<{self.ring.name} {self.ring.text(self.payload)}>"


class Semiring:
    """A commutative semiring instance operating on raw payloads.

    Subclasses fill in the payload-level hooks; the public entry points are
    the module-level functions `add`, `mul`, `monus`, `support_val` and
    `nat_leq`, all of which work on `Value` objects.
    """

    name: str = ""
    zero_sum_free: bool = True
    no_zero_divisors: bool = True
    has_monus: bool = True
    order_decidable: bool = True

    def descriptor(self) -> SemiringDescriptor:
        return SemiringDescriptor(
            name=self.name,
            zero_sum_free=self.zero_sum_free,
            no_zero_divisors=self.no_zero_divisors,
            has_monus=self.has_monus,
            order_decidable=self.order_decidable,
        )

    # payload hooks -------------------------------------------------------
    zero_payload: Any = None
    one_payload: Any = None

    def check(self, payload: Any) -> Any:
        """Validate and canonicalize a raw payload."""
        raise NotImplementedError

    def add_payload(self, x: Any, y: Any) -> Any:
        raise NotImplementedError

    def mul_payload(self, x: Any, y: Any) -> Any:
        raise NotImplementedError

    def monus_payload(self, x: Any, y: Any) -> Any:
        raise MonusUnsupported(f"{self.name} has no monus")

    def leq_payload(self, x: Any, y: Any) -> bool:
        raise OrderUndecidable(f"{self.name} has no decidable natural order")

    def text(self, payload: Any) -> str:
        return str(payload)

    def encode(self, payload: Any) -> Any:
        """JSON-compatible encoding of a payload."""
        return self.text(payload)

    def decode(self, obj: Any) -> Any:
        raise NotImplementedError

    def sample(self, rng) -> Any:
        """Draw a small random payload (used by the generation harness)."""
        raise NotImplementedError

    # value-level conveniences -------------------------------------------
    def value(self, raw: Any) -> Value:
        return Value(self, self.check(raw))

    @property
    def zero(self) -> Value:
        return Value(self, self.zero_payload)

    @property
    def one(self) -> Value:
        return Value(self, self.one_payload)

    def __repr__(self) -> str:
        return f"Semiring({self.name})"


def _same_ring(a: Value, b: Value) -> Semiring:
    if a.ring is not b.ring:
        raise InstanceMismatch(f"cannot combine {a.ring.name} with {b.ring.name}")
    return a.ring


def add(a: Value, b: Value) -> Value:
    ring = _same_ring(a, b)
    return Value(ring, ring.add_payload(a.payload, b.payload))


def mul(a: Value, b: Value) -> Value:
    ring = _same_ring(a, b)
    return Value(ring, ring.mul_payload(a.payload, b.payload))


def monus(a: Value, b: Value) -> Value:
    ring = _same_ring(a, b)
    if not ring.has_monus:
        raise MonusUnsupported(f"{ring.name} has no monus")
    return Value(ring, ring.monus_payload(a.payload, b.payload))


def support_val(a: Value) -> Value:
    """One if the value is nonzero, else zero (in the same instance)."""
    return a.ring.zero if a.is_zero() else a.ring.one


def nat_leq(a: Value, b: Value) -> bool:
    """Decide the natural order: a comes before b iff some c has a + c = b."""
    ring = _same_ring(a, b)
    if not ring.order_decidable:
        raise OrderUndecidable(f"{ring.name} has no decidable natural order")
    return ring.leq_payload(a.payload, b.payload)


def sum_values(ring: Semiring, values) -> Value:
    total = ring.zero_payload
    for v in values:
        if v.ring is not ring:
            raise InstanceMismatch(f"cannot sum {v.ring.name} into {ring.name}")
        total = ring.add_payload(total, v.payload)
    return Value(ring, total)


def prod_values(ring: Semiring, values) -> Value:
    total = ring.one_payload
    for v in values:
        if v.ring is not ring:
            raise InstanceMismatch(f"cannot multiply {v.ring.name} into {ring.name}")
        total = ring.mul_payload(total, v.payload)
    return Value(ring, total)


# ---------------------------------------------------------------------------
# Boolean


class BooleanSemiring(Semiring):
    name = "boolean"
    zero_payload = False
    one_payload = True

    def check(self, payload):
        if not isinstance(payload, bool):
            raise SemiringError(f"boolean payload must be bool, got {payload!r}")
        return payload

    def add_payload(self, x, y):
        return x or y

    def mul_payload(self, x, y):
        return x and y

    def monus_payload(self, x, y):
        return x and not y

    def leq_payload(self, x, y):
        return (not x) or y

    def text(self, payload):
        return "true" if payload else "false"

    def encode(self, payload):
        return payload

    def decode(self, obj):
        if isinstance(obj, bool):
            return obj
        if obj in ("true", "false"):
            return obj == "true"
        raise ValueDecodeError(f"not a boolean value: {obj!r}")

    def sample(self, rng):
        return rng.random() < 0.5


# ---------------------------------------------------------------------------
# Bag (non-negative integers)


class BagSemiring(Semiring):
    name = "bag"
    zero_payload = 0
    one_payload = 1

    def check(self, payload):
        if isinstance(payload, bool) or not isinstance(payload, int):
            raise SemiringError(f"bag payload must be an int, got {payload!r}")
        if payload < 0:
            raise SemiringError(f"bag payload must be non-negative, got {payload}")
        return payload

    def add_payload(self, x, y):
        return x + y

    def mul_payload(self, x, y):
        return x * y

    def monus_payload(self, x, y):
        return x - y if x >= y else 0

    def leq_payload(self, x, y):
        return x <= y

    def decode(self, obj):
        try:
            n = int(obj)
        except (TypeError, ValueError):
            raise ValueDecodeError(f"not a bag value: {obj!r}") from None
        return self.check(n)

    def sample(self, rng):
        return rng.randint(0, 9)


# ---------------------------------------------------------------------------
# Tropical naturals (min, +); the zero is infinity, the one is 0


class TropicalNatSemiring(Semiring):
    name = "tropical"
    zero_payload = math.inf
    one_payload = 0

    def check(self, payload):
        if payload == math.inf:
            return math.inf
        if isinstance(payload, bool) or not isinstance(payload, int):
            raise SemiringError(f"tropical payload must be an int or inf, got {payload!r}")
        if payload < 0:
            raise SemiringError(f"tropical payload must be non-negative, got {payload}")
        return payload

    def add_payload(self, x, y):
        return min(x, y)

    def mul_payload(self, x, y):
        if x == math.inf or y == math.inf:
            return math.inf
        return x + y

    def monus_payload(self, x, y):
        # smallest c in the natural (reversed) order with x above min(y, c)
        return x if x < y else math.inf

    def leq_payload(self, x, y):
        return x >= y

    def text(self, payload):
        return "inf" if payload == math.inf else str(payload)

    def decode(self, obj):
        if obj == "inf":
            return math.inf
        try:
            n = int(obj)
        except (TypeError, ValueError):
            raise ValueDecodeError(f"not a tropical value: {obj!r}") from None
        return self.check(n)

    def sample(self, rng):
        n = rng.randint(0, 10)
        return math.inf if n == 10 else n


# ---------------------------------------------------------------------------
# Unit-interval rational instances (fuzzy and Lukasiewicz)


class UnitRationalSemiring(Semiring):
    """Shared payload handling for the two [0, 1]-valued instances."""

    def check(self, payload):
        if isinstance(payload, str):
            payload = Fraction(payload)
        elif isinstance(payload, int) and not isinstance(payload, bool):
            payload = Fraction(payload)
        if not isinstance(payload, Fraction):
            raise SemiringError(f"{self.name} payload must be a Fraction, got {payload!r}")
        if not 0 <= payload <= 1:
            raise SemiringError(f"{self.name} payload must lie in [0, 1], got {payload}")
        return payload

    def add_payload(self, x, y):
        return max(x, y)

    def monus_payload(self, x, y):
        return x if x > y else Fraction(0)

    def leq_payload(self, x, y):
        return x <= y

    def text(self, payload):
        return f"{payload.numerator}/{payload.denominator}"

    def decode(self, obj):
        try:
            return self.check(Fraction(obj))
        except (TypeError, ValueError, ZeroDivisionError):
            raise ValueDecodeError(f"not a {self.name} value: {obj!r}") from None

    def sample(self, rng):
        q = rng.randint(1, 8)
        return Fraction(rng.randint(0, q), q)


class FuzzySemiring(UnitRationalSemiring):
    name = "fuzzy"
    zero_payload = Fraction(0)
    one_payload = Fraction(1)

    def mul_payload(self, x, y):
        return min(x, y)


class LukasiewiczSemiring(UnitRationalSemiring):
    name = "lukasiewicz"
    zero_payload = Fraction(0)
    one_payload = Fraction(1)
    # 1/2 (*) 1/2 = 0, so this instance has zero divisors
    no_zero_divisors = False

    def mul_payload(self, x, y):
        return max(x + y - 1, Fraction(0))


# ---------------------------------------------------------------------------
# Polynomials over named indeterminates with coefficients in the naturals.
#
# A monomial is a tuple of (name, exponent) pairs sorted by name with all
# exponents positive; a polynomial payload is a tuple of (monomial,
# coefficient) pairs sorted by monomial with all coefficients positive.

Monomial = tuple
PolyPayload = tuple


def _poly_from_dict(terms: dict) -> PolyPayload:
    items = [(m, c) for m, c in terms.items() if c != 0]
    items.sort(key=lambda mc: mc[0])
    return tuple(items)


def poly(terms: dict | None = None) -> PolyPayload:
    """Build a canonical polynomial payload from {monomial spec: coefficient}.

    Monomial specs are mappings from indeterminate name to exponent, e.g.
    poly({(): 1, (("x", 2),): 3}) or poly() for the zero polynomial.
    """
    if not terms:
        return ()
    canon = {}
    for mono, coef in terms.items():
        mono = tuple(sorted((n, e) for n, e in dict(mono).items() if e != 0))
        canon[mono] = canon.get(mono, 0) + coef
    return _poly_from_dict(canon)


class PolynomialSemiring(Semiring):
    name = "polynomial"
    zero_payload = ()
    one_payload = (((), 1),)

    def check(self, payload):
        if not isinstance(payload, tuple):
            raise SemiringError(f"polynomial payload must be a tuple, got {payload!r}")
        seen = []
        for term in payload:
            mono, coef = term
            if isinstance(coef, bool) or not isinstance(coef, int) or coef <= 0:
                raise SemiringError(f"polynomial coefficients must be positive ints: {term!r}")
            names = [n for n, _ in mono]
            if list(mono) != sorted(mono) or len(set(names)) != len(names):
                raise SemiringError(f"monomial not canonical: {mono!r}")
            if any(isinstance(e, bool) or not isinstance(e, int) or e <= 0 for _, e in mono):
                raise SemiringError(f"monomial exponents must be positive ints: {mono!r}")
            seen.append(mono)
        if seen != sorted(seen) or len(set(seen)) != len(seen):
            raise SemiringError("polynomial terms not canonically sorted")
        return payload

    def add_payload(self, x, y):
        terms = dict(x)
        for mono, coef in y:
            terms[mono] = terms.get(mono, 0) + coef
        return _poly_from_dict(terms)

    def mul_payload(self, x, y):
        terms: dict = {}
        for m1, c1 in x:
            for m2, c2 in y:
                exps = dict(m1)
                for n, e in m2:
                    exps[n] = exps.get(n, 0) + e
                mono = tuple(sorted(exps.items()))
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return _poly_from_dict(terms)

    def monus_payload(self, x, y):
        other = dict(y)
        terms = {}
        for mono, coef in x:
            diff = coef - other.get(mono, 0)
            if diff > 0:
                terms[mono] = diff
        return _poly_from_dict(terms)

    def leq_payload(self, x, y):
        other = dict(y)
        return all(coef <= other.get(mono, 0) for mono, coef in x)

    def text(self, payload):
        if not payload:
            return "0"
        parts = []
        for mono, coef in payload:
            factors = [f"{n}^{e}" if e > 1 else n for n, e in mono]
            if coef != 1 or not factors:
                factors.insert(0, str(coef))
            parts.append("*".join(factors))
        return " + ".join(parts)

    def encode(self, payload):
        return [{"coef": str(coef), "mono": {n: e for n, e in mono}} for mono, coef in payload]

    def decode(self, obj):
        if not isinstance(obj, list):
            raise ValueDecodeError(f"not a polynomial value: {obj!r}")
        terms = {}
        try:
            for term in obj:
                mono = tuple(sorted((str(n), int(e)) for n, e in term["mono"].items()))
                terms[mono] = terms.get(mono, 0) + int(term["coef"])
        except (KeyError, TypeError, ValueError, AttributeError):
            raise ValueDecodeError(f"not a polynomial value: {obj!r}") from None
        return self.check(_poly_from_dict(terms))

    def sample(self, rng):
        terms = {}
        for _ in range(rng.randint(0, 2)):
            mono = tuple(
                sorted((name, rng.randint(1, 2)) for name in rng.sample(("x", "y"), rng.randint(0, 2)))
            )
            terms[mono] = terms.get(mono, 0) + rng.randint(1, 3)
        return _poly_from_dict(terms)


# ---------------------------------------------------------------------------
# Security pairs: a distinguished zero, or (positive count, level).  Levels
# run I < T < S < C < P and both operations keep the smaller level, so this
# instance is naturally ordered yet admits no monus.

SECURITY_LEVELS = "ITSCP"


class SecuritySemiring(Semiring):
    name = "security"
    has_monus = False
    zero_payload = None
    one_payload = (1, "P")

    def check(self, payload):
        if payload is None:
            return None
        try:
            count, level = payload
        except (TypeError, ValueError):
            raise SemiringError(f"security payload must be None or (count, level): {payload!r}") from None
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise SemiringError(f"security count must be a positive int, got {count!r}")
        if level not in SECURITY_LEVELS:
            raise SemiringError(f"security level must be one of {SECURITY_LEVELS}, got {level!r}")
        return (count, level)

    def _min_level(self, s, t):
        return s if SECURITY_LEVELS.index(s) <= SECURITY_LEVELS.index(t) else t

    def add_payload(self, x, y):
        if x is None:
            return y
        if y is None:
            return x
        return (x[0] + y[0], self._min_level(x[1], y[1]))

    def mul_payload(self, x, y):
        if x is None or y is None:
            return None
        return (x[0] * y[0], self._min_level(x[1], y[1]))

    def leq_payload(self, x, y):
        # additive definition: x before y iff x == y, or x == 0, or some
        # nonzero c has x + c = y, which forces a strictly smaller count
        # and a level at least as high (i.e. at most as large an index)
        if x == y or x is None:
            return True
        if y is None:
            return False
        return x[0] < y[0] and SECURITY_LEVELS.index(y[1]) <= SECURITY_LEVELS.index(x[1])

    def text(self, payload):
        if payload is None:
            return "0"
        return f"({payload[0]},{payload[1]})"

    def decode(self, obj):
        if obj == "0":
            return None
        if isinstance(obj, str):
            m = re.fullmatch(r"\(\s*(\d+)\s*,\s*([ITSCP])\s*\)", obj)
            if m:
                return self.check((int(m.group(1)), m.group(2)))
        raise ValueDecodeError(f"not a security value: {obj!r}")

    def sample(self, rng):
        if rng.random() < 0.15:
            return None
        return (rng.randint(1, 9), rng.choice(SECURITY_LEVELS))


# ---------------------------------------------------------------------------
# Integers: a ring, used as the zero-sum-freeness counterexample


class IntSemiring(Semiring):
    name = "int"
    zero_sum_free = False
    has_monus = False
    order_decidable = False
    zero_payload = 0
    one_payload = 1

    def check(self, payload):
        if isinstance(payload, bool) or not isinstance(payload, int):
            raise SemiringError(f"int payload must be an int, got {payload!r}")
        return payload

    def add_payload(self, x, y):
        return x + y

    def mul_payload(self, x, y):
        return x * y

    def decode(self, obj):
        try:
            return int(obj)
        except (TypeError, ValueError):
            raise ValueDecodeError(f"not an int value: {obj!r}") from None

    def sample(self, rng):
        return rng.randint(-4, 4)


BOOLEAN = BooleanSemiring()
BAG = BagSemiring()
TROPICAL = TropicalNatSemiring()
FUZZY = FuzzySemiring()
LUKASIEWICZ = LukasiewiczSemiring()
POLYNOMIAL = PolynomialSemiring()
SECURITY = SecuritySemiring()
INT = IntSemiring()

SEMIRINGS = {
    ring.name: ring
    for ring in (BOOLEAN, BAG, TROPICAL, FUZZY, LUKASIEWICZ, POLYNOMIAL, SECURITY, INT)
}


def get_semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name]
    except KeyError:
        raise SemiringError(f"unknown semiring {name!r}; known: {', '.join(SEMIRINGS)}") from None
