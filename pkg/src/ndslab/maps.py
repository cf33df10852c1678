"""Map specifications with exact canonical forms.

Every map the library works with is one of a handful of classes that are
closed under composition on their space: shift powers, rational rotations,
finite tables, componentwise products, plus the two factor-map classes used
for semi-conjugacies (coordinate projections and circle multiplication).
Composition always returns the canonical representative, so ``==`` is map
equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import InvalidArgument, UnsupportedOperation


@dataclass(frozen=True)
class Identity:
    def describe(self):
        return "id"

    def to_json(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class ShiftPower:
    """sigma^j on a two-sided full shift; sigma is the left shift."""

    j: int

    def describe(self):
        return "σ" if self.j == 1 else f"σ^{self.j}"

    def to_json(self):
        return {"kind": "shift", "power": self.j}


@dataclass(frozen=True)
class Rotation:
    alpha: Fraction

    def describe(self):
        return f"R({self.alpha})"

    def to_json(self):
        return {"kind": "rotation", "angle": str(self.alpha)}


@dataclass(frozen=True)
class FiniteMap:
    table: tuple

    def describe(self):
        return "T" + str(list(self.table))

    def to_json(self):
        return {"kind": "finite", "table": list(self.table)}


@dataclass(frozen=True)
class ProductMap:
    components: tuple

    def describe(self):
        return "(" + " × ".join(c.describe() for c in self.components) + ")"

    def to_json(self):
        return {"kind": "product", "components": [c.to_json() for c in self.components]}


@dataclass(frozen=True)
class Projection:
    """Coordinate projection X_0 × ... × X_{p-1} -> X_index."""

    index: int
    arity: int

    def describe(self):
        return f"π{self.index}"

    def to_json(self):
        return {"kind": "projection", "index": self.index, "arity": self.arity}


@dataclass(frozen=True)
class CircleMultiply:
    """x -> factor * x (mod 1), a surjective circle endomorphism."""

    factor: int

    def describe(self):
        return f"×{self.factor}"

    def to_json(self):
        return {"kind": "multiply", "factor": self.factor}


IDENTITY = Identity()

MAP_TYPES = (Identity, ShiftPower, Rotation, FiniteMap, ProductMap, Projection, CircleMultiply)


def shift(j=1):
    return IDENTITY if j == 0 else ShiftPower(int(j))


def rotation(alpha):
    a = Fraction(alpha) % 1
    return IDENTITY if a == 0 else Rotation(a)


def finite_map(table):
    table = tuple(int(t) for t in table)
    if any(t < 0 or t >= len(table) for t in table):
        raise InvalidArgument(f"finite map table {list(table)} is not a self-map")
    if table == tuple(range(len(table))):
        return IDENTITY
    return FiniteMap(table)


def product_map(components):
    comps = tuple(canonical(c) for c in components)
    if not comps:
        raise InvalidArgument("product map needs at least one component")
    if all(c == IDENTITY for c in comps):
        return IDENTITY
    return ProductMap(comps)


def circle_multiply(factor):
    if int(factor) < 1:
        raise InvalidArgument("circle multiplication factor must be >= 1")
    return IDENTITY if factor == 1 else CircleMultiply(int(factor))


def canonical(m):
    if isinstance(m, ShiftPower):
        return shift(m.j)
    if isinstance(m, Rotation):
        return rotation(m.alpha)
    if isinstance(m, FiniteMap):
        t = m.table
        return IDENTITY if t == tuple(range(len(t))) else m
    if isinstance(m, ProductMap):
        return product_map(m.components)
    if isinstance(m, CircleMultiply):
        return circle_multiply(m.factor)
    if isinstance(m, MAP_TYPES):
        return m
    raise InvalidArgument(f"not a map specification: {m!r}")


def _compose2(outer, inner):
    if outer == IDENTITY:
        return inner
    if inner == IDENTITY:
        return outer
    if isinstance(outer, ShiftPower) and isinstance(inner, ShiftPower):
        return shift(outer.j + inner.j)
    if isinstance(outer, Rotation) and isinstance(inner, Rotation):
        return rotation(outer.alpha + inner.alpha)
    if isinstance(outer, FiniteMap) and isinstance(inner, FiniteMap):
        if len(outer.table) != len(inner.table):
            raise InvalidArgument("finite maps act on spaces of different sizes")
        return finite_map(outer.table[x] for x in inner.table)
    if isinstance(outer, ProductMap) and isinstance(inner, ProductMap):
        a, b = outer.components, inner.components
        if len(a) != len(b):
            raise InvalidArgument("product maps of different arity")
        return product_map(_compose2(x, y) for x, y in zip(a, b))
    if isinstance(outer, CircleMultiply) and isinstance(inner, CircleMultiply):
        return circle_multiply(outer.factor * inner.factor)
    raise UnsupportedOperation(
        f"no canonical form for {outer.describe()} ∘ {inner.describe()}"
    )


def compose_maps(*maps):
    """Compose right-to-left: ``compose_maps(f, g, h)`` is f∘g∘h."""
    if not maps:
        return IDENTITY
    return reduce(_compose2, (canonical(m) for m in maps))


def power(m, k):
    """k-fold self composition (k >= 0); negative k uses the inverse."""
    m = canonical(m)
    if k < 0:
        return power(inverse(m), -k)
    if isinstance(m, ShiftPower):
        return shift(m.j * k)
    if isinstance(m, Rotation):
        return rotation(m.alpha * k)
    result, base = IDENTITY, m
    while k:
        if k & 1:
            result = _compose2(base, result)
        base = _compose2(base, base)
        k >>= 1
    return result


def inverse(m):
    m = canonical(m)
    if m == IDENTITY:
        return m
    if isinstance(m, ShiftPower):
        return shift(-m.j)
    if isinstance(m, Rotation):
        return rotation(-m.alpha)
    if isinstance(m, FiniteMap):
        if sorted(m.table) != list(range(len(m.table))):
            raise UnsupportedOperation(f"{m.describe()} is not a permutation")
        inv = [0] * len(m.table)
        for x, y in enumerate(m.table):
            inv[y] = x
        return finite_map(inv)
    if isinstance(m, ProductMap):
        return product_map(inverse(c) for c in m.components)
    raise UnsupportedOperation(f"{m.describe()} has no inverse in its class")


def is_homeomorphism(m):
    m = canonical(m)
    if isinstance(m, (Identity, ShiftPower, Rotation)):
        return True
    if isinstance(m, FiniteMap):
        return sorted(m.table) == list(range(len(m.table)))
    if isinstance(m, ProductMap):
        return all(is_homeomorphism(c) for c in m.components)
    return False


def map_from_json(d):
    kind = d.get("kind")
    if kind == "identity":
        return IDENTITY
    if kind == "shift":
        return shift(int(d.get("power", 1)))
    if kind == "rotation":
        return rotation(Fraction(str(d["angle"])))
    if kind == "finite":
        return finite_map(d["table"])
    if kind == "product":
        return product_map(map_from_json(c) for c in d["components"])
    if kind == "projection":
        return Projection(int(d["index"]), int(d["arity"]))
    if kind == "multiply":
        return circle_multiply(int(d["factor"]))
    raise InvalidArgument(f"unknown map kind {kind!r}")
