"""Exactly computable spaces, their points, and an open-set algebra.

Three families are supported: the two-sided full shift on a finite alphabet,
the circle R/Z with rational arithmetic, and finite metric spaces. Finite
products of these appear as the phase spaces of product and vector systems.

Open sets are finite unions of basis-like parts:

* ``Cylinder``: a finite set of coordinate constraints ``x_c = s``;
* ``Arc``: a half-open arc ``[left, left + length)`` on the circle;
* ``PointSubset``: a subset of a finite space;
* ``Box``: a product of open sets, one per factor.

Half-open arcs intersect exactly when the corresponding open arcs do, so
emptiness answers are the same as for genuinely open arcs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import maps as M
from .errors import InvalidArgument, UnsupportedOperation

# ---------------------------------------------------------------- spaces


@dataclass(frozen=True)
class ShiftSpace:
    alphabet_size: int = 2

    def __post_init__(self):
        if int(self.alphabet_size) < 2:
            raise InvalidArgument("shift alphabet needs at least 2 symbols")

    def describe(self):
        return f"shift({self.alphabet_size})"

    def to_json(self):
        return {"type": "shift", "alphabet": self.alphabet_size}


@dataclass(frozen=True)
class CircleSpace:
    def describe(self):
        return "circle"

    def to_json(self):
        return {"type": "circle"}


@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple
    distance: tuple

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        n = len(labels)
        if n < 1:
            raise InvalidArgument("a finite space needs at least one point")
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.distance)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise InvalidArgument(f"distance matrix must be {n}x{n}")
        for i in range(n):
            if rows[i][i] != 0:
                raise InvalidArgument(f"d({labels[i]},{labels[i]}) must be 0")
            for j in range(n):
                if rows[i][j] < 0 or rows[i][j] != rows[j][i]:
                    raise InvalidArgument("distance must be symmetric and non-negative")
                if i != j and rows[i][j] == 0:
                    raise InvalidArgument("distinct points must have positive distance")
                for k in range(n):
                    if rows[i][k] > rows[i][j] + rows[j][k]:
                        raise InvalidArgument(
                            f"triangle inequality fails at ({labels[i]},{labels[j]},{labels[k]})"
                        )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "distance", rows)

    @classmethod
    def discrete(cls, n, labels=None):
        labels = labels or [f"p{i}" for i in range(n)]
        return cls(tuple(labels), tuple(tuple(0 if i == j else 1 for j in range(n)) for i in range(n)))

    @classmethod
    def on_line(cls, positions, labels=None):
        """Points of the real line with the induced metric."""
        pos = [Fraction(p) for p in positions]
        labels = labels or [f"p{i}" for i in range(len(pos))]
        return cls(tuple(labels), tuple(tuple(abs(a - b) for b in pos) for a in pos))

    @property
    def size(self):
        return len(self.labels)

    def min_positive_distance(self):
        vals = [d for row in self.distance for d in row if d > 0]
        return min(vals) if vals else Fraction(1)

    def diameter(self):
        return max(d for row in self.distance for d in row)

    def describe(self):
        return f"finite({self.size})"

    def to_json(self):
        return {
            "type": "finite",
            "labels": list(self.labels),
            "distance": [[str(v) for v in row] for row in self.distance],
        }


@dataclass(frozen=True)
class ProductSpace:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise InvalidArgument("product space needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    def describe(self):
        return " × ".join(f.describe() for f in self.factors)

    def to_json(self):
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}


SPACE_TYPES = (ShiftSpace, CircleSpace, FiniteSpace, ProductSpace)


def space_from_json(d):
    kind = d.get("type")
    if kind == "shift":
        return ShiftSpace(int(d.get("alphabet", 2)))
    if kind == "circle":
        return CircleSpace()
    if kind == "finite":
        if "distance" in d:
            return FiniteSpace(tuple(d["labels"]), tuple(tuple(Fraction(str(v)) for v in r) for r in d["distance"]))
        if "positions" in d:
            return FiniteSpace.on_line(d["positions"], d.get("labels"))
        return FiniteSpace.discrete(int(d["points"]), d.get("labels"))
    if kind == "product":
        return ProductSpace(tuple(space_from_json(f) for f in d["factors"]))
    raise InvalidArgument(f"unknown space type {kind!r}")


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class ShiftPoint:
    """Bi-infinite word equal to ``fill`` outside ``word`` placed at ``offset``."""

    word: tuple
    offset: int = 0
    fill: int = 0

    def at(self, i):
        k = i - self.offset
        if 0 <= k < len(self.word):
            return self.word[k]
        return self.fill

    def describe(self):
        return f"…{self.fill}[{''.join(map(str, self.word))}]_{self.offset}{self.fill}…"

    def to_json(self):
        return {"word": list(self.word), "offset": self.offset, "fill": self.fill}


def point_to_json(space, p):
    if isinstance(space, ShiftSpace):
        return p.to_json()
    if isinstance(space, CircleSpace):
        return str(p)
    if isinstance(space, FiniteSpace):
        return space.labels[p]
    return [point_to_json(s, q) for s, q in zip(space.factors, p)]


def point_from_json(space, d):
    if isinstance(space, ShiftSpace):
        return ShiftPoint(tuple(d["word"]), int(d.get("offset", 0)), int(d.get("fill", 0)))
    if isinstance(space, CircleSpace):
        return Fraction(str(d)) % 1
    if isinstance(space, FiniteSpace):
        return space.labels.index(d) if isinstance(d, str) else int(d)
    return tuple(point_from_json(s, q) for s, q in zip(space.factors, d))


def distance(space, x, y):
    """Exact metric. Shift uses d(x,y) = 2^-min{|i| : x_i != y_i}."""
    if isinstance(space, CircleSpace):
        t = (Fraction(x) - Fraction(y)) % 1
        return min(t, 1 - t)
    if isinstance(space, FiniteSpace):
        return space.distance[x][y]
    if isinstance(space, ShiftSpace):
        lo = min(x.offset, y.offset) - 1
        hi = max(x.offset + len(x.word), y.offset + len(y.word)) + 1
        reach = max(abs(lo), abs(hi))
        for r in range(reach + 1):
            if x.at(r) != y.at(r) or x.at(-r) != y.at(-r):
                return Fraction(1, 2**r)
        if x.fill != y.fill:
            return Fraction(1, 2 ** (reach + 1))
        return Fraction(0)
    return max(distance(s, a, b) for s, a, b in zip(space.factors, x, y))


def apply(m, space, x):
    """Image of a point under a map."""
    m = M.canonical(m)
    if m == M.IDENTITY:
        return x
    if isinstance(space, ShiftSpace) and isinstance(m, M.ShiftPower):
        # (sigma^j x)_i = x_{i+j}
        return ShiftPoint(x.word, x.offset - m.j, x.fill)
    if isinstance(space, CircleSpace):
        if isinstance(m, M.Rotation):
            return (Fraction(x) + m.alpha) % 1
        if isinstance(m, M.CircleMultiply):
            return (Fraction(x) * m.factor) % 1
    if isinstance(space, FiniteSpace) and isinstance(m, M.FiniteMap):
        _check_table(m, space)
        return m.table[x]
    if isinstance(space, ProductSpace):
        if isinstance(m, M.ProductMap) and len(m.components) == len(space.factors):
            return tuple(apply(c, s, p) for c, s, p in zip(m.components, space.factors, x))
        if isinstance(m, M.Projection):
            return x[m.index]
    raise UnsupportedOperation(f"cannot apply {m.describe()} on {space.describe()}")


def _check_table(m, space):
    if len(m.table) != space.size:
        raise InvalidArgument(f"{m.describe()} does not act on a {space.size}-point space")


# ---------------------------------------------------------------- parts


@dataclass(frozen=True, order=True)
class Cylinder:
    """Constraints ``x_c = s`` given as a sorted tuple of ``(c, s)``."""

    constraints: tuple

    @classmethod
    def from_word(cls, word, offset=0):
        return cls(tuple((offset + i, int(s)) for i, s in enumerate(word)))

    def describe(self):
        if not self.constraints:
            return "[]"
        lo, hi = self.constraints[0][0], self.constraints[-1][0]
        d = dict(self.constraints)
        body = "".join(str(d[i]) if i in d else "*" for i in range(lo, hi + 1))
        return f"[{body}]_{lo}"

    def shifted(self, delta):
        return Cylinder(tuple((c + delta, s) for c, s in self.constraints))

    def to_json(self):
        return [[c, s] for c, s in self.constraints]


@dataclass(frozen=True, order=True)
class Arc:
    """Half-open arc [left, left+length) on R/Z; length 1 is the whole circle."""

    left: Fraction
    length: Fraction

    def describe(self):
        if self.length >= 1:
            return "S1"
        return f"[{self.left},{self.left + self.length})"

    def to_json(self):
        return [str(self.left), str(self.length)]


@dataclass(frozen=True)
class PointSubset:
    members: frozenset

    def describe(self):
        return "{" + ",".join(str(i) for i in sorted(self.members)) + "}"

    def to_json(self):
        return sorted(self.members)


@dataclass(frozen=True)
class Box:
    components: tuple

    def describe(self):
        return "(" + " × ".join(c.describe() for c in self.components) + ")"

    def to_json(self):
        return [c.to_json() for c in self.components]


def _part_key(p):
    if isinstance(p, Cylinder):
        return (len(p.constraints), p.constraints)
    if isinstance(p, Arc):
        return (p.left, p.length)
    if isinstance(p, PointSubset):
        return tuple(sorted(p.members))
    return tuple(c.key() for c in p.components)


# ---------------------------------------------------------------- open sets


@dataclass(frozen=True)
class OpenSet:
    """A finite union of parts over one space, kept in normalized sorted form."""

    space: object
    parts: tuple = ()
    _key: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        parts = _normalize(self.space, tuple(self.parts))
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_key", tuple(_part_key(p) for p in parts))

    def key(self):
        return self._key

    def is_empty(self):
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def __and__(self, other):
        return intersect(self, other)

    def __or__(self, other):
        return union(self, other)

    def describe(self):
        if not self.parts:
            return "∅"
        return " ∪ ".join(p.describe() for p in self.parts)

    def __str__(self):
        return self.describe()

    def to_json(self):
        return [p.to_json() for p in self.parts]


def _normalize(space, parts):
    if isinstance(space, ShiftSpace):
        cyls = []
        for p in parts:
            if not isinstance(p, Cylinder):
                raise InvalidArgument(f"{p!r} is not a cylinder")
            d = {}
            for c, s in p.constraints:
                if not 0 <= s < space.alphabet_size:
                    raise InvalidArgument(f"symbol {s} outside alphabet")
                if d.setdefault(c, s) != s:
                    break
            else:
                cyls.append(Cylinder(tuple(sorted(d.items()))))
        uniq = sorted(set(cyls), key=_part_key)
        sets = [frozenset(c.constraints) for c in uniq]
        # drop cylinders contained in another one (weaker constraint set)
        kept = [
            c
            for i, c in enumerate(uniq)
            if not any(j != i and sets[j] < sets[i] for j in range(len(uniq)))
        ]
        return tuple(kept)
    if isinstance(space, CircleSpace):
        return _arcs_from_intervals(_merge(_intervals(parts)))
    if isinstance(space, FiniteSpace):
        members = set()
        for p in parts:
            if not isinstance(p, PointSubset):
                raise InvalidArgument(f"{p!r} is not a point subset")
            for i in p.members:
                if not 0 <= i < space.size:
                    raise InvalidArgument(f"point index {i} outside space")
            members |= p.members
        return (PointSubset(frozenset(members)),) if members else ()
    if isinstance(space, ProductSpace):
        boxes = []
        for p in parts:
            if not isinstance(p, Box) or len(p.components) != len(space.factors):
                raise InvalidArgument(f"{p!r} is not a box over {space.describe()}")
            comps = tuple(
                c if isinstance(c, OpenSet) and c.space == f else _coerce(f, c)
                for f, c in zip(space.factors, p.components)
            )
            if all(comps):
                boxes.append(Box(comps))
        uniq = {b.components: b for b in boxes}
        return tuple(sorted(uniq.values(), key=_part_key))
    raise InvalidArgument(f"unknown space {space!r}")


def _coerce(space, c):
    if isinstance(c, OpenSet):
        if c.space != space:
            raise InvalidArgument("box component over the wrong space")
        return c
    return OpenSet(space, tuple(c))


def _intervals(parts):
    out = []
    for p in parts:
        if not isinstance(p, Arc):
            raise InvalidArgument(f"{p!r} is not an arc")
        length = Fraction(p.length)
        if length <= 0:
            continue
        if length >= 1:
            return [(Fraction(0), Fraction(1))]
        a = Fraction(p.left) % 1
        b = a + length
        if b <= 1:
            out.append((a, b))
        else:
            out.append((a, Fraction(1)))
            out.append((Fraction(0), b - 1))
    return out


def _merge(intervals):
    merged = []
    for a, b in sorted(intervals):
        if merged and a <= merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return merged


def _arcs_from_intervals(iv):
    if not iv:
        return ()
    if iv == [(0, 1)]:
        return (Arc(Fraction(0), Fraction(1)),)
    if len(iv) > 1 and iv[0][0] == 0 and iv[-1][1] == 1:
        a, _ = iv[-1]
        _, b = iv[0]
        wrap = Arc(a, (1 - a) + b)
        iv = iv[1:-1]
        return tuple(sorted([Arc(x, y - x) for x, y in iv] + [wrap], key=_part_key))
    return tuple(Arc(x, y - x) for x, y in iv)


# ---------------------------------------------------------------- constructors


def cylinder(space, word, offset=0):
    return OpenSet(space, (Cylinder.from_word(word, offset),))


def constrained(space, constraints):
    return OpenSet(space, (Cylinder(tuple(sorted(constraints))),))


def arc(left, length, space=None):
    return OpenSet(space or CircleSpace(), (Arc(Fraction(left), Fraction(length)),))


def points(space, members):
    return OpenSet(space, (PointSubset(frozenset(members)),))


def box(space, components):
    return OpenSet(space, (Box(tuple(components)),))


def whole(space):
    if isinstance(space, ShiftSpace):
        return OpenSet(space, (Cylinder(()),))
    if isinstance(space, CircleSpace):
        return arc(0, 1, space)
    if isinstance(space, FiniteSpace):
        return points(space, range(space.size))
    return box(space, [whole(f) for f in space.factors])


def empty(space):
    return OpenSet(space, ())


def openset_from_json(space, d):
    if isinstance(space, ShiftSpace):
        return OpenSet(space, tuple(Cylinder(tuple((int(c), int(s)) for c, s in p)) for p in d))
    if isinstance(space, CircleSpace):
        return OpenSet(space, tuple(Arc(Fraction(str(a)), Fraction(str(b))) for a, b in d))
    if isinstance(space, FiniteSpace):
        return OpenSet(space, tuple(PointSubset(frozenset(int(i) for i in p)) for p in d))
    return OpenSet(
        space,
        tuple(Box(tuple(openset_from_json(f, c) for f, c in zip(space.factors, p))) for p in d),
    )


# ---------------------------------------------------------------- algebra


def _same_space(a, b):
    if a.space != b.space:
        raise InvalidArgument(f"open sets over different spaces: {a.space.describe()} vs {b.space.describe()}")


def union(a, b):
    _same_space(a, b)
    return OpenSet(a.space, a.parts + b.parts)


def intersect(a, b):
    _same_space(a, b)
    space = a.space
    if not a.parts or not b.parts:
        return OpenSet(space, ())
    if isinstance(space, ShiftSpace):
        out = []
        for p in a.parts:
            for q in b.parts:
                d = dict(p.constraints)
                if all(d.setdefault(c, s) == s for c, s in q.constraints):
                    out.append(Cylinder(tuple(sorted(d.items()))))
        return OpenSet(space, tuple(out))
    if isinstance(space, CircleSpace):
        ia, ib = _intervals(a.parts), _intervals(b.parts)
        out = []
        for x0, x1 in ia:
            for y0, y1 in ib:
                lo, hi = max(x0, y0), min(x1, y1)
                if lo < hi:
                    out.append((lo, hi))
        return OpenSet(space, _arcs_from_intervals(_merge(out)))
    if isinstance(space, FiniteSpace):
        m = a.parts[0].members & b.parts[0].members
        return OpenSet(space, (PointSubset(m),) if m else ())
    out = []
    for p in a.parts:
        for q in b.parts:
            comps = tuple(intersect(x, y) for x, y in zip(p.components, q.components))
            if all(comps):
                out.append(Box(comps))
    return OpenSet(space, tuple(out))


def is_empty(s):
    return s.is_empty()


def contains(s, x):
    """Exact membership test of a point."""
    space = s.space
    for p in s.parts:
        if isinstance(p, Cylinder):
            if all(x.at(c) == v for c, v in p.constraints):
                return True
        elif isinstance(p, Arc):
            if p.length >= 1 or (Fraction(x) - p.left) % 1 < p.length:
                return True
        elif isinstance(p, PointSubset):
            if x in p.members:
                return True
        else:
            if all(contains(c, y) for c, y in zip(p.components, x)):
                return True
    return False


def image(m, s):
    """Exact forward image of an open set."""
    return _transport(m, s, forward=True)


def preimage(m, s):
    """Exact preimage of an open set."""
    return _transport(m, s, forward=False)


def _transport(m, s, forward):
    m = M.canonical(m)
    space = s.space
    if m == M.IDENTITY or not s.parts:
        return s
    if isinstance(space, ShiftSpace) and isinstance(m, M.ShiftPower):
        delta = -m.j if forward else m.j
        return OpenSet(space, tuple(p.shifted(delta) for p in s.parts))
    if isinstance(space, CircleSpace):
        if isinstance(m, M.Rotation):
            delta = m.alpha if forward else -m.alpha
            return OpenSet(space, tuple(Arc((p.left + delta) % 1, p.length) for p in s.parts))
        if isinstance(m, M.CircleMultiply):
            k = m.factor
            if forward:
                return OpenSet(space, tuple(Arc(p.left * k % 1, min(Fraction(1), p.length * k)) for p in s.parts))
            return OpenSet(
                space,
                tuple(Arc((p.left + j) / k, p.length / k) for p in s.parts for j in range(k)),
            )
    if isinstance(space, FiniteSpace) and isinstance(m, M.FiniteMap):
        _check_table(m, space)
        mem = s.parts[0].members
        if forward:
            out = {m.table[i] for i in mem}
        else:
            out = {i for i, t in enumerate(m.table) if t in mem}
        return OpenSet(space, (PointSubset(frozenset(out)),) if out else ())
    if isinstance(space, ProductSpace) and isinstance(m, M.ProductMap):
        if len(m.components) != len(space.factors):
            raise InvalidArgument("product map arity differs from space")
        return OpenSet(
            space,
            tuple(
                Box(tuple(_transport(c, comp, forward) for c, comp in zip(m.components, p.components)))
                for p in s.parts
            ),
        )
    raise UnsupportedOperation(
        f"no exact {'image' if forward else 'preimage'} of {m.describe()} on {space.describe()}"
    )


def is_subset(a, b):
    """Decide a ⊆ b for sets whose parts are each contained in a single part of b.

    Exact for circles and finite spaces; for shifts and boxes a part-wise
    sufficient test (used only by normalization checks and tests).
    """
    _same_space(a, b)
    if isinstance(a.space, (CircleSpace, FiniteSpace)):
        return union(a, b) == b
    if isinstance(a.space, ShiftSpace):
        return all(any(set(q.constraints) <= set(p.constraints) for q in b.parts) for p in a.parts)
    return all(
        any(all(is_subset(x, y) for x, y in zip(p.components, q.components)) for q in b.parts)
        for p in a.parts
    )


# ---------------------------------------------------------------- basis & witnesses


def basis(space, resolution):
    """Canonical finite basis at the given resolution.

    Shift: offset-0 cylinders of length ``resolution``; circle: the arcs
    [k/r, (k+1)/r); finite: singletons; product: boxes of factor bases
    (``resolution`` may then be a tuple, one entry per factor).
    """
    if isinstance(space, ProductSpace):
        if isinstance(resolution, (tuple, list)):
            if len(resolution) != len(space.factors):
                raise InvalidArgument("resolution tuple length differs from product arity")
            res = tuple(resolution)
        else:
            res = (resolution,) * len(space.factors)
        factor_bases = [basis(f, r) for f, r in zip(space.factors, res)]
        return [box(space, comps) for comps in itertools.product(*factor_bases)]
    r = int(resolution)
    if r < 1:
        raise InvalidArgument("resolution must be >= 1")
    if isinstance(space, ShiftSpace):
        return [cylinder(space, w) for w in itertools.product(range(space.alphabet_size), repeat=r)]
    if isinstance(space, CircleSpace):
        return [arc(Fraction(k, r), Fraction(1, r), space) for k in range(r)]
    if isinstance(space, FiniteSpace):
        return [points(space, [i]) for i in range(space.size)]
    raise InvalidArgument(f"unknown space {space!r}")


def ball(space, x, radius):
    """Open ball B(x, radius) in a finite space."""
    if not isinstance(space, FiniteSpace):
        raise UnsupportedOperation("balls are only materialized for finite spaces")
    return points(space, [y for y in range(space.size) if space.distance[x][y] < radius])


def witness(s):
    """Canonical point of a non-empty open set.

    Shift: the lexicographically least completion of the first cylinder
    (free coordinates and the fill set to 0); circle: the least rational
    in the set; finite: the least index; boxes componentwise.
    """
    if not s.parts:
        raise InvalidArgument("empty open set has no witness")
    space = s.space
    if isinstance(space, ShiftSpace):
        p = s.parts[0]
        if not p.constraints:
            return ShiftPoint((), 0, 0)
        lo, hi = p.constraints[0][0], p.constraints[-1][0]
        d = dict(p.constraints)
        return ShiftPoint(tuple(d.get(i, 0) for i in range(lo, hi + 1)), lo, 0)
    if isinstance(space, CircleSpace):
        for p in s.parts:
            if p.length >= 1 or p.left + p.length > 1:
                return Fraction(0)
        return min(p.left for p in s.parts)
    if isinstance(space, FiniteSpace):
        return min(s.parts[0].members)
    return tuple(witness(c) for c in s.parts[0].components)


def eps_dense(pts, space, resolution):
    """True iff every basis element at ``resolution`` contains a listed point."""
    pts = list(pts)
    if not pts:
        raise InvalidArgument("eps_dense needs at least one point")
    return all(any(contains(b, x) for x in pts) for b in basis(space, resolution))
