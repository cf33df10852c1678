"""Map sequences, non-autonomous systems and their derived systems.

A ``System`` is either a base system (a space plus a ``MapSequence``) or
derived from other systems: the k-th iterate, the vector system over X^p, or
a product of systems. ``compose(sys, i, n)`` returns the canonical map
f_{i+n-1} ∘ ... ∘ f_i; prefix compositions are memoized so that walking
f_1^1 .. f_1^N costs N map multiplications.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

from . import maps as M
from . import space as S
from .errors import InvalidArgument, OutOfHorizon, UnsupportedOperation
from .verdict import fails, holds

# ---------------------------------------------------------------- sequences


class MapSequence:
    """Rule n -> f_n for n = 1, 2, ..."""

    bound = None

    def map_at(self, n):
        raise NotImplementedError

    def maps(self, start, stop):
        return [self.map_at(n) for n in range(start, stop)]


@dataclass(frozen=True)
class Constant(MapSequence):
    m: object

    def __post_init__(self):
        object.__setattr__(self, "m", M.canonical(self.m))

    def map_at(self, n):
        _check_index(n)
        return self.m

    @property
    def period(self):
        return 1

    def describe(self):
        return f"constant({self.m.describe()})"

    def to_json(self):
        return {"type": "constant", "map": self.m.to_json()}


@dataclass(frozen=True)
class Periodic(MapSequence):
    seq_maps: tuple

    def __post_init__(self):
        if not self.seq_maps:
            raise InvalidArgument("periodic sequence needs at least one map")
        object.__setattr__(self, "seq_maps", tuple(M.canonical(m) for m in self.seq_maps))

    @property
    def period(self):
        return len(self.seq_maps)

    def map_at(self, n):
        _check_index(n)
        return self.seq_maps[(n - 1) % len(self.seq_maps)]

    def describe(self):
        return "periodic(" + ", ".join(m.describe() for m in self.seq_maps) + ")"

    def to_json(self):
        return {"type": "periodic", "maps": [m.to_json() for m in self.seq_maps]}


class BlockPattern(MapSequence):
    """Concatenation of finite blocks.

    ``rule(b, start)`` returns block number ``b`` (1-based) as a list of maps,
    given the index ``start`` at which the block begins.
    """

    def __init__(self, rule: Callable, name="blocks", params=None):
        self.rule = rule
        self.name = name
        self.params = dict(params or {})
        self._maps = []
        self._block_starts = []
        self._lock = threading.Lock()

    def _extend_to(self, n):
        with self._lock:
            while len(self._maps) < n:
                b = len(self._block_starts) + 1
                start = len(self._maps) + 1
                block = [M.canonical(m) for m in self.rule(b, start)]
                if not block:
                    raise InvalidArgument(f"block {b} of {self.name} is empty")
                self._block_starts.append(start)
                self._maps.extend(block)

    def map_at(self, n):
        _check_index(n)
        self._extend_to(n)
        return self._maps[n - 1]

    def block_starts(self, upto):
        self._extend_to(upto)
        return [s for s in self._block_starts if s <= upto]

    def describe(self):
        extra = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}({extra})"

    def to_json(self):
        return {"type": "blocks", "name": self.name, "params": {k: str(v) for k, v in sorted(self.params.items())}}


class Explicit(MapSequence):
    """Rule n -> f_n that is only evaluable for n <= bound."""

    def __init__(self, rule: Callable, bound: int, name="explicit"):
        self.rule = rule
        self.bound = int(bound)
        self.name = name

    def map_at(self, n):
        _check_index(n)
        if n > self.bound:
            raise OutOfHorizon(f"{self.name}: f_{n} requested beyond evaluation bound {self.bound}")
        return M.canonical(self.rule(n))

    def describe(self):
        return f"{self.name}(bound={self.bound})"

    def to_json(self):
        return {"type": "explicit", "name": self.name, "bound": self.bound}


def _check_index(n):
    if n < 1:
        raise InvalidArgument(f"map indices start at 1, got {n}")


# ---------------------------------------------------------------- systems


class System:
    """A non-autonomous system; derived systems reference their parents."""

    def __init__(self, space, seq=None, *, kind="base", base=None, k=None, vector=None, components=(), name=None):
        self.space = space
        self.seq = seq
        self.kind = kind
        self.base = base
        self.k = k
        self.vector = vector
        self.components = tuple(components)
        self.name = name
        self._chains = {}
        self._lock = threading.Lock()
        self.cache = {}
        self.cache_lock = threading.Lock()
        self._derived = {}

    def describe(self):
        if self.name:
            return self.name
        if self.kind == "base":
            return self.seq.describe()
        if self.kind == "iterate":
            return f"{self.base.describe()}^[{self.k}]"
        if self.kind == "vector":
            return f"{self.base.describe()}^[{','.join(map(str, self.vector))}]"
        return " × ".join(c.describe() for c in self.components)

    def __repr__(self):
        return f"System({self.describe()})"

    @property
    def derivation(self):
        if self.kind == "iterate":
            return ("Iterate", self.k)
        if self.kind == "vector":
            return ("VectorSystem", self.vector)
        if self.kind == "product":
            return ("Product", len(self.components))
        return ("Base",)

    @property
    def bound(self):
        if self.kind == "base":
            return self.seq.bound
        if self.kind in ("iterate", "vector"):
            b = self.base.bound
            if b is None:
                return None
            scale = self.k if self.kind == "iterate" else max(self.vector)
            return b // scale
        bounds = [c.bound for c in self.components if c.bound is not None]
        return min(bounds) if bounds else None

    def map_at(self, n):
        return self.compose(n, 1)

    def compose(self, i, n):
        if i < 1 or n < 0:
            raise InvalidArgument(f"compose needs i >= 1 and n >= 0, got ({i}, {n})")
        if n == 0:
            return M.IDENTITY
        if self.kind == "base":
            return self._base_compose(i, n)
        if self.kind == "iterate":
            return self.base.compose(self.k * (i - 1) + 1, self.k * n)
        if self.kind == "vector":
            return M.product_map(self.base.compose(a * (i - 1) + 1, a * n) for a in self.vector)
        return M.product_map(c.compose(i, n) for c in self.components)

    def _base_compose(self, i, n):
        chain = self._chains.get(i)
        if chain is not None and len(chain) > n:
            return chain[n]
        with self._lock:
            chain = self._chains.setdefault(i, [M.IDENTITY])
            while len(chain) <= n:
                j = i + len(chain) - 1
                chain.append(M.compose_maps(self.seq.map_at(j), chain[-1]))
            return chain[n]

    def uncached_compose(self, i, n):
        """Direct left fold, bypassing the memo table."""
        out = M.IDENTITY
        for j in range(i, i + n):
            out = M.compose_maps(self.map_at(j), out)
        return out

    @property
    def period(self):
        if self.kind == "base":
            return getattr(self.seq, "period", None)
        return None

    def to_json(self):
        out = {"kind": self.kind, "space": self.space.to_json(), "name": self.describe()}
        if self.kind == "base":
            out["sequence"] = self.seq.to_json()
        elif self.kind == "iterate":
            out["k"] = self.k
            out["base"] = self.base.to_json()
        elif self.kind == "vector":
            out["vector"] = list(self.vector)
            out["base"] = self.base.to_json()
        else:
            out["components"] = [c.to_json() for c in self.components]
        return out


def system(space, seq, name=None):
    return System(space, seq, name=name)


def compose(sys, i, n):
    return sys.compose(i, n)


def iterate_system(sys, k):
    if int(k) < 1:
        raise InvalidArgument("iterate order must be >= 1")
    if k == 1:
        return sys
    if sys.kind == "iterate":
        return iterate_system(sys.base, sys.k * k)
    # memoized so hitting caches of derived systems are shared
    with sys.cache_lock:
        it = sys._derived.get(("iterate", k))
        if it is None:
            it = sys._derived[("iterate", k)] = System(sys.space, kind="iterate", base=sys, k=int(k))
    return it


def vector_system(sys, a):
    a = tuple(int(x) for x in a)
    if not a or min(a) < 1:
        raise InvalidArgument("vector entries must be positive")
    with sys.cache_lock:
        v = sys._derived.get(("vector", a))
        if v is None:
            space = S.ProductSpace((sys.space,) * len(a))
            v = sys._derived[("vector", a)] = System(space, kind="vector", base=sys, vector=a)
    return v


def product(systems):
    systems = list(systems)
    if not systems:
        raise InvalidArgument("product of no systems")
    space = S.ProductSpace(tuple(s.space for s in systems))
    return System(space, kind="product", components=systems)


def vector_components(sys):
    """Component systems of a product-like system, or None for base/iterate."""
    if sys.kind == "vector":
        return [iterate_system(sys.base, a) for a in sys.vector]
    if sys.kind == "product":
        return list(sys.components)
    return None


# ---------------------------------------------------------------- structural checks


def is_feeble_open(sys, resolution, index_bound):
    params = {"resolution": resolution, "index_bound": index_bound}
    for i in range(1, index_bound + 1):
        f = sys.map_at(i)
        for U in S.basis(sys.space, resolution):
            # every image of a basis set here is open, so int() is the identity
            if S.image(f, U).is_empty():
                return fails("feeble_open", params, {"index": i, "U": U.describe()}, evidence={"U": U, "index": i})
    return holds("feeble_open", params)


def check_commutative(seq, index_bound):
    params = {"index_bound": index_bound}
    fs = [seq.map_at(n) for n in range(1, index_bound + 1)]
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            if M.compose_maps(fs[i], fs[j]) != M.compose_maps(fs[j], fs[i]):
                return fails("commutative", params, {"i": i + 1, "j": j + 1})
    return holds("commutative", params)


def check_periodic(seq, k, index_bound):
    params = {"k": k, "index_bound": index_bound}
    if k < 1:
        raise InvalidArgument("period must be >= 1")
    for n in range(1, index_bound - k + 1):
        if seq.map_at(n + k) != seq.map_at(n):
            return fails("periodic", params, {"n": n, "n_plus_k": n + k})
    return holds("periodic", params)


def periodic_collapse(seq, k):
    """g = f_k ∘ ... ∘ f_1 for a k-periodic sequence."""
    return M.compose_maps(*reversed([seq.map_at(n) for n in range(1, k + 1)]))


def check_semiconjugacy(h, f, g, index_bound):
    """Check g_n ∘ h = h ∘ f_n for n <= index_bound, plus surjectivity of h.

    Supported factor maps: coordinate projections of product systems,
    finite tables between finite spaces, and circle multiplication.
    """
    params = {"h": h.describe(), "index_bound": index_bound}
    h = M.canonical(h)
    if isinstance(h, M.Projection):
        if not isinstance(f.space, S.ProductSpace) or len(f.space.factors) != h.arity:
            raise InvalidArgument("projection factor needs a product system of matching arity")
        if f.space.factors[h.index] != g.space:
            raise InvalidArgument("projection target differs from the factor system space")
        for n in range(1, index_bound + 1):
            fn = f.map_at(n)
            comp = M.IDENTITY if fn == M.IDENTITY else fn.components[h.index]
            if comp != g.map_at(n):
                return fails("semiconjugacy", params, {"n": n, "reason": "g_n ∘ h ≠ h ∘ f_n"})
        return holds("semiconjugacy", params, notes=("projection is surjective by construction",))
    if isinstance(f.space, S.FiniteSpace) and isinstance(g.space, S.FiniteSpace):
        table = h.table if isinstance(h, M.FiniteMap) else tuple(range(f.space.size))
        if len(table) != f.space.size or any(not 0 <= t < g.space.size for t in table):
            raise InvalidArgument("factor table does not map X into Y")
        missed = sorted(set(range(g.space.size)) - set(table))
        if missed:
            raise InvalidArgument(f"factor map is not surjective: misses point {g.space.labels[missed[0]]}")
        for n in range(1, index_bound + 1):
            fn, gn = f.map_at(n), g.map_at(n)
            for x in range(f.space.size):
                if S.apply(gn, g.space, table[x]) != table[S.apply(fn, f.space, x)]:
                    return fails("semiconjugacy", params, {"n": n, "point": f.space.labels[x]})
        return holds("semiconjugacy", params)
    if isinstance(f.space, S.CircleSpace) and isinstance(g.space, S.CircleSpace):
        k = h.factor if isinstance(h, M.CircleMultiply) else 1
        if h != M.IDENTITY and not isinstance(h, M.CircleMultiply):
            raise UnsupportedOperation(f"{h.describe()} is not a supported circle factor")
        for n in range(1, index_bound + 1):
            fn = f.map_at(n)
            if fn == M.IDENTITY:
                expected = M.IDENTITY
            elif isinstance(fn, M.Rotation):
                expected = M.rotation(fn.alpha * k)
            else:
                raise UnsupportedOperation(f"cannot commute ×{k} past {fn.describe()}")
            if g.map_at(n) != expected:
                return fails("semiconjugacy", params, {"n": n, "reason": "g_n ∘ h ≠ h ∘ f_n"})
        return holds("semiconjugacy", params, notes=("x -> kx is surjective on the circle",))
    if h == M.IDENTITY and f.space == g.space:
        for n in range(1, index_bound + 1):
            if f.map_at(n) != g.map_at(n):
                return fails("semiconjugacy", params, {"n": n})
        return holds("semiconjugacy", params)
    raise UnsupportedOperation(f"unsupported factor map {h.describe()} between {f.space.describe()} and {g.space.describe()}")


# ---------------------------------------------------------------- sup metric


class SupDistance(NamedTuple):
    value: Fraction
    exact: bool


def sup_distance(m1, m2, space, sample_resolution=8):
    """D(f, g) = sup_x d(f x, g x).

    Exact for finite spaces, rotation pairs, shift-power pairs (0 or 1) and
    products of those; otherwise a lower bound over basis witness points.
    """
    m1, m2 = M.canonical(m1), M.canonical(m2)
    if isinstance(space, S.FiniteSpace):
        return SupDistance(
            max(space.distance[S.apply(m1, space, x)][S.apply(m2, space, x)] for x in range(space.size)),
            True,
        )
    if isinstance(space, S.CircleSpace):
        if all(isinstance(m, (M.Identity, M.Rotation)) for m in (m1, m2)):
            a1 = m1.alpha if isinstance(m1, M.Rotation) else Fraction(0)
            a2 = m2.alpha if isinstance(m2, M.Rotation) else Fraction(0)
            return SupDistance(S.distance(space, a1, a2), True)
    if isinstance(space, S.ShiftSpace):
        if all(isinstance(m, (M.Identity, M.ShiftPower)) for m in (m1, m2)):
            return SupDistance(Fraction(0) if m1 == m2 else Fraction(1), True)
    if isinstance(space, S.ProductSpace):
        c1 = m1.components if isinstance(m1, M.ProductMap) else (M.IDENTITY,) * len(space.factors)
        c2 = m2.components if isinstance(m2, M.ProductMap) else (M.IDENTITY,) * len(space.factors)
        parts = [sup_distance(a, b, f, sample_resolution) for a, b, f in zip(c1, c2, space.factors)]
        return SupDistance(max(p.value for p in parts), all(p.exact for p in parts))
    pts = [S.witness(U) for U in S.basis(space, sample_resolution)]
    value = max(S.distance(space, S.apply(m1, space, x), S.apply(m2, space, x)) for x in pts)
    return SupDistance(value, False)


def collective_convergence_gap(seq, limit, r, k_bound, space, sample_resolution=8):
    """max_{0<=k<=k_bound} D(f_r^k, limit^k).

    f_r^k is the block of k maps starting at index r, the quantity compared
    with limit^k when orbits are followed from time r onwards.
    """
    sys = seq if isinstance(seq, System) else System(space, seq)
    if r < 1 or k_bound < 0:
        raise InvalidArgument("need r >= 1 and k_bound >= 0")
    gap = Fraction(0)
    for k in range(k_bound + 1):
        d = sup_distance(sys.compose(r, k), M.power(limit, k), space, sample_resolution)
        gap = max(gap, d.value)
    return gap
