"""Truncated hitting sets, multi-hitting indices, Delta-intersections, orbits.

Hitting sets are kept as Python ints used as bitmasks (bit n set iff n is
a hitting time) and cached on the system. Product and vector systems reuse
the component masks: a box pair hits at n iff every component pair does.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import space as S
from . import system as Y
from .errors import InvalidArgument


@dataclass(frozen=True)
class HittingSet:
    indices: tuple
    horizon: int
    pair: tuple

    def __contains__(self, n):
        return n in set(self.indices)

    def __len__(self):
        return len(self.indices)

    def recheck(self, sys):
        """Re-derive every listed index through the open-set primitives."""
        U, V = self.pair
        return all(hits_at(sys, U, V, n) for n in self.indices)

    def to_json(self):
        U, V = self.pair
        return {"indices": list(self.indices), "horizon": self.horizon, "U": U.describe(), "V": V.describe()}


@dataclass(frozen=True)
class Orbit:
    start: object
    points: tuple

    @property
    def horizon(self):
        return len(self.points) - 1


def mask_indices(mask):
    out = []
    n = 0
    while mask:
        if mask & 1:
            out.append(n)
        mask >>= 1
        n += 1
    return out


def full_mask(horizon):
    """Bits 1..horizon."""
    return ((1 << (horizon + 1)) - 1) ^ 1


def scale_mask(mask, k, count):
    """Bits n <= count such that bit k*n of ``mask`` is set."""
    if k == 1:
        return mask & full_mask(count)
    out = 0
    for n in range(1, count + 1):
        if mask >> (k * n) & 1:
            out |= 1 << n
    return out


def hits_at(sys, U, V, n):
    """f_1^n(U) ∩ V ≠ ∅, straight from the primitives."""
    return not S.intersect(S.image(sys.compose(1, n), U), V).is_empty()


def hitting_mask(sys, U, V, horizon):
    if horizon < 1:
        raise InvalidArgument("horizon must be >= 1")
    if U.space != sys.space or V.space != sys.space:
        raise InvalidArgument("open sets are not over the system's space")
    key = ("hit", U, V)
    cached = sys.cache.get(key)
    if cached is not None and cached[0] >= horizon:
        return cached[1] & full_mask(horizon)
    mask = _compute_mask(sys, U, V, horizon)
    with sys.cache_lock:
        old = sys.cache.get(key)
        if old is None or old[0] < horizon:
            sys.cache[key] = (horizon, mask)
    return mask


def _compute_mask(sys, U, V, horizon):
    if U.is_empty() or V.is_empty():
        return 0
    if sys.kind == "iterate":
        return scale_mask(hitting_mask(sys.base, U, V, sys.k * horizon), sys.k, horizon)
    comps = Y.vector_components(sys)
    if comps is not None:
        # N(∪U_i, ∪V_j) = ∪ N(U_i, V_j); a box pair needs every coordinate
        mask = 0
        for p in U.parts:
            for q in V.parts:
                m = full_mask(horizon)
                for c, a, b in zip(comps, p.components, q.components):
                    m &= hitting_mask(c, a, b, horizon)
                    if not m:
                        break
                mask |= m
        return mask
    mask = 0
    for n in range(1, horizon + 1):
        if hits_at(sys, U, V, n):
            mask |= 1 << n
    return mask


def hitting_set(sys, U, V, horizon):
    """{n <= horizon : f_1^n(U) ∩ V ≠ ∅}."""
    return HittingSet(tuple(mask_indices(hitting_mask(sys, U, V, horizon))), horizon, (U, V))


def multi_hitting_mask(sys, a, Us, Vs, horizon):
    a = tuple(int(x) for x in a)
    if not a or min(a) < 1:
        raise InvalidArgument("vector entries must be positive")
    if not len(a) == len(Us) == len(Vs):
        raise InvalidArgument("a, Us and Vs must have equal length")
    count = horizon // max(a)
    if count < 1:
        return 0
    mask = full_mask(count)
    for ai, U, V in zip(a, Us, Vs):
        mask &= scale_mask(hitting_mask(sys, U, V, ai * count), ai, count)
        if not mask:
            break
    return mask


def multi_hitting(sys, a, Us, Vs, horizon):
    """All l <= horizon/max(a) with f_1^{a_i l}(U_i) ∩ V_i ≠ ∅ for every i."""
    return mask_indices(multi_hitting_mask(sys, a, Us, Vs, horizon))


def delta_intersection(sys, Us, n):
    """∩_{i=0}^{m} f_1^{-in}(U_i) as an open set."""
    if not Us:
        raise InvalidArgument("need at least U_0")
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    out = Us[0]
    for i, U in enumerate(Us[1:], start=1):
        out = S.intersect(out, S.preimage(sys.compose(1, i * n), U))
        if out.is_empty():
            break
    return out


def delta_witness(sys, Us, n):
    """Canonical point x with f_1^{in}(x) ∈ U_i for all i, or None."""
    s = delta_intersection(sys, Us, n)
    return None if s.is_empty() else S.witness(s)


def orbit(sys, x, horizon):
    pts = [x]
    for n in range(1, horizon + 1):
        pts.append(S.apply(sys.map_at(n), sys.space, pts[-1]))
    return Orbit(x, tuple(pts))


def backward_hits(sys, U, V, n):
    """U ∩ f_1^{-n}(V) ≠ ∅, the dual form of a hit."""
    return not S.intersect(U, S.preimage(sys.compose(1, n), V)).is_empty()
