"""Brute-force oracles and random instance generators.

Nothing here calls the library's algebra: sets are read through their part
representations and decided by enumeration (shift), grid sampling with an
exactness guard (circle) or exhaustive point maps (finite spaces).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from ndslab import maps as M
from ndslab import space as S
from ndslab import system as Y
from ndslab.hitting import hitting_set

# ---------------------------------------------------------------- shift


def cyl_constraints(s):
    """List of constraint dicts, one per cylinder part."""
    return [dict(p.constraints) for p in s.parts]


def shift_member(parts, x):
    """x is a dict coordinate -> symbol, 0 elsewhere."""
    return any(all(x.get(c, 0) == v for c, v in d.items()) for d in parts)


def assignments(coords, alphabet):
    coords = sorted(coords)
    for vals in itertools.product(range(alphabet), repeat=len(coords)):
        yield dict(zip(coords, vals))


def shift_meets(a_parts, b_parts, alphabet):
    """Some point lies in both unions: fix a part of a, enumerate the rest."""
    for da in a_parts:
        for db in b_parts:
            free = set(db) - set(da)
            for asg in assignments(free, alphabet):
                x = {**asg, **da}
                if all(x.get(c, 0) == v for c, v in db.items()):
                    return True
    return False


def shift_equal(p_parts, q_parts, alphabet):
    """Two cylinder unions agree on every assignment of their coordinates."""
    coords = set()
    for d in p_parts + q_parts:
        coords |= set(d)
    return all(
        shift_member(p_parts, x) == shift_member(q_parts, x)
        for x in assignments(coords, alphabet)
    )


def shift_translate(parts, j):
    """{sigma^j x : x in U}: y in it iff y_{c-j} = s for the constraints of U."""
    return [{c - j: v for c, v in d.items()} for d in parts]


def random_cylinder_set(rng, alphabet=2, max_len=8, max_parts=2, offsets=(-4, 4)):
    parts = []
    for _ in range(rng.randint(1, max_parts)):
        length = rng.randint(0, max_len)
        off = rng.randint(*offsets)
        parts.append(S.Cylinder.from_word([rng.randrange(alphabet) for _ in range(length)], off))
    return S.OpenSet(S.ShiftSpace(alphabet), tuple(parts))


# ---------------------------------------------------------------- circle


def arc_member(arcs, x):
    """arcs as (left, length) pairs."""
    return any(length >= 1 or (x - left) % 1 < length for left, length in arcs)


def arc_pairs(s):
    return [(p.left, p.length) for p in s.parts]


def on_grid(s, q):
    """Exactness guard: every endpoint lies on (1/q)Z."""
    return all((p.left * q).denominator == 1 and (p.length * q).denominator == 1 for p in s.parts)


def grid(q):
    return [Fraction(k, q) for k in range(q)]


def random_arc_set(rng, q, max_parts=2):
    parts = []
    for _ in range(rng.randint(1, max_parts)):
        parts.append(S.Arc(Fraction(rng.randrange(q), q), Fraction(rng.randint(1, q), q)))
    return S.OpenSet(S.CircleSpace(), tuple(parts))


# ---------------------------------------------------------------- finite


def random_subset(rng, space):
    members = {i for i in range(space.size) if rng.random() < 0.5}
    return S.points(space, members)


def members(s):
    return set(s.parts[0].members) if s.parts else set()


def random_table(rng, n):
    return tuple(rng.randrange(n) for _ in range(n))


# ---------------------------------------------------------------- systems and hitting times


def random_shift_system(rng, length=4):
    powers = [rng.randint(-3, 3) for _ in range(rng.randint(1, length))]
    seq = Y.Periodic(tuple(M.shift(j) for j in powers))
    return Y.system(S.ShiftSpace(2), seq), ("shift", powers)


def random_circle_system(rng, q, length=4):
    angles = [Fraction(rng.randrange(q), q) for _ in range(rng.randint(1, length))]
    seq = Y.Periodic(tuple(M.rotation(a) for a in angles))
    return Y.system(S.CircleSpace(), seq), ("circle", angles)


def random_finite_system(rng, n, length=3):
    tables = [random_table(rng, n) for _ in range(rng.randint(1, length))]
    seq = Y.Periodic(tuple(M.finite_map(t) for t in tables))
    return Y.system(S.FiniteSpace.discrete(n), seq), ("finite", tables)


def oracle_hitting(desc, U, V, horizon, q=None, n_points=None):
    """{n <= horizon : f_1^n(U) ∩ V ≠ ∅} by direct point dynamics."""
    kind, data = desc
    period = len(data)
    out = []
    if kind == "shift":
        total = 0
        Up, Vp = cyl_constraints(U), cyl_constraints(V)
        for n in range(1, horizon + 1):
            total += data[(n - 1) % period]
            # x in U and (sigma^total x)_c = x_{c+total} = v for (c, v) in V
            pulled = [{c + total: v for c, v in d.items()} for d in Vp]
            if shift_meets(Up, pulled, 2):
                out.append(n)
        return out
    if kind == "circle":
        total = Fraction(0)
        Ua, Va = arc_pairs(U), arc_pairs(V)
        starts = [x for x in grid(q) if arc_member(Ua, x)]
        for n in range(1, horizon + 1):
            total += data[(n - 1) % period]
            if any(arc_member(Va, (x + total) % 1) for x in starts):
                out.append(n)
        return out
    pos = list(range(n_points))
    Um, Vm = members(U), members(V)
    for n in range(1, horizon + 1):
        t = data[(n - 1) % period]
        pos = [t[p] for p in pos]
        if any(pos[x] in Vm for x in Um):
            out.append(n)
    return out


# ---------------------------------------------------------------- integer sets


def brute_classes(A, horizon, run_request, gap_bound):
    """Direct window scans for syndetic / thick / thickly syndetic."""
    A = set(A)

    def syndetic(B, hi):
        if hi < 1 or not any(1 <= b <= hi for b in B):
            return False
        if hi < gap_bound:
            return True
        return all(any(w <= b < w + gap_bound for b in B) for w in range(1, hi - gap_bound + 2))

    syn = syndetic(A, horizon)
    thick = any(all(m + i in A for i in range(run_request)) for m in range(1, horizon + 1))
    ts = all(
        syndetic({m for m in range(1, horizon - l + 1) if all(m + i in A for i in range(l + 1))}, horizon - l)
        for l in range(run_request)
    )
    return syn, thick, ts


# ---------------------------------------------------------------- oracle campaigns
#
# Each campaign runs ``cases`` random instances per space family and returns
# (number of instances, list of mismatches).


def _pick_q(rng):
    return rng.randint(1, 64)


def campaign_intersect(rng, cases=1000):
    bad, count = [], 0
    for _ in range(cases):
        a, b = random_cylinder_set(rng), random_cylinder_set(rng)
        got = not S.intersect(a, b).is_empty()
        if got != shift_meets(cyl_constraints(a), cyl_constraints(b), 2):
            bad.append(("shift", a.describe(), b.describe()))
        count += 1
    for _ in range(cases):
        q = _pick_q(rng)
        a, b = random_arc_set(rng, q), random_arc_set(rng, q)
        got = S.intersect(a, b)
        want = any(arc_member(arc_pairs(a), x) and arc_member(arc_pairs(b), x) for x in grid(q))
        if not on_grid(got, q) or got.is_empty() == want:
            bad.append(("circle", q, a.describe(), b.describe()))
        count += 1
    for _ in range(cases):
        sp = S.FiniteSpace.discrete(rng.randint(1, 6))
        a, b = random_subset(rng, sp), random_subset(rng, sp)
        got = S.intersect(a, b)
        if got.is_empty() != (not (members(a) & members(b))) or members(got) != members(a) & members(b):
            bad.append(("finite", a.describe(), b.describe()))
        count += 1
    return count, bad


def _circle_transport(rng, forward):
    q = _pick_q(rng)
    U = random_arc_set(rng, q)
    if rng.random() < 0.5:
        a = Fraction(rng.randrange(q), q)
        m = M.rotation(a)
        got = S.image(m, U) if forward else S.preimage(m, U)
        sign = 1 if forward else -1
        want = [x for x in grid(q) if arc_member(arc_pairs(U), (x - sign * a) % 1)]
        ok = on_grid(got, q) and [x for x in grid(q) if arc_member(arc_pairs(got), x)] == want
        return ok, (q, m.describe(), U.describe())
    c = rng.randint(2, 3)
    m = M.circle_multiply(c)
    if forward:
        got = S.image(m, U)
        # y = k/q is an image point iff one of its c preimages lies in U
        want = [
            y for y in grid(q)
            if any(arc_member(arc_pairs(U), ((y + i) / c) % 1) for i in range(c))
        ]
        ok = on_grid(got, q) and [y for y in grid(q) if arc_member(arc_pairs(got), y)] == want
    else:
        got = S.preimage(m, U)
        fine = grid(c * q)
        want = [x for x in fine if arc_member(arc_pairs(U), (c * x) % 1)]
        ok = on_grid(got, c * q) and [x for x in fine if arc_member(arc_pairs(got), x)] == want
    return ok, (q, m.describe(), U.describe())


def campaign_transport(rng, forward, cases=1000):
    bad, count = [], 0
    for _ in range(cases):
        U = random_cylinder_set(rng)
        j = rng.randint(-5, 5)
        m = M.shift(j)
        got = S.image(m, U) if forward else S.preimage(m, U)
        want = shift_translate(cyl_constraints(U), j if forward else -j)
        if not shift_equal(cyl_constraints(got), want, 2):
            bad.append(("shift", j, U.describe()))
        count += 1
    for _ in range(cases):
        ok, info = _circle_transport(rng, forward)
        if not ok:
            bad.append(("circle",) + info)
        count += 1
    for _ in range(cases):
        n = rng.randint(1, 6)
        sp = S.FiniteSpace.discrete(n)
        t = random_table(rng, n)
        U = random_subset(rng, sp)
        m = M.finite_map(t)
        got = S.image(m, U) if forward else S.preimage(m, U)
        if forward:
            want = {t[x] for x in members(U)}
        else:
            want = {x for x in range(n) if t[x] in members(U)}
        if members(got) != want:
            bad.append(("finite", t, U.describe()))
        count += 1
    return count, bad


def campaign_hitting(rng, cases=1000, horizon=12):
    bad, count = [], 0
    for _ in range(cases):
        sys, desc = random_shift_system(rng)
        U = random_cylinder_set(rng, max_len=4)
        V = random_cylinder_set(rng, max_len=4)
        got = list(hitting_set(sys, U, V, horizon).indices)
        if got != oracle_hitting(desc, U, V, horizon):
            bad.append((desc, U.describe(), V.describe()))
        count += 1
    for _ in range(cases):
        q = _pick_q(rng)
        sys, desc = random_circle_system(rng, q)
        U, V = random_arc_set(rng, q), random_arc_set(rng, q)
        got = list(hitting_set(sys, U, V, horizon).indices)
        if got != oracle_hitting(desc, U, V, horizon, q=q):
            bad.append((desc, U.describe(), V.describe()))
        count += 1
    for _ in range(cases):
        n = rng.randint(1, 6)
        sys, desc = random_finite_system(rng, n)
        U, V = random_subset(rng, sys.space), random_subset(rng, sys.space)
        if U.is_empty() or V.is_empty():
            U, V = S.whole(sys.space), S.points(sys.space, [rng.randrange(n)])
        got = list(hitting_set(sys, U, V, horizon).indices)
        if got != oracle_hitting(desc, U, V, horizon, n_points=n):
            bad.append((desc, U.describe(), V.describe()))
        count += 1
    return count, bad
