"""delta-chains and shadowing for periodic systems on finite spaces.

A k-periodic system on a finite space has a finite description: k layered
transition graphs. Layer t joins x to y when d(f_{t+1}(x), y) < delta, and a
chain x_0, ..., x_n uses layer (i mod k) for its i-th step, so chains are
anchored at time 1.

Shadowing is read as: every delta-pseudo-orbit x_0..x_n (anchored at time 1)
has a point z with d(f_1^i(z), x_i) < eps for 0 <= i <= n.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from . import properties as P
from . import space as S
from .errors import InvalidArgument, ResourceLimit, UnsupportedOperation
from .verdict import CheckSpec, fails, holds

SHADOWING_NOTE = "shadowing read as d(f_1^i(z), x_i) < eps for 0 <= i <= n, anchored at time 1"


@dataclass(frozen=True)
class ChainGraph:
    space: object
    maps: tuple
    delta: Fraction
    layers: tuple  # layers[t][x] = sorted successors of x

    @property
    def period(self):
        return len(self.maps)

    def successors(self, t, x):
        return self.layers[t % self.period][x]


@dataclass(frozen=True)
class PseudoOrbit:
    points: tuple
    delta: Fraction

    def validate(self, graph):
        """True iff every step is a delta-step of the graph's maps."""
        sp = graph.space
        for i in range(len(self.points) - 1):
            fx = S.apply(graph.maps[i % graph.period], sp, self.points[i])
            if not sp.distance[fx][self.points[i + 1]] < self.delta:
                return False
        return True

    def shadowed_by(self, graph, z, eps):
        sp = graph.space
        pos = z
        for i, x in enumerate(self.points):
            if i:
                pos = S.apply(graph.maps[(i - 1) % graph.period], sp, pos)
            if not sp.distance[pos][x] < eps:
                return False
        return True


@dataclass(frozen=True)
class LengthPattern:
    """Exact description of the chain lengths from x to y.

    ``flags[n]`` tells whether length n is realized for n < len(flags); from
    ``start`` on the flags repeat with ``period``.
    """

    flags: tuple
    start: int
    period: int

    def contains(self, n):
        if n < len(self.flags):
            return self.flags[n]
        return self.flags[self.start + (n - self.start) % self.period]

    def eventually_all(self):
        return all(self.flags[self.start:])

    def last_missing(self):
        """Largest unrealized length, or None when infinitely many are missing."""
        if not self.eventually_all():
            return None
        missing = [n for n in range(1, self.start) if not self.flags[n]]
        return missing[-1] if missing else 0


def _periodic_finite(sys):
    if sys.kind != "base" or not isinstance(sys.space, S.FiniteSpace):
        raise UnsupportedOperation("chain analysis needs a periodic base system on a finite space")
    k = sys.period
    if k is None:
        raise UnsupportedOperation(f"{sys.describe()} is not declared periodic")
    return k


def build_chain_graph(sys, delta):
    k = _periodic_finite(sys)
    delta = Fraction(delta)
    if delta <= 0:
        raise InvalidArgument("delta must be positive")
    sp = sys.space
    maps = tuple(sys.seq.map_at(t + 1) for t in range(k))
    layers = tuple(
        tuple(
            tuple(y for y in range(sp.size) if sp.distance[S.apply(m, sp, x)][y] < delta)
            for x in range(sp.size)
        )
        for m in maps
    )
    return ChainGraph(sp, maps, delta, layers)


def _step(graph, t, R):
    out = set()
    for x in R:
        out.update(graph.successors(t, x))
    return frozenset(out)


def reachable_sets(graph, x):
    """R_n = endpoints of length-n chains from x, until (n mod k, R_n) repeats.

    Returns (sets, start, period) with sets[start + j] = sets[start + j + period].
    """
    seen = {}
    sets = []
    R = frozenset([x])
    n = 0
    while (n % graph.period, R) not in seen:
        seen[(n % graph.period, R)] = n
        sets.append(R)
        R = _step(graph, n, R)
        n += 1
    start = seen[(n % graph.period, R)]
    return sets, start, n - start


def chain_length_pattern(graph, x, y):
    sets, start, period = reachable_sets(graph, x)
    return LengthPattern(tuple(y in R for R in sets), start, period)


def chain_reachable_lengths(graph, x, y, length_bound):
    """All n in 1..length_bound with a delta-chain of length exactly n from x to y."""
    pat = chain_length_pattern(graph, x, y)
    return sorted(n for n in range(1, length_bound + 1) if pat.contains(n))


def _params(graph, **extra):
    return dict({"delta": graph.delta, "period": graph.period}, **extra)


def check_chain_transitive(sys, delta, length_bound):
    g = build_chain_graph(sys, delta)
    params = _params(g, length_bound=length_bound)
    first = []
    for x in range(g.space.size):
        for y in range(g.space.size):
            pat = chain_length_pattern(g, x, y)
            n = next((n for n in range(1, length_bound + 1) if pat.contains(n)), None)
            if n is None:
                exact = not any(pat.contains(n) for n in range(1, len(pat.flags) + pat.period))
                cert = {"x": g.space.labels[x], "y": g.space.labels[y], "never_reachable": exact}
                return fails("chain_transitive", params, cert)
            first.append([g.space.labels[x], g.space.labels[y], n])
    return holds("chain_transitive", params, {"shortest": first})


def check_chain_mixing(sys, delta, N_bound, length_bound):
    """Holds iff some N <= N_bound has every length in [N, length_bound] realized
    for every ordered pair; the length patterns upgrade this to an exact answer."""
    g = build_chain_graph(sys, delta)
    params = _params(g, N_bound=N_bound, length_bound=length_bound)
    worst, exact = 1, True
    for x in range(g.space.size):
        for y in range(g.space.size):
            pat = chain_length_pattern(g, x, y)
            lm = pat.last_missing()
            if lm is None:
                miss = next(
                    n for n in range(max(N_bound, 1), max(N_bound, 1) + len(pat.flags) + pat.period)
                    if not pat.contains(n)
                )
                cert = {"x": g.space.labels[x], "y": g.space.labels[y], "missing_length": miss, "eventually_missing": True}
                return fails("chain_mixing", params, cert)
            N = lm + 1
            if N > N_bound:
                cert = {"x": g.space.labels[x], "y": g.space.labels[y], "missing_length": lm, "eventually_missing": False}
                return fails("chain_mixing", params, cert)
            worst = max(worst, N)
    return holds("chain_mixing", params, {"N": worst, "exact": exact})


def _shadow_search(g, eps, length_bound, cap):
    """Breadth-first search for a delta-pseudo-orbit that no start point eps-traces.

    State: (time mod k, current pseudo-orbit point, positions of the true
    orbits still within eps). A state met earlier has at least as many steps
    left, so later visits are dominated.
    """
    sp = g.space
    k = g.period
    parent = {}
    queue = deque()
    for x0 in range(sp.size):
        P0 = frozenset(z for z in range(sp.size) if sp.distance[z][x0] < eps)
        st = (0, x0, P0)
        if st not in parent:
            parent[st] = (None, 0)
            queue.append((st, 0))
    count = 0
    while queue:
        (t, x, Pos), depth = queue.popleft()
        if not Pos:
            return _trace(parent, (t, x, Pos)), count
        if depth == length_bound:
            continue
        m = g.maps[t]
        moved = {S.apply(m, sp, p) for p in Pos}
        for y in g.successors(t, x):
            st = ((t + 1) % k, y, frozenset(q for q in moved if sp.distance[q][y] < eps))
            if st in parent:
                continue
            count += 1
            if count > cap:
                raise ResourceLimit(f"shadowing search visited more than {cap} states", count, cap)
            parent[st] = ((t, x, Pos), depth + 1)
            queue.append((st, depth + 1))
    return None, count


def _trace(parent, st):
    pts = []
    while st is not None:
        pts.append(st[1])
        st = parent[st][0]
    return tuple(reversed(pts))


def check_shadowing(sys, eps, delta_candidates, length_bound, cap=10**6):
    eps = Fraction(eps)
    deltas = sorted({Fraction(d) for d in delta_candidates}, reverse=True)
    if not deltas or deltas[-1] <= 0:
        raise InvalidArgument("delta candidates must be positive")
    params = {"eps": eps, "delta_candidates": deltas, "length_bound": length_bound}
    last = None
    for d in deltas:
        g = build_chain_graph(sys, d)
        bad, visited = _shadow_search(g, eps, length_bound, cap)
        if bad is None:
            return holds("shadowing", params, {"delta": d, "states": visited}, (SHADOWING_NOTE,))
        last = (d, bad)
    d, bad = last
    labels = [sys.space.labels[i] for i in bad]
    return fails("shadowing", params, {"delta": d, "pseudo_orbit": labels}, (SHADOWING_NOTE,))


def replay_shadowing(sys, verdict):
    """Confirm a shadowing failure: valid pseudo-orbit, and no start point traces it."""
    c = verdict.certificate
    g = build_chain_graph(sys, Fraction(c["delta"]))
    pts = tuple(sys.space.labels.index(lab) for lab in c["pseudo_orbit"])
    po = PseudoOrbit(pts, g.delta)
    eps = Fraction(verdict.params["eps"])
    return po.validate(g) and not any(po.shadowed_by(g, z, eps) for z in range(sys.space.size))


def eps_balls(space, eps):
    """Distinct open balls B(x, eps), in point order."""
    out = []
    for x in range(space.size):
        b = S.ball(space, x, eps)
        if b not in out:
            out.append(b)
    return out


def verify_chain_theorems(sys, eps, delta_candidates, bounds=None):
    """Check both chain theorems on a periodic finite system.

    The shadowing check picks delta; chain hypotheses are checked at that
    delta. Conclusions quantify over eps-balls: a pseudo-orbit built from
    chains of length n and eps-traced by z puts f_1^{in}(z) in the ball around
    its i-th anchor. Delta-mixing uses multiples of the period as A, so every
    concatenated chain starts in layer 0.

    A row is FLAGGED when the hypotheses hold and the conclusion fails.
    """
    bounds = dict(bounds or {})
    L = int(bounds.get("length_bound", 12))
    m_bound = int(bounds.get("m_bound", 2))
    k = _periodic_finite(sys)
    N_bound = int(bounds.get("N_bound", max(1, L // m_bound - k + 1)))
    cap = int(bounds.get("cap", 10**6))
    eps = Fraction(eps)

    shadow = check_shadowing(sys, eps, delta_candidates, L, cap)
    rows = {}
    balls = eps_balls(sys.space, eps)
    spec = CheckSpec(notion="transitive", resolution=1, horizon=L)
    if shadow.holds:
        d = shadow.witnesses["delta"]
        cm = check_chain_mixing(sys, d, N_bound, L)
        ct = check_chain_transitive(sys, d, L)
    else:
        cm = ct = None

    A = [n for n in range(k, L // m_bound + 1, k)]
    hyp_mix = bool(shadow.holds and cm.holds)
    if hyp_mix and A:
        concl = P.check_delta_mixing(sys, m_bound, A, spec.with_(notion="delta_mixing", index_set=tuple(A)), balls)
    else:
        concl = None
    rows["chain_mixing+shadowing=>delta_mixing"] = _row(shadow, cm, concl)

    hyp_tr = bool(shadow.holds and ct.holds)
    concl_t = P.check_transitive(sys, spec, balls) if hyp_tr else None
    rows["chain_transitive+shadowing=>transitive"] = _row(shadow, ct, concl_t)

    return {
        "system": sys.describe(),
        "eps": str(eps),
        "bounds": {"length_bound": L, "m_bound": m_bound, "N_bound": N_bound},
        "note": SHADOWING_NOTE,
        "rows": rows,
        "outcome": "FLAGGED" if any(r["outcome"] == "FLAGGED" for r in rows.values()) else "CONSISTENT",
    }


def _row(shadow, chain, concl):
    row = {
        "shadowing": shadow.status.value,
        "chain": chain.status.value if chain is not None else "not run",
        "conclusion": concl.status.value if concl is not None else "not run",
    }
    if shadow.holds:
        row["delta"] = str(shadow.witnesses["delta"])
    flagged = concl is not None and concl.fails
    row["outcome"] = "FLAGGED" if flagged else "CONSISTENT"
    if flagged:
        row["certificate"] = concl.to_json()
    return row
