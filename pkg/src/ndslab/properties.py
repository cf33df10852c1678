"""Transitivity-notion checkers with horizon semantics and replayable certificates.

"For all non-empty open sets" ranges over the basis at ``spec.resolution``;
"there exists n" ranges over 1..``spec.horizon``. When a notion scales time
(vectors a, Delta tuples, iterates) the scaled base index stays <= horizon.

Tuple notions are decided on hitting masks. Pairs with equal masks are
interchangeable and a pair whose mask contains another pair's mask can never
be the one that kills a tuple, so only inclusion-minimal mask classes are
enumerated. ``spec.tuple_cap`` bounds that reduced enumeration.

Failure certificates store open sets in their JSON form, so ``replay`` can
re-derive every failure from the primitives without the live objects.
"""

from __future__ import annotations

import itertools

from . import space as S
from . import system as Y
from .classifier import classify, max_gap
from .errors import InvalidArgument, ResourceLimit
from .hitting import (
    delta_intersection,
    full_mask,
    hits_at,
    hitting_mask,
    mask_indices,
    orbit,
    scale_mask,
)
from .verdict import CheckSpec, Status, fails, holds

TRUNCATION_NOTE = "horizon-limited: quantifiers truncated to the basis and to indices <= horizon"
SURROGATE_NOTE = (
    "finite surrogate for mild mixing: mixing plus transitivity of the product "
    "with each registry system; the definition itself is not checked"
)

# ---------------------------------------------------------------- helpers


def enc(U):
    return {"set": U.describe(), "parts": U.to_json()}


def dec(space, d):
    return S.openset_from_json(space, d["parts"])


def _params(spec, **extra):
    out = {
        "resolution": list(spec.resolution) if isinstance(spec.resolution, tuple) else spec.resolution,
        "horizon": spec.horizon,
    }
    out.update(extra)
    return out


def _basis(sys, spec, opens=None):
    return list(opens) if opens is not None else S.basis(sys.space, spec.resolution)


def _pairs(sys, spec, opens=None):
    B = _basis(sys, spec, opens)
    return [(U, V) for U in B for V in B]


def _minimal_classes(items):
    """items: list of (mask, payload) in canonical order.

    Returns inclusion-minimal distinct masks, each with the payload of its
    first occurrence, ordered by first occurrence.
    """
    first = {}
    for mask, payload in items:
        first.setdefault(mask, payload)
    order = list(first)
    kept = []
    for m in sorted(order, key=lambda x: (bin(x).count("1"), order.index(x))):
        if not any(k & m == k for k in kept):
            kept.append(m)
    keep = set(kept)
    return [(m, first[m]) for m in order if m in keep]


class _Budget:
    """Counts enumerated class tuples; exceeding the cap is an error, never sampling."""

    def __init__(self, cap):
        self.cap = cap
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.cap:
            raise ResourceLimit(f"tuple enumeration exceeded the cap {self.cap}", self.count, self.cap)


def _zero_subset(classes, size, full, cap):
    """Find <= size classes whose masks AND (within ``full``) to zero.

    Enumerates subsets in lexicographic order; returns (indices or None, count).
    """
    c = len(classes)
    budget = _Budget(cap)

    def dfs(start, acc, chosen):
        if len(chosen) == size:
            return None
        for i in range(start, c):
            budget.tick()
            nxt = acc & classes[i][0]
            if not nxt:
                return chosen + [i]
            found = dfs(i + 1, nxt, chosen + [i])
            if found:
                return found
        return None

    return dfs(0, full, []), budget.count


def _zero_product(lists, full, cap):
    """Find one class per coordinate whose masks AND to zero."""
    budget = _Budget(cap)

    def dfs(j, acc, chosen):
        if j == len(lists):
            return None
        for i, (mask, _) in enumerate(lists[j]):
            budget.tick()
            nxt = acc & mask
            if not nxt:
                # remaining coordinates can take any class
                return chosen + [i] + [0] * (len(lists) - j - 1)
            found = dfs(j + 1, nxt, chosen + [i])
            if found:
                return found
        return None

    return dfs(0, full, []), budget.count


# ---------------------------------------------------------------- basic notions


def check_transitive(sys, spec, opens=None):
    """``opens`` replaces the resolution basis by an explicit family of open sets."""
    params = _params(spec)
    first_hits = []
    for U, V in _pairs(sys, spec, opens):
        mask = hitting_mask(sys, U, V, spec.horizon)
        if not mask:
            return fails("transitive", params, {"U": enc(U), "V": enc(V)}, (TRUNCATION_NOTE,))
        first_hits.append([U.describe(), V.describe(), (mask & -mask).bit_length() - 1])
    return holds("transitive", params, {"first_hit": first_hits})


def check_weak_mixing_order(sys, n, spec):
    if n < 2:
        raise InvalidArgument("weak mixing order must be >= 2")
    params = _params(spec, order=n)
    items = [(hitting_mask(sys, U, V, spec.horizon), (U, V)) for U, V in _pairs(sys, spec)]
    classes = _minimal_classes(items)
    found, bound = _zero_subset(classes, n, full_mask(spec.horizon), spec.tuple_cap)
    if found:
        chosen = [classes[i][1] for i in found]
        chosen += [chosen[-1]] * (n - len(chosen))
        cert = {"pairs": [[enc(U), enc(V)] for U, V in chosen]}
        return fails("weakly_mixing", params, cert, (TRUNCATION_NOTE,))
    return holds("weakly_mixing", params, {"mask_classes": len(classes), "class_tuples": bound})


def check_weak_mixing(sys, spec):
    return check_weak_mixing_order(sys, 2, spec)


def check_mixing(sys, spec):
    params = _params(spec, tail=spec.tail)
    thresholds = []
    for U, V in _pairs(sys, spec):
        mask = hitting_mask(sys, U, V, spec.horizon)
        rep = classify(mask_indices(mask), spec.horizon, 1, 1, spec.tail)
        if not rep.cofinite:
            cert = {"U": enc(U), "V": enc(V), "last_missing": rep.last_missing, "tail": spec.tail}
            return fails("mixing", params, cert, (TRUNCATION_NOTE,))
        thresholds.append([U.describe(), V.describe(), rep.last_missing + 1])
    return holds("mixing", params, {"N": thresholds, "max_N": max(t[2] for t in thresholds)})


def check_totally_transitive(sys, n_bound, spec):
    params = _params(spec, n_bound=n_bound)
    if spec.horizon < n_bound:
        raise InvalidArgument("horizon must be >= n_bound")
    for n in range(1, n_bound + 1):
        v = check_transitive(Y.iterate_system(sys, n), spec.with_(horizon=spec.horizon // n))
        if v.fails:
            cert = dict(v.certificate, n=n, iterate_horizon=spec.horizon // n)
            return fails("totally_transitive", params, cert, (TRUNCATION_NOTE,))
    return holds("totally_transitive", params)


# ---------------------------------------------------------------- multi-transitivity


def _vector_failure(sys, a, spec):
    """Find pairs (U_i, V_i) with no common l, or None; also the class bound."""
    L = spec.horizon // max(a)
    if L < 1:
        raise InvalidArgument(f"horizon {spec.horizon} too small for vector {list(a)}")
    pairs = _pairs(sys, spec)
    per_entry = {}
    for ai in sorted(set(a)):
        items = [(scale_mask(hitting_mask(sys, U, V, ai * L), ai, L), (U, V)) for U, V in pairs]
        per_entry[ai] = _minimal_classes(items)
    lists = [per_entry[ai] for ai in a]
    found, bound = _zero_product(lists, full_mask(L), spec.tuple_cap)
    if found is None:
        return None, bound, L
    return [lists[j][i][1] for j, i in enumerate(found)], bound, L


def check_multi_transitive_vector(sys, a, spec, notion="multi_transitive_vector"):
    a = tuple(int(x) for x in a)
    if not a or min(a) < 1:
        raise InvalidArgument("vector entries must be positive")
    params = _params(spec, vector=list(a))
    chosen, bound, L = _vector_failure(sys, a, spec)
    if chosen:
        cert = {"vector": list(a), "l_bound": L, "pairs": [[enc(U), enc(V)] for U, V in chosen]}
        return fails(notion, params, cert, (TRUNCATION_NOTE,))
    return holds(notion, params, {"class_tuples": bound, "l_bound": L})


def check_multi_transitive(sys, m_bound, spec):
    params = _params(spec, m_bound=m_bound)
    for m in range(1, m_bound + 1):
        v = check_multi_transitive_vector(sys, tuple(range(1, m + 1)), spec)
        if v.fails:
            return fails("multi_transitive", params, dict(v.certificate, m=m), v.notes)
    return holds("multi_transitive", params)


def vectors_upto(vector_bound):
    length, entry = vector_bound
    for p in range(1, length + 1):
        yield from itertools.combinations_with_replacement(range(1, entry + 1), p)


def check_strongly_multi_transitive(sys, vector_bound, spec):
    params = _params(spec, vector_bound=list(vector_bound))
    count = 0
    for a in vectors_upto(vector_bound):
        if spec.horizon // max(a) < 1:
            continue
        v = check_multi_transitive_vector(sys, a, spec)
        count += 1
        if v.fails:
            return fails("strongly_multi_transitive", params, v.certificate, v.notes)
    return holds("strongly_multi_transitive", params, {"vectors": count})


# ---------------------------------------------------------------- Delta notions


def _delta_failure(sys, m, A, spec, opens=None):
    """First basis tuple U_0..U_m with ∩ f_1^{-in}(U_i) = ∅ for every n in A."""
    B = _basis(sys, spec, opens)
    b = len(B)
    total = b ** (m + 1)
    if total > spec.tuple_cap:
        raise ResourceLimit(f"{total} basis tuples exceed the cap {spec.tuple_cap}", total, spec.tuple_cap)
    realized = {}
    done_below = {}

    def dfs(n, pre, prefix, cur):
        j = len(prefix)
        if j == m + 1:
            if prefix not in realized:
                realized[prefix] = n
                for k in range(m + 1):
                    done_below[prefix[:k]] = done_below.get(prefix[:k], 0) + 1
            return
        if done_below.get(prefix, 0) == b ** (m + 1 - j):
            return
        for idx in range(b):
            nxt = B[idx] if j == 0 else S.intersect(cur, pre[j][idx])
            if not nxt.is_empty():
                dfs(n, pre, prefix + (idx,), nxt)

    for n in A:
        if len(realized) == total:
            break
        pre = [None] + [[S.preimage(sys.compose(1, j * n), U) for U in B] for j in range(1, m + 1)]
        dfs(n, pre, (), None)
    if len(realized) == total:
        return None, realized
    for tup in itertools.product(range(b), repeat=m + 1):
        if tup not in realized:
            return [B[i] for i in tup], realized
    return None, realized


def _delta_check(sys, m_bound, A, spec, notion, opens=None):
    params = _params(spec, m_bound=m_bound, index_set=_describe_indices(A))
    if m_bound < 0:
        raise InvalidArgument("m_bound must be >= 0")
    for U in _basis(sys, spec, opens):
        if U.is_empty():
            return fails(notion, params, {"m": 0, "Us": [enc(U)]})
    counts = {}
    for m in range(1, m_bound + 1):
        Am = [n for n in A if n * m <= spec.horizon]
        if not Am:
            raise InvalidArgument(f"no n in the index set satisfies {m}*n <= horizon")
        Us, realized = _delta_failure(sys, m, Am, spec, opens)
        if Us is not None:
            cert = {"m": m, "index_set": _describe_indices(Am), "Us": [enc(U) for U in Us]}
            return fails(notion, params, cert, (TRUNCATION_NOTE,))
        counts[str(m)] = len(realized)
    return holds(notion, params, {"tuples": counts})


def _describe_indices(A):
    A = list(A)
    if A and A == list(range(A[0], A[-1] + 1)):
        return {"range": [A[0], A[-1]]}
    return {"list": A}


def _indices_from_json(d):
    if "range" in d:
        return list(range(d["range"][0], d["range"][1] + 1))
    return list(d["list"])


def check_delta_transitive(sys, m_bound, spec):
    return _delta_check(sys, m_bound, range(1, spec.horizon + 1), spec, "delta_transitive")


def check_delta_mixing(sys, m_bound, A, spec, opens=None):
    A = sorted(set(int(a) for a in A))
    if not A or A[0] < 1 or A[-1] > spec.horizon:
        raise InvalidArgument("index set must be a non-empty subset of [1, horizon]")
    return _delta_check(sys, m_bound, A, spec, "delta_mixing", opens)


# ---------------------------------------------------------------- set-class transitivity


def check_set_class_transitivity(sys, spec):
    """Syndetic, thick and thickly syndetic transitivity from one pass over basis pairs."""
    params = _params(spec, gap_bound=spec.gap_bound, run_request=spec.run_request)
    results = {}
    worst = {"max_gap": 0, "min_max_run": None}
    for U, V in _pairs(sys, spec):
        mask = hitting_mask(sys, U, V, spec.horizon)
        rep = classify(mask_indices(mask), spec.horizon, spec.run_request, spec.gap_bound)
        worst["max_gap"] = max(worst["max_gap"], rep.max_gap)
        mr = worst["min_max_run"]
        worst["min_max_run"] = rep.max_run if mr is None else min(mr, rep.max_run)
        pair = {"U": enc(U), "V": enc(V)}
        if not rep.syndetic and "syndetically_transitive" not in results:
            gap, at = max_gap(mask_indices(mask), 1, spec.horizon)
            results["syndetically_transitive"] = fails(
                "syndetically_transitive", params,
                dict(pair, max_gap=rep.max_gap, window=[at + 1, at + gap - 1]), (TRUNCATION_NOTE,),
            )
        if not rep.thick and "thickly_transitive" not in results:
            results["thickly_transitive"] = fails(
                "thickly_transitive", params, dict(pair, max_run=rep.max_run), (TRUNCATION_NOTE,)
            )
        if not rep.thickly_syndetic and "thickly_syndetically_transitive" not in results:
            results["thickly_syndetically_transitive"] = fails(
                "thickly_syndetically_transitive", params, dict(pair, **rep.ts_failure), (TRUNCATION_NOTE,)
            )
    for name in ("syndetically_transitive", "thickly_transitive", "thickly_syndetically_transitive"):
        if name not in results:
            results[name] = holds(name, params, dict(worst))
    return (
        results["syndetically_transitive"],
        results["thickly_transitive"],
        results["thickly_syndetically_transitive"],
    )


def check_syndetically_transitive(sys, spec):
    return check_set_class_transitivity(sys, spec)[0]


def check_thickly_transitive(sys, spec):
    return check_set_class_transitivity(sys, spec)[1]


def check_thickly_syndetically_transitive(sys, spec):
    return check_set_class_transitivity(sys, spec)[2]


# ---------------------------------------------------------------- minimality, mild mixing


def sample_points(space, resolution):
    if isinstance(space, S.FiniteSpace):
        return list(range(space.size))
    return [S.witness(U) for U in S.basis(space, resolution)]


def check_minimal(sys, spec):
    params = _params(spec)
    B = _basis(sys, spec)
    for x in sample_points(sys.space, spec.resolution):
        pts = orbit(sys, x, spec.horizon).points
        for U in B:
            if not any(S.contains(U, p) for p in pts):
                cert = {"point": S.point_to_json(sys.space, x), "missed": enc(U)}
                return fails("minimal", params, cert, (TRUNCATION_NOTE,))
    return holds("minimal", params, {"points": len(sample_points(sys.space, spec.resolution))})


def _registry_entry(w, spec):
    if isinstance(w, tuple):
        return w[0], w[1]
    return w, spec.resolution


def check_mildly_mixing_surrogate(sys, registry, spec):
    params = _params(spec, registry=[_registry_entry(w, spec)[0].describe() for w in registry])
    mix = check_mixing(sys, spec)
    parts = {"mixing": mix.status.value}
    failed = None
    if mix.fails:
        failed = {"part": "mixing", "certificate": mix.certificate}
    for i, w in enumerate(registry):
        W, res_w = _registry_entry(w, spec)
        res = (
            (spec.resolution if not isinstance(spec.resolution, tuple) else spec.resolution[0]),
            res_w if not isinstance(res_w, tuple) else res_w[0],
        )
        v = check_transitive(Y.product([sys, W]), spec.with_(resolution=res))
        parts[f"product[{i}] {W.describe()}"] = v.status.value
        if v.fails and failed is None:
            failed = {"part": "product", "index": i, "resolution": list(res), "certificate": v.certificate}
    if failed:
        return fails("mildly_mixing_surrogate", params, dict(failed, parts=parts), (SURROGATE_NOTE,))
    return holds("mildly_mixing_surrogate", params, {"parts": parts}, (SURROGATE_NOTE,))


# ---------------------------------------------------------------- dispatch


def check(sys, spec, registry=()):
    n = spec.notion
    if n == "transitive":
        return check_transitive(sys, spec)
    if n == "weakly_mixing":
        return check_weak_mixing_order(sys, spec.order, spec)
    if n == "mixing":
        return check_mixing(sys, spec)
    if n == "totally_transitive":
        return check_totally_transitive(sys, spec.n_bound, spec)
    if n == "multi_transitive":
        return check_multi_transitive(sys, spec.m_bound, spec)
    if n == "multi_transitive_vector":
        return check_multi_transitive_vector(sys, spec.vector, spec)
    if n == "strongly_multi_transitive":
        return check_strongly_multi_transitive(sys, spec.vector_bound, spec)
    if n == "mildly_mixing_surrogate":
        return check_mildly_mixing_surrogate(sys, registry, spec)
    if n == "delta_transitive":
        return check_delta_transitive(sys, spec.m_bound, spec)
    if n == "delta_mixing":
        A = spec.index_set or tuple(range(1, spec.horizon + 1))
        return check_delta_mixing(sys, spec.m_bound, A, spec)
    if n == "minimal":
        return check_minimal(sys, spec)
    if n == "syndetically_transitive":
        return check_syndetically_transitive(sys, spec)
    if n == "thickly_transitive":
        return check_thickly_transitive(sys, spec)
    if n == "thickly_syndetically_transitive":
        return check_thickly_syndetically_transitive(sys, spec)
    raise InvalidArgument(f"unknown notion {n!r}")


# ---------------------------------------------------------------- replay


def _pair(sys, d):
    return dec(sys.space, d["U"]), dec(sys.space, d["V"])


def _hits(sys, U, V, H):
    return [n for n in range(1, H + 1) if hits_at(sys, U, V, n)]


def replay(sys, verdict, registry=()):
    """Re-derive a failure certificate from the primitives.

    Returns True when the certificate still shows the failure. Holds and
    Undecided verdicts are replayed by re-running the checker.
    """
    if verdict.status is not Status.FAILS:
        spec = _spec_from_params(verdict)
        if spec is None:
            return False
        return check(sys, spec, registry).status is verdict.status
    c, p = verdict.certificate, verdict.params
    H = p["horizon"]
    name = verdict.notion
    if name == "transitive":
        U, V = _pair(sys, c)
        return not _hits(sys, U, V, H)
    if name == "weakly_mixing":
        pairs = [(dec(sys.space, u), dec(sys.space, v)) for u, v in c["pairs"]]
        return all(any(not hits_at(sys, U, V, m) for U, V in pairs) for m in range(1, H + 1))
    if name == "mixing":
        U, V = _pair(sys, c)
        lm = c["last_missing"]
        return (lm == 0 or not hits_at(sys, U, V, lm)) and H - lm < c["tail"] and all(
            hits_at(sys, U, V, n) for n in range(lm + 1, H + 1)
        )
    if name == "totally_transitive":
        U, V = _pair(sys, c)
        return not _hits(Y.iterate_system(sys, c["n"]), U, V, c["iterate_horizon"])
    if name in ("multi_transitive", "multi_transitive_vector", "strongly_multi_transitive"):
        a = c["vector"]
        pairs = [(dec(sys.space, u), dec(sys.space, v)) for u, v in c["pairs"]]
        return all(
            any(not hits_at(sys, U, V, ai * l) for ai, (U, V) in zip(a, pairs))
            for l in range(1, c["l_bound"] + 1)
        )
    if name in ("delta_transitive", "delta_mixing"):
        Us = [dec(sys.space, u) for u in c["Us"]]
        if c["m"] == 0:
            return Us[0].is_empty()
        return all(delta_intersection(sys, Us, n).is_empty() for n in _indices_from_json(c["index_set"]))
    if name == "minimal":
        x = S.point_from_json(sys.space, c["point"])
        U = dec(sys.space, c["missed"])
        return not any(S.contains(U, q) for q in orbit(sys, x, H).points)
    if name == "syndetically_transitive":
        U, V = _pair(sys, c)
        lo, hi = c["window"]
        quiet = not any(hits_at(sys, U, V, n) for n in range(lo, hi + 1))
        return quiet and (hi - lo + 1 >= p["gap_bound"] or not _hits(sys, U, V, H))
    if name == "thickly_transitive":
        U, V = _pair(sys, c)
        rep = classify(_hits(sys, U, V, H), H, p["run_request"], p["gap_bound"])
        return not rep.thick and rep.max_run == c["max_run"]
    if name == "thickly_syndetically_transitive":
        U, V = _pair(sys, c)
        A = set(_hits(sys, U, V, H))
        lo, hi = c["window"]
        l = c["l"]
        no_run = all(not all(k in A for k in range(m, m + l + 1)) for m in range(max(lo, 1), hi + 1))
        return no_run and (hi - lo + 1 >= p["gap_bound"] or not any(
            all(k in A for k in range(m, m + l + 1)) for m in range(1, H - l + 1)
        ))
    if name == "mildly_mixing_surrogate":
        inner = c["certificate"]
        if c["part"] == "mixing":
            sub = fails("mixing", dict(p, tail=inner["tail"]), inner)
            return replay(sys, sub)
        W, _ = _registry_entry(list(registry)[c["index"]], None) if registry else (None, None)
        if W is None:
            return False
        return replay(Y.product([sys, W]), fails("transitive", p, inner))
    return False


def _spec_from_params(verdict):
    p = verdict.params
    kw = {"notion": verdict.notion, "horizon": p["horizon"]}
    res = p.get("resolution")
    kw["resolution"] = tuple(res) if isinstance(res, list) else res
    for key in ("order", "m_bound", "n_bound", "gap_bound", "run_request"):
        if key in p:
            kw[key] = p[key]
    if "vector" in p:
        kw["vector"] = tuple(p["vector"])
    if "vector_bound" in p:
        kw["vector_bound"] = tuple(p["vector_bound"])
    if "tail" in p:
        kw["cofinite_tail"] = p["tail"]
    if verdict.notion == "delta_mixing" and "index_set" in p:
        kw["index_set"] = tuple(_indices_from_json(p["index_set"]))
    try:
        return CheckSpec(**kw)
    except InvalidArgument:
        return None
