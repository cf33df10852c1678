"""Ready-made example systems, theorem cross-check suites and a counterexample search.

Every example sequence is a ``BlockPattern``; the block rule is documented on
its builder. The mixing homeomorphism inside the constructions is the full
shift σ on two symbols, or an irrational-like rotation whose denominator
exceeds the horizon.

Theorem suites compare both sides of an equivalence at matched truncation
parameters. When the sides disagree, the failing side's certificate is
transported to the other side (padding tuples, scaling vectors) and replayed
through the primitives; a row that still disagrees is FLAGGED. A FLAGGED row
is a truncation artifact or a bug, never a disproof.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import chain as C
from . import maps as M
from . import properties as P
from . import space as S
from . import system as Y
from .errors import InvalidArgument, NdsError, ResourceLimit
from .hitting import delta_intersection
from .verdict import CheckSpec, Status, fails

SIGMA = M.shift(1)
SUITE_NOTE = "a FLAGGED row is a truncation artifact or a bug, never a disproof"
CANDIDATE_NOTE = "candidates are horizon-limited evidence, not counterexamples"

# ---------------------------------------------------------------- block rules


def _sigma(k):
    return M.shift(k)


def lizi_f_rule(b, start):
    """Block b = [σ^b, σ^-b]; so f_1^{2k-1} = σ^k and f_1^{2k} = id."""
    return [_sigma(b), _sigma(-b)]


def lizi_g_rule(b, start):
    """Block 1 = [id, σ, σ^-1], then [σ^b, σ^-b]; so g_1^{2k} = σ^k and g_1^{2k-1} = id."""
    if b == 1:
        return [M.IDENTITY, _sigma(1), _sigma(-1)]
    return [_sigma(b), _sigma(-b)]


def iterate_f_rule(n):
    """Block 1 = [id]*(n-1) + [σ, σ^-1]; block b >= 2 = [id]*(n-2) + [σ^b, σ^-b].

    So f_1^{kn} = σ^k and f_1^{kn+1} = id: the n-th iterate steps by σ.
    """

    def rule(b, start):
        if b == 1:
            return [M.IDENTITY] * (n - 1) + [_sigma(1), _sigma(-1)]
        return [M.IDENTITY] * (n - 2) + [_sigma(b), _sigma(-b)]

    return rule


def iterate_g_rule(n):
    """Block b = [σ^b, σ^-b] + [id]*(n-2); so g_1^{(k-1)n+1} = σ^k, id elsewhere."""

    def rule(b, start):
        return [_sigma(b), _sigma(-b)] + [M.IDENTITY] * (n - 2)

    return rule


def _g_level(start):
    """k >= 1 when a g_k block is due at ``start`` (start in [10^k, 10^k+10)), else 0."""
    k = 1
    while 10**k <= start:
        if start < 10**k + 10:
            return k
        k += 1
    return 0


def _h_level(start):
    k = 1
    while 10 ** (k + 1) <= start:
        k += 1
    return k


def ten_block_rule(b, start):
    """Blocks of length >= 10 whose composition is the identity.

    A block starting in [10^k, 10^k+10) is g_k = [σ^k]*k + [σ^{-k²}] + [id]*8;
    every other block is h_L = [σ^L, σ^-L] + [id]*8 where L is the largest k
    with 10^k <= start (L = 1 before 100). Blocks have length >= 10, so each
    window [10^k, 10^k+10) holds exactly one block start.
    """
    k = _g_level(start)
    if k:
        return [_sigma(k)] * k + [_sigma(-k * k)] + [M.IDENTITY] * 8
    L = _h_level(start)
    return [_sigma(L), _sigma(-L)] + [M.IDENTITY] * 8


def padded_rotation_rule(alpha):
    """Block b = [R_α] + [id]*b; so f_1^{T_j} = R(jα) with T_j = j(j+1)/2."""
    rot = M.rotation(alpha)

    def rule(b, start):
        return [rot] + [M.IDENTITY] * b

    return rule


def _blocks(rule, name, **params):
    return Y.BlockPattern(rule, name=name, params=params)


# ---------------------------------------------------------------- examples


@dataclass(frozen=True)
class Expectation:
    subject: str
    notion: str
    expected: Status
    claim: str
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ExampleSpec:
    id: str
    defaults: dict
    expectations: tuple
    notes: tuple = ()


H, F = Status.HOLDS, Status.FAILS

EXAMPLES = {
    "product-syndetic-weakmix": ExampleSpec(
        "product-syndetic-weakmix",
        {"resolution": 3, "horizon": 64},
        (
            Expectation("f", "transitive", H, "f alone is transitive"),
            Expectation("f", "weakly_mixing", H, "f alone is weakly mixing"),
            Expectation("f", "syndetically_transitive", H, "f alone is syndetically transitive"),
            Expectation("g", "transitive", H, "g alone is transitive"),
            Expectation("g", "weakly_mixing", H, "g alone is weakly mixing"),
            Expectation("g", "syndetically_transitive", H, "g alone is syndetically transitive"),
            Expectation("f×g", "transitive", F, "the product fails transitivity on disjoint cylinders"),
            Expectation("f×g", "syndetically_transitive", F, "the product is not syndetically transitive"),
            Expectation("f×g", "weakly_mixing", F, "the product is not weakly mixing"),
        ),
        (
            "the product is checked at resolution 1: failure on the cylinders [0]_0, [1]_0 "
            "persists at every finer resolution",
            "syndetic checks use gap_bound = 2 * resolution",
        ),
    ),
    "iterate-mildly-mixing": ExampleSpec(
        "iterate-mildly-mixing",
        {"n": 3, "resolution": 2, "horizon": 48},
        (
            Expectation("g", "transitive", H, "the registry witness g is transitive"),
            Expectation("f^[n]", "mildly_mixing_surrogate", H, "the n-th iterate passes the mild-mixing surrogate"),
            Expectation("f", "mildly_mixing_surrogate", F, "f fails the mild-mixing surrogate against g"),
        ),
        (P.SURROGATE_NOTE,),
    ),
    "ten-block-thick-syndetic": ExampleSpec(
        "ten-block-thick-syndetic",
        {"resolution": 1, "horizon": 1100, "run_request": 10},
        (
            Expectation("f", "syndetically_transitive", H, "hitting sets of disjoint cylinders have bounded gaps"),
            Expectation("f", "thickly_transitive", H, "hitting sets contain long runs"),
            Expectation("f", "thickly_syndetically_transitive", F, "runs of length two are not syndetic"),
        ),
        (
            "gap_bound = M + 10 where f^n(U) ∩ V ≠ ∅ for all n > M for the shift at resolution 1",
            "runs of hitting times inside a g_k block have length k, so k <= 3 below 10^4",
        ),
    ),
    "padded-rotation": ExampleSpec(
        "padded-rotation",
        {"numerator": 159, "denominator": 257, "resolution": 8, "horizon": 200, "run_request": 10},
        (
            Expectation("f", "transitive", H, "orbits follow the rotation orbit, so the system is transitive"),
            Expectation("f", "thickly_transitive", H, "each rotation step is held for a growing run of indices"),
            Expectation("f", "weakly_mixing", F, "a rotation-driven system is not weakly mixing"),
            Expectation("f", "minimal", H, "sampled orbits meet every basis arc"),
        ),
    ),
    "minimal-weakmix-not-multi": ExampleSpec(
        "minimal-weakmix-not-multi",
        {"resolution": 2, "horizon": 48},
        (
            Expectation("f", "weakly_mixing", H, "the sequence is weakly mixing"),
            Expectation("f", "multi_transitive", F, "even-index compositions are the identity, so not multi-transitive",
                        {"m_bound": 2}),
            Expectation("f", "delta_transitive", F, "even-index compositions are the identity, so not Delta-transitive",
                        {"m_bound": 2}),
        ),
        (
            "minimality is not modeled: σ stands in for a minimal weakly mixing homeomorphism; "
            "the checked failures depend only on the even-index identity",
        ),
    ),
}

EXAMPLE_IDS = tuple(EXAMPLES)


def example_params(example_id, params=None):
    if example_id not in EXAMPLES:
        raise InvalidArgument(f"unknown example {example_id!r}")
    p = dict(EXAMPLES[example_id].defaults)
    for k, v in (params or {}).items():
        if k not in p:
            raise InvalidArgument(f"example {example_id} has no parameter {k!r}")
        p[k] = v
    for k, v in p.items():
        if not isinstance(v, int) or v < 1:
            raise InvalidArgument(f"parameter {k} must be a positive integer")
    if example_id == "iterate-mildly-mixing" and p["n"] < 2:
        raise InvalidArgument("n must be >= 2")
    if example_id == "padded-rotation":
        if math.gcd(p["numerator"], p["denominator"]) != 1 or p["numerator"] >= p["denominator"]:
            raise InvalidArgument("rotation numerator must be coprime to and below the denominator")
        if p["denominator"] <= p["horizon"]:
            raise InvalidArgument("rotation denominator must exceed the horizon")
    return p


def _shift_space():
    return S.ShiftSpace(2)


def _build(example_id, p):
    X = _shift_space()
    if example_id == "product-syndetic-weakmix":
        f = Y.system(X, _blocks(lizi_f_rule, "lizi-f"), name="f")
        g = Y.system(X, _blocks(lizi_g_rule, "lizi-g"), name="g")
        return (f, g)
    if example_id == "iterate-mildly-mixing":
        n = p["n"]
        f = Y.system(X, _blocks(iterate_f_rule(n), "iter-f", n=n), name="f")
        g = Y.system(X, _blocks(iterate_g_rule(n), "iter-g", n=n), name="g")
        return (f, g)
    if example_id == "ten-block-thick-syndetic":
        return Y.system(X, _blocks(ten_block_rule, "ten-block"), name="f")
    if example_id == "padded-rotation":
        alpha = Fraction(p["numerator"], p["denominator"])
        return Y.system(S.CircleSpace(), _blocks(padded_rotation_rule(alpha), "padded-rotation", alpha=alpha), name="f")
    if example_id == "minimal-weakmix-not-multi":
        return Y.system(X, _blocks(lizi_f_rule, "lizi-f"), name="f")
    raise InvalidArgument(f"unknown example {example_id!r}")


def defining_identities(example_id, systems, p):
    """Canonical-form checks of the identities each construction relies on."""
    H = p["horizon"]
    out = []

    def record(text, ok, upto):
        out.append({"identity": text, "holds": bool(ok), "checked_up_to": upto})

    if example_id in ("product-syndetic-weakmix", "minimal-weakmix-not-multi"):
        f = systems[0] if isinstance(systems, tuple) else systems
        K = H // 2
        record("f_1^{2k-1} = σ^k", all(f.compose(1, 2 * k - 1) == _sigma(k) for k in range(1, K + 1)), K)
        record("f_1^{2k} = id", all(f.compose(1, 2 * k) == M.IDENTITY for k in range(1, K + 1)), K)
        if isinstance(systems, tuple):
            g = systems[1]
            record("g_1^{2k} = σ^k", all(g.compose(1, 2 * k) == _sigma(k) for k in range(1, K + 1)), K)
            record("g_1^{2k-1} = id", all(g.compose(1, 2 * k - 1) == M.IDENTITY for k in range(1, K + 1)), K)
    elif example_id == "iterate-mildly-mixing":
        f, g = systems
        n = p["n"]
        record("f_1^{kn} = σ^k", all(f.compose(1, k * n) == _sigma(k) for k in range(1, H + 1)), H)
        record("f_1^{kn+1} = id", all(f.compose(1, k * n + 1) == M.IDENTITY for k in range(1, H + 1)), H)
        record("g_1^{(k-1)n+1} = σ^k", all(g.compose(1, (k - 1) * n + 1) == _sigma(k) for k in range(1, H + 1)), H)
        record("g_1^{kn} = id", all(g.compose(1, k * n) == M.IDENTITY for k in range(1, H + 1)), H)
    elif example_id == "ten-block-thick-syndetic":
        f = systems
        starts = f.seq.block_starts(H)
        record("f_1^{s-1} = id at every block start s", all(f.compose(1, s - 1) == M.IDENTITY for s in starts), H)
        k, ok = 1, True
        while 10**k <= H:
            s = next((s for s in starts if 10**k <= s < 10**k + 10), None)
            expected = [_sigma(k)] * k + [_sigma(-k * k)] + [M.IDENTITY] * 8
            got = [f.map_at(i) for i in range(s, s + len(expected))] if s is not None else []
            ok = ok and got == expected
            k += 1
        record("the block starting in [10^k, 10^k+10) is g_k", ok, H)
    elif example_id == "padded-rotation":
        f = systems
        alpha = Fraction(p["numerator"], p["denominator"])
        js = [j for j in range(1, H + 1) if j * (j + 1) // 2 <= H]
        record("f_1^{T_j} = R(jα), T_j = j(j+1)/2",
               all(f.compose(1, j * (j + 1) // 2) == M.rotation(j * alpha) for j in js), H)
    return out


def build_example(example_id, params=None):
    """System (or (f, g) pair) for an example; defining identities are checked first."""
    p = example_params(example_id, params)
    systems = _build(example_id, p)
    bad = [i["identity"] for i in defining_identities(example_id, systems, p) if not i["holds"]]
    if bad:
        raise NdsError(f"{example_id}: defining identities fail: {bad}")
    return systems


def _check_named(sys, notion, spec, options, registry=()):
    spec = spec.with_(notion=notion, **options)
    return P.check(sys, spec, registry)


def _gap_bound_from_mixing(resolution, horizon):
    """M + 10 with M the last miss of the shift's hitting sets at ``resolution``."""
    mix = P.check_mixing(Y.system(_shift_space(), Y.Constant(SIGMA)), CheckSpec(resolution=resolution, horizon=horizon))
    M_ = mix.witnesses["max_N"] - 1
    return M_, M_ + 10


def run_example(example_id, params=None, spec=None):
    """Build the example and run exactly the notions of its expected table."""
    if isinstance(spec, CheckSpec):
        params = dict(params or {}, horizon=spec.horizon, resolution=spec.resolution)
    p = example_params(example_id, params)
    ex = EXAMPLES[example_id]
    systems = _build(example_id, p)
    identities = defining_identities(example_id, systems, p)
    if not all(i["holds"] for i in identities):
        raise NdsError(f"{example_id}: defining identities fail")
    r, Hz = p["resolution"], p["horizon"]
    base = CheckSpec(resolution=r, horizon=Hz)
    extras = {}
    subjects, registries = {}, {}

    if example_id == "product-syndetic-weakmix":
        f, g = systems
        subjects = {"f": (f, base.with_(gap_bound=2 * r)), "g": (g, base.with_(gap_bound=2 * r)),
                    "f×g": (Y.product([f, g]), base.with_(resolution=(1, 1), gap_bound=2 * r))}
    elif example_id == "iterate-mildly-mixing":
        f, g = systems
        shift_sys = Y.system(_shift_space(), Y.Constant(SIGMA), name="shift")
        fn = Y.iterate_system(f, p["n"])
        subjects = {"g": (g, base), "f^[n]": (fn, base), "f": (f, base)}
        registries = {"f^[n]": [g, shift_sys], "f": [g]}
    elif example_id == "ten-block-thick-syndetic":
        M_, gap = _gap_bound_from_mixing(r, Hz)
        extras["gap_bound"] = {"M": M_, "gap_bound": gap}
        subjects = {"f": (systems, base.with_(gap_bound=gap, run_request=p["run_request"]))}
    elif example_id == "padded-rotation":
        subjects = {"f": (systems, base.with_(run_request=p["run_request"]))}
    elif example_id == "minimal-weakmix-not-multi":
        subjects = {"f": (systems, base)}

    rows = []
    for e in ex.expectations:
        sys, spec_ = subjects[e.subject]
        reg = registries.get(e.subject, ())
        try:
            v = _check_named(sys, e.notion, spec_, e.options, reg)
        except ResourceLimit as err:
            rows.append({"subject": e.subject, "notion": e.notion, "expected": e.expected.value,
                         "observed": "resource-limit", "match": False, "claim": e.claim, "error": str(err)})
            continue
        row = {
            "subject": e.subject,
            "system": sys.describe(),
            "notion": e.notion,
            "expected": e.expected.value,
            "observed": v.status.value,
            "match": v.status is e.expected,
            "claim": e.claim,
            "verdict": v.to_json(),
        }
        if v.fails:
            row["replay"] = P.replay(sys, v, reg)
        rows.append(row)

    if example_id == "ten-block-thick-syndetic":
        ts = next(r_ for r_ in rows if r_["notion"] == "thickly_syndetically_transitive")
        if ts["observed"] == F.value:
            extras["identity_window"] = _identity_window(systems, ts["verdict"]["certificate"])
    if example_id == "padded-rotation":
        wm = next(r_ for r_ in rows if r_["notion"] == "weakly_mixing")
        if wm["observed"] == F.value:
            extras["arcs"] = [x["set"] for pair in wm["verdict"]["certificate"]["pairs"] for x in pair]

    return {
        "example": example_id,
        "params": dict(sorted(p.items())),
        "identities": identities,
        "rows": rows,
        "extras": extras,
        "notes": list(ex.notes),
        "all_match": all(row["match"] for row in rows),
    }


def _identity_window(f, cert):
    """The certificate window, with the identity indices inside it."""
    lo, hi = cert["window"]
    others = [n for n in range(lo, hi + 1) if f.compose(1, n) != M.IDENTITY]
    longest = max(b - a - 1 for a, b in zip([lo - 1] + others, others + [hi + 1]))
    return {
        "window": [lo, hi],
        "length": hi - lo + 1,
        "run_length": cert["run_length"],
        "identity_count": hi - lo + 1 - len(others),
        "non_identity_indices": others,
        "isolated": all(b - a > 1 for a, b in zip(others, others[1:])),
        "longest_identity_stretch": longest,
    }


def run_gallery(params=None, spec=None, jobs=1):
    params = params or {}
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        futs = [ex.submit(run_example, i, params.get(i), spec) for i in EXAMPLE_IDS]
        return [f.result() for f in futs]


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    system: object
    resolution: object
    horizon: int

    def spec(self, notion="transitive", **kw):
        kw.setdefault("resolution", self.resolution)
        kw.setdefault("horizon", self.horizon)
        return CheckSpec(notion=notion, **kw)

    def to_json(self):
        return {"name": self.name, "system": self.system.describe(), "resolution": self.resolution,
                "horizon": self.horizon}


def default_registry():
    X = _shift_space()
    return [
        RegistryEntry("shift", Y.system(X, Y.Constant(SIGMA), name="shift"), 2, 48),
        RegistryEntry("rotation", Y.system(S.CircleSpace(), Y.Constant(M.rotation(Fraction(159, 257))),
                                           name="rotation(159/257)"), 8, 96),
        RegistryEntry("product-example-f", build_example("product-syndetic-weakmix", {"horizon": 48})[0], 2, 48),
        RegistryEntry("ten-block", build_example("ten-block-thick-syndetic"), 1, 1100),
        RegistryEntry("padded-rotation", build_example("padded-rotation"), 8, 200),
        RegistryEntry("periodic", Y.system(X, Y.Periodic((M.shift(2), M.shift(-1))), name="periodic(σ², σ⁻¹)"), 2, 48),
    ]


# ---------------------------------------------------------------- suites


@dataclass(frozen=True)
class TheoremSuite:
    id: str
    statement: str
    policy: str
    bounds: dict


SUITES = {
    s.id: s
    for s in (
        TheoremSuite(
            "iteration-invariance-multi",
            "f is multi-transitive iff its n-th iterate is",
            "iterate horizon = H // n; a failure of the iterate at order m is padded to order m*n for f",
            {"m_bound": 2, "n_max": 4},
        ),
        TheoremSuite(
            "strong-equivalents",
            "strong multi-transitivity of f, of f^[n], of f^[(1,2)], and weak mixing of all orders of "
            "f × f^[2] × ... × f^[k] are equivalent",
            "each column reduces to base conditions (vector b, l <= H // max b); a failing base condition is "
            "transported to every holding column when representable, else that column is re-checked at b",
            {"vector_bound": (2, 2), "ns": (2, 3), "ks": (1, 2, 3), "orders": (2, 3)},
        ),
        TheoremSuite(
            "delta-characterization",
            "Delta-transitivity by open-set intersections agrees with the pointwise trajectory condition",
            "per basis tuple and m <= m_bound: first n with a non-empty intersection, by set algebra and by "
            "enumerating points (shift: involved coordinates; circle: a grid containing all endpoints; finite: all)",
            {"m_bound": 2, "horizon_cap": 32, "resolution_cap": 4},
        ),
        TheoremSuite(
            "delta-iteration",
            "f is Delta-transitive iff its n-th iterate is",
            "iterate horizon = H // n; a failing tuple of the iterate is padded to order m*n for f",
            {"m_bound": 2, "n_max": 3},
        ),
        TheoremSuite(
            "periodic-collapse",
            "a k-periodic system has a property iff the autonomous system of g = f_k ∘ ... ∘ f_1 has it",
            "g is checked at horizon H // k; a failure of g at vector a maps to vector k*a, a failing Delta "
            "tuple is padded to order m*k",
            {"vector_bound": (2, 2), "m_bound": 2},
        ),
        TheoremSuite(
            "semiconjugacy-transfer",
            "properties pass from f to any factor g = h(f)",
            "f = S × shift with h the first projection at resolution (r, 1); a row is FLAGGED when f Holds "
            "and the factor S Fails",
            {"vector": (1, 2), "m_bound": 2},
        ),
        TheoremSuite(
            "thick-implies-total",
            "a thickly transitive system is totally transitive",
            "thick with run_request = n_bound; iterates at H // n",
            {"n_bound": 3},
        ),
        TheoremSuite(
            "chain-delta-mixing",
            "chain mixing plus shadowing gives Delta-mixing; chain transitivity plus shadowing gives transitivity",
            "all 2- and 3-point periodic systems of period <= 2 over a fixed eps/delta grid",
            {"eps": ("1/2", "3/2", "5/2"), "deltas": ("3", "2", "3/2", "1", "1/2"), "length_bound": 12, "m_bound": 2},
        ),
    )
}

SUITE_IDS = tuple(SUITES)


def _verdict_json(v):
    return v.to_json() if v is not None else None


def _status(v):
    return v.status.value if v is not None else "not run"


def _outcome(ok):
    return "CONSISTENT" if ok else "FLAGGED"


def _replayed(sys, notion, horizon, cert, extra=None):
    """Wrap a transported certificate and replay it through the primitives."""
    params = dict(extra or {}, horizon=horizon)
    v = fails(notion, params, cert, (P.TRUNCATION_NOTE, "transported certificate"))
    return v, P.replay(sys, v)


def _whole(space):
    return S.whole(space)


# ----- Thm: multi-transitivity under iteration


def _iteration_multi_row(entry, n, b):
    f = entry.system
    Hh = entry.horizon
    left = P.check_multi_transitive(f, b["m_bound"], entry.spec(horizon=Hh))
    fn = Y.iterate_system(f, n)
    right = P.check_multi_transitive(fn, b["m_bound"], entry.spec(horizon=Hh // n))
    row = {"system": entry.name, "n": n, "left": left.to_json(), "right": right.to_json(), "escalations": []}
    lf = left.status
    if left.holds and right.fails:
        c = right.certificate
        m = c["m"]
        pairs = [c["pairs"][(j - 1) // n] for j in range(1, m * n + 1)]
        cert = {"vector": list(range(1, m * n + 1)), "l_bound": Hh // (m * n), "pairs": pairs}
        v, ok = _replayed(f, "multi_transitive_vector", Hh, cert, {"vector": cert["vector"]})
        row["escalations"].append({"side": "left", "order": m * n, "replay": ok, "verdict": v.to_json()})
        if ok:
            lf = Status.FAILS
    row["final"] = [lf.value, right.status.value]
    row["outcome"] = _outcome(lf is right.status)
    return row


# ----- Thm: Delta-transitivity under iteration


def _padded_delta(space, Us_json, m, n):
    """Tuple of order m*n with slot i*n holding U_i and the whole space elsewhere."""
    whole = P.enc(_whole(space))
    return [Us_json[j // n] if j % n == 0 else whole for j in range(m * n + 1)]


def _delta_row(entry, n, b):
    f = entry.system
    Hh = entry.horizon
    left = P.check_delta_transitive(f, b["m_bound"], entry.spec(horizon=Hh))
    fn = Y.iterate_system(f, n)
    right = P.check_delta_transitive(fn, b["m_bound"], entry.spec(horizon=Hh // n))
    row = {"system": entry.name, "n": n, "left": left.to_json(), "right": right.to_json(), "escalations": []}
    lf = left.status
    if left.holds and right.fails:
        c = right.certificate
        m = c["m"]
        cert = {"m": m * n, "index_set": {"range": [1, Hh // (m * n)]}, "Us": _padded_delta(f.space, c["Us"], m, n)}
        v, ok = _replayed(f, "delta_transitive", Hh, cert)
        row["escalations"].append({"side": "left", "order": m * n, "replay": ok, "verdict": v.to_json()})
        if ok:
            lf = Status.FAILS
    row["final"] = [lf.value, right.status.value]
    row["outcome"] = _outcome(lf is right.status)
    return row


# ----- Thm: four equivalents of strong multi-transitivity


def _column_base(col, cert, f_space):
    """Base condition (vector b, pairs over X) of a failing column certificate."""
    dec = lambda d: P.dec(f_space, d)  # noqa: E731
    kind = col["kind"]
    if kind in ("base", "iterate"):
        scale = col.get("n", 1)
        return ([scale * a for a in cert["vector"]], [(dec(u), dec(v)) for u, v in cert["pairs"]])
    if kind == "vector":
        a, out_b, out_p = col["a"], [], []
        prod = S.ProductSpace((f_space,) * len(a))
        for ai, (u, v) in zip(cert["vector"], cert["pairs"]):
            U, V = S.openset_from_json(prod, u["parts"]), S.openset_from_json(prod, v["parts"])
            for j, aj in enumerate(a):
                out_b.append(ai * aj)
                out_p.append((_component(U, j, f_space), _component(V, j, f_space)))
        return out_b, out_p
    # product f × f^[2] × ... × f^[k], weak mixing certificate
    k = col["k"]
    prod = S.ProductSpace((f_space,) * k)
    out_b, out_p = [], []
    for u, v in cert["pairs"]:
        U, V = S.openset_from_json(prod, u["parts"]), S.openset_from_json(prod, v["parts"])
        for j in range(k):
            out_b.append(j + 1)
            out_p.append((_component(U, j, f_space), _component(V, j, f_space)))
    return out_b, out_p


def _component(box_set, j, space):
    """Coordinate j of a single-box open set."""
    if len(box_set.parts) != 1:
        raise InvalidArgument("expected a single box")
    comp = box_set.parts[0].components[j]
    return comp if isinstance(comp, S.OpenSet) else S.OpenSet(space, (comp,))


def _transport(col, basecond, f, Hh):
    """Certificate for column ``col`` implied by a failing base condition, or None."""
    b, pairs = basecond
    L = Hh // max(b)
    kind = col["kind"]
    sysc = col["system"]
    if kind == "base":
        cert = {"vector": b, "l_bound": L, "pairs": [[P.enc(U), P.enc(V)] for U, V in pairs]}
        return _replayed(sysc, "multi_transitive_vector", Hh, cert, {"vector": b})
    if kind == "iterate":
        n = col["n"]
        if any(x % n for x in b):
            return None
        a = [x // n for x in b]
        cert = {"vector": a, "l_bound": (Hh // n) // max(a), "pairs": [[P.enc(U), P.enc(V)] for U, V in pairs]}
        return _replayed(sysc, "multi_transitive_vector", Hh // n, cert, {"vector": a})
    if kind == "vector":
        prod = sysc.space
        w = _whole(f.space)
        boxes = []
        for U, V in pairs:
            boxes.append([P.enc(S.box(prod, [U] + [w] * (len(col["a"]) - 1))),
                          P.enc(S.box(prod, [V] + [w] * (len(col["a"]) - 1)))])
        hz = Hh // max(col["a"])
        cert = {"vector": b, "l_bound": hz // max(b), "pairs": boxes}
        return _replayed(sysc, "multi_transitive_vector", hz, cert, {"vector": b})
    # product column: slot each base coordinate into component b_j of some row
    k = max(col["k"], max(b))
    prod_sys = _product_of_iterates(f, k)
    mult = Counter(b)
    order = max(2, max(mult.values()))
    w = _whole(f.space)
    rows = [[(w, w) for _ in range(k)] for _ in range(order)]
    used = Counter()
    for x, (U, V) in zip(b, pairs):
        rows[used[x]][x - 1] = (U, V)
        used[x] += 1
    cert = {"pairs": [[P.enc(S.box(prod_sys.space, [p[0] for p in r])), P.enc(S.box(prod_sys.space, [p[1] for p in r]))]
                      for r in rows]}
    v, ok = _replayed(prod_sys, "weakly_mixing", Hh // k, cert, {"order": order, "k": k})
    return v, ok


_PRODUCTS = {}


def _product_of_iterates(f, k):
    key = (id(f), k)
    p = _PRODUCTS.get(key)
    if p is None or p[0] is not f:
        p = _PRODUCTS[key] = (f, Y.product([Y.iterate_system(f, j) for j in range(1, k + 1)]))
    return p[1]


def _strong_row(entry, b):
    f, Hh = entry.system, entry.horizon
    vb = tuple(b["vector_bound"])
    cols = [{"name": "(1) f strongly multi-transitive", "kind": "base", "system": f}]
    for n in b["ns"]:
        cols.append({"name": f"(2) f^[{n}] strongly multi-transitive", "kind": "iterate", "n": n,
                     "system": Y.iterate_system(f, n)})
    cols.append({"name": "(3) f^[(1,2)] strongly multi-transitive", "kind": "vector", "a": (1, 2),
                 "system": Y.vector_system(f, (1, 2))})
    cols.append({"name": "(4) f × ... × f^[k] weakly mixing of all orders", "kind": "product",
                 "k": max(b["ks"]), "system": None})

    verdicts = []
    for col in cols:
        if col["kind"] == "base":
            v = P.check_strongly_multi_transitive(f, vb, entry.spec(horizon=Hh))
        elif col["kind"] == "iterate":
            v = P.check_strongly_multi_transitive(col["system"], vb, entry.spec(horizon=Hh // col["n"]))
        elif col["kind"] == "vector":
            res = entry.resolution
            v = P.check_strongly_multi_transitive(col["system"], vb, entry.spec(resolution=(res, res), horizon=Hh // 2))
        else:
            v = _product_column(f, entry, b)
        verdicts.append(v)

    final = [v.status for v in verdicts]
    escalations = []
    ref = None
    for col, v in zip(cols, verdicts):
        if v.fails:
            cert = v.certificate
            if col["kind"] == "product":
                col = dict(col, k=cert["k"])
            ref = (col["name"], _column_base(col, cert, f.space))
            break
    if ref is not None:
        for i, (col, v) in enumerate(zip(cols, verdicts)):
            if v.fails:
                continue
            got = _transport(col, ref[1], f, Hh)
            if got is None:
                # not representable: re-check the column at the reference vector in its own coordinates
                a = tuple(ref[1][0])
                hz = Hh // col["n"]
                v2 = P.check_multi_transitive_vector(col["system"], a, entry.spec(horizon=hz))
                escalations.append({"column": col["name"], "from": ref[0], "kind": "re-check", "vector": list(a),
                                    "verdict": v2.to_json()})
                if v2.fails:
                    final[i] = Status.FAILS
                continue
            v2, ok = got
            escalations.append({"column": col["name"], "from": ref[0], "kind": "transported", "replay": ok,
                                "verdict": v2.to_json()})
            if ok:
                final[i] = Status.FAILS
    return {
        "system": entry.name,
        "columns": [{"name": c["name"], "verdict": v.to_json()} for c, v in zip(cols, verdicts)],
        "escalations": escalations,
        "final": [s.value for s in final],
        "outcome": _outcome(len(set(final)) == 1),
    }


def _product_column(f, entry, b):
    """Weak mixing of orders in ``b['orders']`` for every product f × ... × f^[k], k in ks."""
    res = entry.resolution
    for k in b["ks"]:
        sysk = f if k == 1 else _product_of_iterates(f, k)
        spec = entry.spec(resolution=res if k == 1 else (res,) * k, horizon=entry.horizon // k)
        for o in b["orders"]:
            if k == 1:
                v = P.check_weak_mixing_order(f, o, spec)
                if v.fails:
                    # f alone is the product with k = 1: view it as a one-factor product
                    sys1 = _product_of_iterates(f, 1)
                    X1 = sys1.space
                    pairs = [[P.enc(S.box(X1, [P.dec(f.space, u)])), P.enc(S.box(X1, [P.dec(f.space, w)]))]
                             for u, w in v.certificate["pairs"]]
                    return fails("weakly_mixing_products", {"horizon": entry.horizon, "ks": list(b["ks"])},
                                 {"k": 1, "order": o, "pairs": pairs}, v.notes)
            else:
                v = P.check_weak_mixing_order(sysk, o, spec)
                if v.fails:
                    return fails("weakly_mixing_products", {"horizon": entry.horizon, "ks": list(b["ks"])},
                                 dict(v.certificate, k=k, order=o), v.notes)
    from .verdict import holds

    return holds("weakly_mixing_products", {"horizon": entry.horizon, "ks": list(b["ks"]),
                                            "orders": list(b["orders"])})


# ----- Thm: Delta-transitivity characterization


def _lcm_denominators(maps_):
    q = 1
    for m in maps_:
        if isinstance(m, M.Rotation):
            q = q * m.alpha.denominator // math.gcd(q, m.alpha.denominator)
    return q


def _pointwise_realized(f, Us, n):
    """Some point x with f_1^{in}(x) in U_i for all i, found by enumerating candidate points."""
    space = f.space
    fs = [M.IDENTITY] + [f.compose(1, i * n) for i in range(1, len(Us))]
    if isinstance(space, S.FiniteSpace):
        cands = range(space.size)
    elif isinstance(space, S.CircleSpace):
        q = _lcm_denominators(fs)
        for U in Us:
            for p in U.parts:
                q = q * p.left.denominator // math.gcd(q, p.left.denominator)
                q = q * p.length.denominator // math.gcd(q, p.length.denominator)
        cands = [Fraction(j, q) for j in range(q) if S.contains(Us[0], Fraction(j, q))]
    elif isinstance(space, S.ShiftSpace):
        offs = []
        for m in fs:
            if m == M.IDENTITY:
                offs.append(0)
            elif isinstance(m, M.ShiftPower):
                offs.append(m.j)
            else:
                raise InvalidArgument(f"pointwise route needs shift powers, got {m.describe()}")
        coords = sorted({c + s for U, s in zip(Us, offs) for p in U.parts for c, _ in p.constraints})
        cands = []
        if coords:
            lo, hi = coords[0], coords[-1]
            import itertools

            for vals in itertools.product(range(space.alphabet_size), repeat=len(coords)):
                word = [0] * (hi - lo + 1)
                for c, v in zip(coords, vals):
                    word[c - lo] = v
                cands.append(S.ShiftPoint(tuple(word), lo, 0))
        else:
            cands = [S.ShiftPoint((), 0, 0)]
    else:
        raise InvalidArgument(f"no pointwise route for {space.describe()}")
    for x in cands:
        if all(S.contains(U, S.apply(m, space, x)) for U, m in zip(Us, fs)):
            return True
    return False


def _delta_char_row(entry, b):
    import itertools

    f = entry.system
    Hh = min(entry.horizon, b["horizon_cap"])
    res = entry.resolution if isinstance(f.space, S.FiniteSpace) else min(entry.resolution, b["resolution_cap"])
    B = S.basis(f.space, res)
    mismatches, checked = [], 0
    for m in range(1, b["m_bound"] + 1):
        for tup in itertools.product(range(len(B)), repeat=m + 1):
            Us = [B[i] for i in tup]
            first_set = next((n for n in range(1, Hh // m + 1) if not delta_intersection(f, Us, n).is_empty()), None)
            first_pt = next((n for n in range(1, Hh // m + 1) if _pointwise_realized(f, Us, n)), None)
            checked += 1
            if first_set != first_pt:
                mismatches.append({"m": m, "Us": [U.describe() for U in Us], "set_algebra": first_set,
                                   "pointwise": first_pt})
    v = P.check_delta_transitive(f, b["m_bound"], CheckSpec(resolution=res, horizon=Hh))
    row = {"system": entry.name, "resolution": res, "horizon": Hh, "tuples": checked, "delta_transitive": v.to_json(),
           "mismatches": mismatches}
    ok = not mismatches
    if isinstance(f.space, S.FiniteSpace):
        # dense-trajectory condition with the starting point at each singleton
        cond = _finite_trajectory_condition(f, b["m_bound"], Hh)
        row["trajectory_condition"] = cond
        ok = ok and (cond == v.holds)
    row["outcome"] = _outcome(ok)
    return row


def _finite_trajectory_condition(f, m_bound, Hh):
    import itertools

    N = f.space.size
    for m in range(1, m_bound + 1):
        for x in range(N):
            seen = set()
            for n in range(1, Hh // m + 1):
                seen.add(tuple(S.apply(f.compose(1, i * n), f.space, x) for i in range(1, m + 1)))
            if len(seen) < N**m:
                return False
    return True


def _finite_rows():
    """Small finite systems added to the characterization suite."""
    X2, X3 = S.FiniteSpace.discrete(2), S.FiniteSpace.discrete(3)
    return [
        RegistryEntry("finite-cycle3", Y.system(X3, Y.Constant(M.finite_map([1, 2, 0])), name="cycle3"), 1, 24),
        RegistryEntry("finite-swap", Y.system(X2, Y.Constant(M.finite_map([1, 0])), name="swap"), 1, 24),
        RegistryEntry("finite-identity", Y.system(X2, Y.Constant(M.IDENTITY), name="identity2"), 1, 24),
    ]


# ----- periodic collapse


def _collapse_row(entry, b):
    Psys, Hh = entry.system, entry.horizon
    k = Psys.period
    g = Y.system(Psys.space, Y.Constant(Y.periodic_collapse(Psys.seq, k)), name=f"collapse({entry.name})")
    hz = Hh // k
    vb = tuple(b["vector_bound"])
    out = {"system": entry.name, "period": k, "collapse": g.describe(), "rows": []}

    left = P.check_strongly_multi_transitive(Psys, vb, entry.spec(horizon=Hh))
    right = P.check_strongly_multi_transitive(g, vb, entry.spec(horizon=hz))
    r1 = {"notion": "strongly_multi_transitive", "left": left.to_json(), "right": right.to_json(), "escalations": []}
    lf, rf = left.status, right.status
    if left.holds and right.fails:
        c = right.certificate
        a = [k * x for x in c["vector"]]
        cert = {"vector": a, "l_bound": c["l_bound"], "pairs": c["pairs"]}
        v, ok = _replayed(Psys, "multi_transitive_vector", Hh, cert, {"vector": a})
        r1["escalations"].append({"side": "periodic", "replay": ok, "verdict": v.to_json()})
        if ok:
            lf = Status.FAILS
    elif left.fails and right.holds:
        a = left.certificate["vector"]
        if all(x % k == 0 for x in a):
            a2 = [x // k for x in a]
            cert = {"vector": a2, "l_bound": hz // max(a2), "pairs": left.certificate["pairs"]}
            v, ok = _replayed(g, "multi_transitive_vector", hz, cert, {"vector": a2})
            r1["escalations"].append({"side": "collapse", "replay": ok, "verdict": v.to_json()})
        else:
            v = P.check_multi_transitive_vector(g, a, entry.spec(horizon=hz))
            ok = v.fails
            r1["escalations"].append({"side": "collapse", "kind": "re-check", "verdict": v.to_json()})
        if ok:
            rf = Status.FAILS
    r1["final"] = [lf.value, rf.value]
    r1["outcome"] = _outcome(lf is rf)
    out["rows"].append(r1)

    left = P.check_delta_transitive(Psys, b["m_bound"], entry.spec(horizon=Hh))
    right = P.check_delta_transitive(g, b["m_bound"], entry.spec(horizon=hz))
    r2 = {"notion": "delta_transitive", "left": left.to_json(), "right": right.to_json(), "escalations": []}
    lf, rf = left.status, right.status
    if left.holds and right.fails:
        c = right.certificate
        m = c["m"]
        cert = {"m": m * k, "index_set": {"range": [1, Hh // (m * k)]}, "Us": _padded_delta(Psys.space, c["Us"], m, k)}
        v, ok = _replayed(Psys, "delta_transitive", Hh, cert)
        r2["escalations"].append({"side": "periodic", "replay": ok, "verdict": v.to_json()})
        if ok:
            lf = Status.FAILS
    r2["final"] = [lf.value, rf.value]
    r2["outcome"] = _outcome(lf is rf)
    out["rows"].append(r2)
    out["outcome"] = _outcome(all(r["outcome"] == "CONSISTENT" for r in out["rows"]))
    return out


def _periodic_entries(registry):
    X = _shift_space()
    extra = RegistryEntry("periodic(σ, σ⁻¹)", Y.system(X, Y.Periodic((SIGMA, M.shift(-1))), name="periodic(σ, σ⁻¹)"),
                          2, 48)
    return [e for e in registry if e.system.period is not None] + [extra]


# ----- semiconjugacy transfer


def _semiconj_row(entry, b):
    Ssys, Hh = entry.system, entry.horizon
    shift_sys = Y.system(_shift_space(), Y.Constant(SIGMA), name="shift")
    Fsys = Y.product([Ssys, shift_sys])
    h = M.Projection(0, 2)
    structural = Y.check_semiconjugacy(h, Fsys, Ssys, min(Hh, 64))
    res_f = (entry.resolution, 1)
    rows = []
    for notion, run in (
        ("multi_transitive_vector", lambda s, sp: P.check_multi_transitive_vector(s, b["vector"], sp)),
        ("delta_transitive", lambda s, sp: P.check_delta_transitive(s, b["m_bound"], sp)),
    ):
        vf = run(Fsys, entry.spec(resolution=res_f))
        vs = run(Ssys, entry.spec())
        rows.append({"notion": notion, "extension": vf.to_json(), "factor": vs.to_json(),
                     "outcome": _outcome(not (vf.holds and vs.fails))})
    ok = structural.holds and all(r["outcome"] == "CONSISTENT" for r in rows)
    return {"system": entry.name, "extension": Fsys.describe(), "factor_map": h.describe(),
            "semiconjugacy": structural.to_json(), "rows": rows, "outcome": _outcome(ok)}


# ----- thick implies totally transitive


def _thick_row(entry, b):
    f = entry.system
    nb = b["n_bound"]
    thick = P.check_thickly_transitive(f, entry.spec(run_request=nb))
    tt = P.check_totally_transitive(f, nb, entry.spec())
    return {"system": entry.name, "thick": thick.to_json(), "totally_transitive": tt.to_json(),
            "outcome": _outcome(not (thick.holds and tt.fails))}


# ----- chain theorems


def chain_systems():
    """All periodic systems of period <= 2 on the 2-point and 3-point test spaces."""
    import itertools

    spaces = [S.FiniteSpace.on_line([0, 1]), S.FiniteSpace.on_line([0, 1, 3])]
    out = []
    for X in spaces:
        n = X.size
        tables = [M.finite_map(t) for t in itertools.product(range(n), repeat=n)]
        for m in tables:
            out.append(Y.system(X, Y.Constant(m)))
        for m1 in tables:
            for m2 in tables:
                out.append(Y.system(X, Y.Periodic((m1, m2))))
    return out


def _chain_rows(b):
    eps_grid = [Fraction(e) for e in b["eps"]]
    deltas = [Fraction(d) for d in b["deltas"]]
    bounds = {"length_bound": b["length_bound"], "m_bound": b["m_bound"]}
    rows = []
    for sys in chain_systems():
        for eps in eps_grid:
            rep = C.verify_chain_theorems(sys, eps, deltas, bounds)
            rows.append({"system": rep["system"], "space": sys.space.describe(), "eps": rep["eps"],
                         "rows": rep["rows"], "outcome": rep["outcome"]})
    return rows


# ----- driver


def _merge_bounds(suite, bounds):
    b = dict(suite.bounds)
    for k, v in (bounds or {}).items():
        if k not in b:
            raise InvalidArgument(f"suite {suite.id} has no bound {k!r}")
        b[k] = v
    return b


def verify_theorem(suite_id, registry=None, bounds=None, jobs=1):
    """Run one theorem suite; rows come back in registry order."""
    if suite_id not in SUITES:
        raise InvalidArgument(f"unknown theorem suite {suite_id!r}")
    suite = SUITES[suite_id]
    b = _merge_bounds(suite, bounds)
    registry = list(registry) if registry is not None else default_registry()

    tasks = []
    if suite_id == "iteration-invariance-multi":
        tasks = [(_iteration_multi_row, e, n) for e in registry for n in range(2, b["n_max"] + 1)]
    elif suite_id == "delta-iteration":
        tasks = [(_delta_row, e, n) for e in registry for n in range(2, b["n_max"] + 1)]
    elif suite_id == "strong-equivalents":
        tasks = [(_strong_row, e) for e in registry]
    elif suite_id == "delta-characterization":
        tasks = [(_delta_char_row, e) for e in registry + _finite_rows()]
    elif suite_id == "periodic-collapse":
        tasks = [(_collapse_row, e) for e in _periodic_entries(registry)]
    elif suite_id == "semiconjugacy-transfer":
        tasks = [(_semiconj_row, e) for e in registry]
    elif suite_id == "thick-implies-total":
        tasks = [(_thick_row, e) for e in registry]

    if suite_id == "chain-delta-mixing":
        rows = _chain_rows(b)
    else:
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
            futs = [ex.submit(t[0], *t[1:], b) for t in tasks]
            rows = [fu.result() for fu in futs]

    return {
        "suite": suite_id,
        "statement": suite.statement,
        "policy": suite.policy,
        "bounds": {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(b.items())},
        "registry": [e.to_json() for e in registry] if suite_id != "chain-delta-mixing" else [],
        "rows": rows,
        "flagged": sum(1 for r in rows if r["outcome"] == "FLAGGED"),
        "outcome": _outcome(all(r["outcome"] == "CONSISTENT" for r in rows)),
        "note": SUITE_NOTE,
    }


# ---------------------------------------------------------------- counterexample search


@dataclass(frozen=True)
class FamilyMember:
    name: str
    system: object
    resolution: object
    horizon: int


def toy_family():
    """Ten shift systems with block b = [σ^{s b}, σ^{-s b + t}] + [id]*pad."""
    X = _shift_space()
    out = []
    for s, t, pad in [(1, 0, 0), (1, 1, 0), (2, 0, 0), (1, 0, 1), (1, 1, 1),
                      (2, 1, 0), (1, 0, 2), (2, 1, 1), (1, 2, 0), (3, 1, 0)]:

        def rule(b, start, s=s, t=t, pad=pad):
            return [_sigma(s * b), _sigma(-s * b + t)] + [M.IDENTITY] * pad

        name = f"toy(s={s},t={t},pad={pad})"
        out.append(FamilyMember(name, Y.system(X, _blocks(rule, "toy", s=s, t=t, pad=pad), name=name), 2, 24))
    return out


QUESTIONS = {
    "Q1": "minimal and multi-transitive, but not weakly mixing",
    "Q2": "Delta-transitive, but not weakly mixing of some order",
}


def _q_checks(question, mem):
    spec = CheckSpec(resolution=mem.resolution, horizon=mem.horizon)
    if question == "Q1":
        hyp = [P.check_minimal(mem.system, spec), P.check_multi_transitive(mem.system, 2, spec)]
        concl = [P.check_weak_mixing_order(mem.system, 2, spec)]
    else:
        hyp = [P.check_delta_transitive(mem.system, 2, spec)]
        concl = [P.check_weak_mixing_order(mem.system, o, spec) for o in (2, 3)]
    return hyp, concl


def search_counterexample(question, family=None, budget=10):
    """Enumerate family members in order; at most ``budget`` members are evaluated."""
    if question not in QUESTIONS:
        raise InvalidArgument(f"unknown question {question!r}")
    if int(budget) < 0:
        raise InvalidArgument("budget must be >= 0")
    family = list(toy_family() if family is None else family)
    members, candidates = [], []
    for mem in family[:budget]:
        try:
            hyp, concl = _q_checks(question, mem)
        except ResourceLimit as err:
            members.append({"member": mem.name, "outcome": "resource-limit", "error": str(err)})
            continue
        h_ok = all(v.holds for v in hyp)
        c_ok = all(v.holds for v in concl)
        outcome = "CANDIDATE" if h_ok and not c_ok else ("hypothesis-fails" if not h_ok else "conclusion-holds")
        entry = {"member": mem.name, "hypotheses": [{"notion": v.notion, "status": v.status.value} for v in hyp],
                 "conclusions": [{"notion": v.notion, "status": v.status.value, "params": v.params} for v in concl],
                 "outcome": outcome}
        if outcome == "CANDIDATE":
            entry["certificates"] = [v.to_json() for v in concl if v.fails]
            candidates.append(mem.name)
        members.append(entry)
    return {
        "question": question,
        "pattern": QUESTIONS[question],
        "budget": budget,
        "evaluated": len(members),
        "family_size": len(family),
        "exhausted": len(family) > budget,
        "members": members,
        "candidates": candidates,
        "note": CANDIDATE_NOTE,
    }
