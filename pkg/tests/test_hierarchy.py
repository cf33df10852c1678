"""Implications between notions on random block-pattern systems."""

import random
from fractions import Fraction as F

from hypothesis import given
from hypothesis import strategies as st

from ndslab import maps as M
from ndslab import properties as P
from ndslab import space as S
from ndslab import system as Y
from ndslab.verdict import CheckSpec


def block_system(kind, template, pad, q=7):
    """Block b = [g(a_1 b + c_1), ..., g(a_t b + c_t)] + [id]*pad."""
    if kind == "shift":
        def unit(e):
            return M.shift(e)
        space = S.ShiftSpace(2)
    else:
        def unit(e):
            return M.rotation(F(e, q))
        space = S.CircleSpace()

    def rule(b, start):
        return [unit(a * b + c) for a, c in template] + [M.IDENTITY] * pad

    name = f"{kind}-blocks"
    return Y.system(space, Y.BlockPattern(rule, name=name, params={"t": template, "pad": pad, "q": q}))


def random_block_system(rng):
    kind = rng.choice(["shift", "circle"])
    template = [(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(rng.randint(1, 3))]
    pad = rng.randint(0, 2)
    q = rng.choice([5, 7, 11])
    return block_system(kind, template, pad, q), kind


def spec_for(kind, H=16):
    return CheckSpec(resolution=2 if kind == "shift" else 4, horizon=H, gap_bound=4, run_request=3, cofinite_tail=4)


def hierarchy_violations(sys, kind):
    """Names of violated implications (empty when all hold)."""
    s = spec_for(kind)
    H = s.horizon
    out = []
    mix = P.check_mixing(sys, s).holds
    wm = P.check_weak_mixing_order(sys, 2, s).holds
    tr = P.check_transitive(sys, s).holds
    if mix and not wm:
        out.append("mixing => weak mixing")
    if wm and not tr:
        out.append("weak mixing => transitive")
    ts = P.check_thickly_syndetically_transitive(sys, s).holds
    if ts and not (P.check_syndetically_transitive(sys, s).holds and P.check_thickly_transitive(sys, s).holds):
        out.append("thickly syndetic => syndetic and thick")
    dm = P.check_delta_mixing(sys, 2, tuple(range(1, H + 1)), s).holds
    if dm and not P.check_delta_transitive(sys, 2, s).holds:
        out.append("delta mixing => delta transitive")
    smt = P.check_strongly_multi_transitive(sys, (2, 2), s).holds
    if smt and not P.check_multi_transitive(sys, 2, s).holds:
        out.append("strong => plain multi-transitivity")
    return out


def run_hierarchy(count=200, seed=2024):
    rng = random.Random(seed)
    checked, bad = 0, []
    for _ in range(count):
        sys, kind = random_block_system(rng)
        v = hierarchy_violations(sys, kind)
        if v:
            bad.append((sys.describe(), v))
        checked += 1
    return checked, bad


def test_hierarchy_on_fixed_sample():
    checked, bad = run_hierarchy(40, seed=7)
    assert checked == 40 and bad == []


@given(
    st.sampled_from(["shift", "circle"]),
    st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), min_size=1, max_size=3),
    st.integers(0, 2),
)
def test_hierarchy_property(kind, template, pad):
    assert hierarchy_violations(block_system(kind, template, pad), kind) == []


def test_matched_parameter_hierarchy_on_shift():
    sigma = Y.system(S.ShiftSpace(2), Y.Constant(M.shift(1)))
    assert hierarchy_violations(sigma, "shift") == []
    assert P.check_mixing(sigma, spec_for("shift")).holds
