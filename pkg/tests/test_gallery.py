import json
from fractions import Fraction as F

import pytest

from ndslab import gallery as G
from ndslab import maps as M
from ndslab import space as S
from ndslab import system as Y
from ndslab.errors import InvalidArgument

X2 = S.ShiftSpace(2)


def canon(x):
    return json.dumps(x, sort_keys=True, default=str)


def test_product_example_identities():
    f, g = G.build_example("product-syndetic-weakmix")
    assert f.compose(1, 4) == M.IDENTITY
    assert g.compose(1, 4) == M.shift(2)


def test_ten_block_g_blocks():
    f = G.build_example("ten-block-thick-syndetic")
    starts = f.seq.block_starts(1100)
    for k in (1, 2, 3):
        s = next(s for s in starts if 10**k <= s < 10**k + 10)
        block = [f.map_at(i) for i in range(s, s + k + 9)]
        assert block == [M.shift(k)] * k + [M.shift(-k * k)] + [M.IDENTITY] * 8
    assert all(f.compose(1, s - 1) == M.IDENTITY for s in starts)


def test_padded_rotation_prefix_sums():
    f = G.build_example("padded-rotation")
    alpha = F(159, 257)
    for j in range(1, 19):
        assert f.compose(1, j * (j + 1) // 2) == M.rotation(j * alpha)


def test_parameter_validation():
    with pytest.raises(InvalidArgument):
        G.build_example("padded-rotation", {"denominator": 100})
    with pytest.raises(InvalidArgument):
        G.build_example("iterate-mildly-mixing", {"n": 1})
    with pytest.raises(InvalidArgument):
        G.build_example("no-such-example")
    with pytest.raises(InvalidArgument):
        G.build_example("product-syndetic-weakmix", {"colour": 3})


def test_product_report_certificate_uses_disjoint_cylinders():
    rep = G.run_example("product-syndetic-weakmix")
    row = next(r for r in rep["rows"] if r["subject"] == "f×g" and r["notion"] == "transitive")
    assert row["observed"] == "FailsWithCertificate" and row["replay"] is True
    U, V = row["verdict"]["certificate"]["U"], row["verdict"]["certificate"]["V"]
    assert (U["set"], V["set"]) == ("([0]_0 × [0]_0)", "([1]_0 × [1]_0)")


def test_minimal_weakmix_report():
    rep = G.run_example("minimal-weakmix-not-multi")
    obs = {r["notion"]: r["observed"] for r in rep["rows"]}
    assert obs["multi_transitive"] == "FailsWithCertificate"
    assert obs["delta_transitive"] == "FailsWithCertificate"
    assert obs["weakly_mixing"] == "HoldsUpToHorizon"
    assert rep["all_match"]
    assert any("not modeled" in n for n in rep["notes"])


def test_iterate_example_report():
    rep = G.run_example("iterate-mildly-mixing")
    assert rep["all_match"]
    assert all(r.get("replay", True) for r in rep["rows"])


def test_example_reports_are_deterministic():
    a = G.run_example("padded-rotation")
    b = G.run_example("padded-rotation")
    assert canon(a) == canon(b)


def test_registry_shape():
    reg = G.default_registry()
    assert len(reg) >= 6
    names = [e.name for e in reg]
    assert len(set(names)) == len(names)


def test_iteration_invariance_on_shift():
    reg = [e for e in G.default_registry() if e.name == "shift"]
    rep = G.verify_theorem("iteration-invariance-multi", reg, {"n_max": 3})
    assert rep["outcome"] == "CONSISTENT"
    assert [r["final"] for r in rep["rows"]] == [["HoldsUpToHorizon"] * 2] * 2


def test_periodic_collapse_of_shift_and_inverse():
    sp = G.RegistryEntry("pm", Y.system(X2, Y.Periodic((M.shift(1), M.shift(-1)))), 2, 24)
    rep = G.verify_theorem("periodic-collapse", [sp])
    assert rep["outcome"] == "CONSISTENT"
    row = rep["rows"][0]
    assert Y.periodic_collapse(sp.system.seq, 2) == M.IDENTITY
    smt = next(r for r in row["rows"] if r["notion"] == "strongly_multi_transitive")
    assert smt["final"] == ["FailsWithCertificate", "FailsWithCertificate"]


def test_semiconjugacy_transfer_on_shift():
    reg = [e for e in G.default_registry() if e.name == "shift"]
    rep = G.verify_theorem("semiconjugacy-transfer", reg)
    assert rep["outcome"] == "CONSISTENT" and rep["flagged"] == 0


def test_thick_implies_total_suite():
    assert G.verify_theorem("thick-implies-total")["outcome"] == "CONSISTENT"


def test_unknown_suite():
    with pytest.raises(InvalidArgument):
        G.verify_theorem("no-such-suite")


def test_search_is_deterministic():
    a = G.search_counterexample("Q1", budget=10)
    b = G.search_counterexample("Q1", budget=10)
    assert canon(a) == canon(b)
    assert a["evaluated"] == 10 and a["family_size"] == 10


def test_search_empty_family():
    rep = G.search_counterexample("Q2", family=[], budget=5)
    assert rep["members"] == [] and rep["candidates"] == [] and rep["evaluated"] == 0


def test_search_budget_truncates():
    rep = G.search_counterexample("Q2", budget=3)
    assert rep["evaluated"] == 3 and rep["exhausted"]


def test_q2_shift_member_is_not_a_candidate():
    sigma = G.FamilyMember("shift", Y.system(X2, Y.Constant(M.shift(1))), 2, 16)
    rep = G.search_counterexample("Q2", family=[sigma])
    assert rep["candidates"] == []
    assert rep["members"][0]["outcome"] == "conclusion-holds"
