import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from ndslab import maps as M
from ndslab import space as S
from ndslab.errors import InvalidArgument, UnsupportedOperation

X2 = S.ShiftSpace(2)
C = S.CircleSpace()


def test_basis_shift_resolution_one():
    B = S.basis(X2, 1)
    assert [b.describe() for b in B] == ["[0]_0", "[1]_0"]


def test_basis_circle_partition():
    B = S.basis(C, 4)
    assert [(b.parts[0].left, b.parts[0].length) for b in B] == [(F(k, 4), F(1, 4)) for k in range(4)]


def test_basis_finite_singletons():
    sp = S.FiniteSpace.discrete(3)
    assert [O.members(b) for b in S.basis(sp, 7)] == [{0}, {1}, {2}]


def test_basis_rejects_zero_resolution():
    with pytest.raises(InvalidArgument):
        S.basis(C, 0)


def test_contradictory_cylinders_are_disjoint():
    assert S.intersect(S.cylinder(X2, [0]), S.cylinder(X2, [1])).is_empty()


def test_cylinders_at_distinct_coordinates_meet():
    got = S.intersect(S.cylinder(X2, [0]), S.cylinder(X2, [1], 5))
    assert got.parts == (S.Cylinder(((0, 0), (5, 1))),)
    # oracle: some word of length 6 on coordinates 0..5 lies in both
    assert any(w[0] == 0 and w[5] == 1 for w in O.assignments(range(6), 2))


def test_wrapping_arc_intersection():
    # [0, 1/2) meets [3/4, 5/4) = [3/4, 1) ∪ [0, 1/4) only in [0, 1/4)
    got = S.intersect(S.arc(0, F(1, 2)), S.arc(F(3, 4), F(1, 2)))
    assert got == S.arc(0, F(1, 4))
    for x in O.grid(64):
        want = O.arc_member([(F(0), F(1, 2))], x) and O.arc_member([(F(3, 4), F(1, 2))], x)
        assert S.contains(got, x) == want


def test_adjacent_arcs_merge_across_zero():
    s = S.OpenSet(C, (S.Arc(F(3, 4), F(1, 4)), S.Arc(F(0), F(1, 4))))
    assert s.parts == (S.Arc(F(3, 4), F(1, 2)),)


def test_intersect_rejects_mismatched_spaces():
    with pytest.raises(InvalidArgument):
        S.intersect(S.cylinder(X2, [0]), S.arc(0, F(1, 2)))


def test_image_of_cylinder_under_shift_power():
    assert S.image(M.shift(2), S.cylinder(X2, [0, 1])) == S.cylinder(X2, [0, 1], -2)
    # pointwise: sigma^2 of a point of [01]_0 reads 01 at coordinates -2, -1
    x = S.ShiftPoint((0, 1), 0)
    y = S.apply(M.shift(2), X2, x)
    assert (y.at(-2), y.at(-1)) == (0, 1)


def test_preimage_under_rotation():
    got = S.preimage(M.rotation(F(1, 3)), S.arc(F(1, 3), F(1, 6)))
    assert got == S.arc(0, F(1, 6))
    for x in O.grid(36):
        assert S.contains(got, x) == O.arc_member([(F(1, 3), F(1, 6))], (x + F(1, 3)) % 1)


def test_image_under_identity():
    U = S.cylinder(X2, [1, 0, 1], 3)
    assert S.image(M.IDENTITY, U) == U


def test_unsupported_image_is_an_error():
    with pytest.raises(UnsupportedOperation):
        S.image(M.rotation(F(1, 3)), S.cylinder(X2, [0]))


def test_eps_dense_examples():
    orbit = [F(k, 5) for k in range(5)]
    assert S.eps_dense(orbit, C, 5)
    assert not S.eps_dense([F(0)], C, 2)
    sp = S.FiniteSpace.discrete(4)
    assert S.eps_dense(range(4), sp, 3)


def test_finite_space_validation():
    with pytest.raises(InvalidArgument):
        S.FiniteSpace(("a", "b"), ((0, 1), (2, 0)))
    with pytest.raises(InvalidArgument):
        S.FiniteSpace(("a", "b", "c"), ((0, 1, 5), (1, 0, 1), (5, 1, 0)))
    with pytest.raises(InvalidArgument):
        S.FiniteSpace((), ())


def test_circle_distance():
    assert S.distance(C, F(1, 10), F(9, 10)) == F(1, 5)


def test_shift_distance_convention():
    x = S.ShiftPoint((0, 0, 0), -1)
    y = S.ShiftPoint((0, 0, 1), -1)
    assert S.distance(X2, x, y) == F(1, 2)
    assert S.distance(X2, x, x) == 0


def test_witness_is_a_member():
    rng = random.Random(3)
    for _ in range(200):
        U = O.random_cylinder_set(rng)
        assert S.contains(U, S.witness(U))
        q = rng.randint(1, 30)
        A = O.random_arc_set(rng, q)
        assert S.contains(A, S.witness(A))


def test_small_oracle_campaigns():
    rng = random.Random(11)
    for run in (
        lambda: O.campaign_intersect(rng, 150),
        lambda: O.campaign_transport(rng, True, 150),
        lambda: O.campaign_transport(rng, False, 150),
    ):
        count, bad = run()
        assert count == 450 and bad == []


# ---------------------------------------------------------------- invariants

words = st.lists(st.integers(0, 1), max_size=6)
cylinders = st.builds(S.Cylinder.from_word, words, st.integers(-4, 4))
cyl_sets = st.lists(cylinders, min_size=0, max_size=3).map(lambda ps: S.OpenSet(X2, tuple(ps)))
arcs = st.builds(
    lambda a, b, q: S.Arc(F(a % q, q), F(b % q + 1, q)),
    st.integers(0, 63), st.integers(0, 63), st.integers(1, 32),
)
arc_sets = st.lists(arcs, max_size=3).map(lambda ps: S.OpenSet(C, tuple(ps)))


@given(cyl_sets)
def test_shift_normalization_idempotent(s):
    assert S.OpenSet(X2, s.parts) == s


@given(arc_sets)
def test_circle_normalization_idempotent_and_membership_invariant(s):
    again = S.OpenSet(C, s.parts)
    assert again == s
    for x in O.grid(64):
        assert S.contains(again, x) == S.contains(s, x)


@given(arc_sets, arc_sets)
def test_intersection_commutes(a, b):
    assert S.intersect(a, b) == S.intersect(b, a)


@given(cyl_sets, st.integers(-5, 5))
def test_shift_image_preimage_inverse(s, j):
    m = M.shift(j)
    assert S.preimage(m, S.image(m, s)) == s
    assert S.image(m, s) == S.preimage(M.inverse(m), s)


@given(arc_sets, st.integers(0, 63))
def test_rotation_image_preimage_inverse(s, k):
    m = M.rotation(F(k, 64))
    assert S.preimage(m, S.image(m, s)) == s


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, n - 1), min_size=n, max_size=n),
    st.sets(st.integers(0, n - 1)),
)))
def test_finite_preimage_of_image_contains_set(data):
    table, mem = data
    sp = S.FiniteSpace.discrete(len(table))
    m = M.finite_map(table)
    U = S.points(sp, mem)
    assert mem <= O.members(S.preimage(m, S.image(m, U)))


@given(st.integers(1, 12))
def test_circle_basis_covers_circle(r):
    whole = S.empty(C)
    for b in S.basis(C, r):
        whole = S.union(whole, b)
    assert whole == S.whole(C)
