from fractions import Fraction
from itertools import product

import pytest

from cebotarev import cset_core as cs
from cebotarev import finite_group as fg

from oracles import ambient_preimage_of_class, contained_up_to_density_zero


def heis_context():
    H = fg.heisenberg(3)
    ctx = cs.GaloisContext(H)
    ctx.register("L", H.generate([H.element("rho")]))
    return ctx


def test_density_of_singleton_and_complement():
    ctx = heis_context()
    rho = cs.make_cset_from_ambient(ctx, "N", "rho")
    assert cs.density(rho) == Fraction(1, 27)  # [DERIVED] central singleton
    sigma = cs.make_cset_from_ambient(ctx, "N", "sigma")
    assert cs.density(sigma) == Fraction(3, 27)
    assert cs.density(cs.complement_unramified(sigma)) == Fraction(24, 27)
    assert cs.density(cs.full_set(ctx, "L")) == 1
    assert cs.density(cs.decomposed_set(ctx, "L")) == Fraction(1, 9)


def test_lift_preserves_density_and_ambient_members():
    ctx = heis_context()
    for g in range(27):
        s = cs.make_cset_from_ambient(ctx, "L", g)
        lifted = cs.lift_to_level(s, "N")
        assert cs.density(lifted) == cs.density(s)
        assert lifted.ambient_members() == s.ambient_members()
    with pytest.raises(cs.ContextError):
        cs.lift_to_level(cs.make_cset(ctx, "N", 1), "L")


def test_intersection_matches_ambient_preimages():
    G = fg.symmetric(4)
    ctx = cs.GaloisContext(G)
    normals = G.normal_subgroups()
    labels = [ctx.register(f"H{i}", H) for i, H in enumerate(normals)]
    for a, b in product(labels, repeat=2):
        Qa, _ = ctx.quotient(a)
        Qb, _ = ctx.quotient(b)
        for ca in fg.conjugacy_classes(Qa):
            for cb in fg.conjugacy_classes(Qb):
                A = cs.make_cset(ctx, a, ca.representative)
                B = cs.make_cset(ctx, b, cb.representative)
                I = cs.intersect(A, B)
                assert I.ambient_members() == A.ambient_members() & B.ambient_members()
                assert cs.is_disjoint(A, B) == (not I.ambient_members())


def test_compositum_and_meet_labels_are_reused():
    G = fg.elementary_abelian_2(2)
    ctx = cs.GaloisContext(G)
    ctx.register("A", [0, 1])
    ctx.register("B", [0, 2])
    assert ctx.compositum("A", "B") == "N"
    assert ctx.meet("A", "B") == "K"
    ctx.register("C", [0, 3])
    assert ctx.compositum("A", "C") == "N"


def test_registration_errors():
    S = fg.symmetric(3)
    ctx = cs.GaloisContext(S)
    with pytest.raises(cs.ContextError):
        ctx.register("bad", S.generate([S.element("t")]).members)
    with pytest.raises(cs.ContextError):
        ctx.subgroup("missing")
    with pytest.raises(cs.ContextError):
        cs.make_cset(ctx, "N", 99)
    with pytest.raises(cs.ContextError):
        cs.context_from_spec({"fields": {}})


def test_heisenberg_almost_equal_at_different_levels():
    ctx = heis_context()
    a = cs.make_cset_from_ambient(ctx, "N", "sigma")
    b = cs.make_cset_from_ambient(ctx, "L", "sigma")
    assert ctx.subgroup("L").members != ctx.subgroup("N").members
    assert cs.almost_equal(a, b)
    assert cs.almost_subset_oracle(a, b) and cs.almost_subset_oracle(b, a)


def test_almost_subset_matches_independent_oracle_on_dihedral():
    G = fg.builtin("dihedral:4")
    ctx = cs.GaloisContext(G)
    normals = G.normal_subgroups()
    labels = [ctx.register(f"H{i}", H) for i, H in enumerate(normals)]
    for (la, Ha), (lb, Hb) in product(zip(labels, normals), repeat=2):
        for g1 in range(G.order):
            for g2 in range(G.order):
                a = cs.make_cset_from_ambient(ctx, la, g1)
                b = cs.make_cset_from_ambient(ctx, lb, g2)
                want = contained_up_to_density_zero(G, frozenset(Ha.members), g1, frozenset(Hb.members), g2)
                assert cs.almost_subset(a, b) == want


def test_ambient_preimage_oracle_agrees_with_class_sets():
    ctx = heis_context()
    G = ctx.ambient
    L = frozenset(ctx.subgroup("L").members)
    for g in range(G.order):
        assert cs.make_cset_from_ambient(ctx, "L", g).ambient_members() == ambient_preimage_of_class(G, L, g)


def test_bauer_requires_central_class():
    S = fg.symmetric(3)
    ctx = cs.GaloisContext(S)
    t = cs.make_cset_from_ambient(ctx, "N", "t")
    with pytest.raises(cs.ContextError):
        cs.bauer_subset(t, t)
    e = cs.decomposed_set(ctx, "N")
    assert cs.bauer_subset(e, e)


def test_single_class_operations_reject_unions():
    ctx = heis_context()
    u = cs.full_set(ctx, "L")
    with pytest.raises(cs.ContextError):
        cs.almost_subset(u, u)


@pytest.mark.parametrize("G, T, ell, expected", [
    ("cyclic:4", [0, 2], 2, False),                 # [DERIVED] every Sylow subgroup cyclic
    ("cyclic:4", [0], 2, False),
    ("elementary_abelian:2", [0, 1], 2, True),      # [DERIVED] non-cyclic Sylow, quotient order 2
    ("elementary_abelian:2", [0, 1, 2, 3], 2, False),
    ("heisenberg:3", "center", 3, True),            # [DERIVED] non-cyclic, quotient order 9
    ("symmetric:3", [0], 2, False),
])
def test_isolated_sufficient(G, T, ell, expected):
    grp = fg.builtin(G)
    sub = grp.center() if T == "center" else grp.subgroup(T)
    assert cs.isolated_sufficient(grp, sub, ell) is expected


def test_context_from_spec_and_as_dict():
    ctx = cs.context_from_spec({"group": {"builtin": "heisenberg:3"}, "fields": {"L": [0, 3, 10]}})
    d = cs.make_cset_from_ambient(ctx, "L", "sigma").as_dict()
    assert d["level"] == "L" and d["density"] == "1/9"
