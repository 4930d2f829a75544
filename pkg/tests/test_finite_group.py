import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cebotarev import finite_group as fg

from oracles import perm_classes, perm_group, s_n_class_sizes


SMALL = ["cyclic:1", "cyclic:6", "cyclic:12", "abelian:2,4", "elementary_abelian:3", "symmetric:3",
         "symmetric:4", "dihedral:4", "dihedral:5", "quaternion", "heisenberg:3"]


@pytest.mark.parametrize("name", SMALL)
def test_table_is_a_group(name):
    G = fg.builtin(name)
    T = G.table
    n = G.order
    assert (T[0] == np.arange(n)).all() and (T[:, 0] == np.arange(n)).all()
    for row in T:
        assert sorted(row) == list(range(n))
    # associativity on every triple [DERIVED]
    a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    assert (T[T[a, b], c] == T[a, T[b, c]]).all()


@pytest.mark.parametrize("name", SMALL)
def test_classes_partition_and_match_brute_force(name):
    G = fg.builtin(name)
    classes = fg.conjugacy_classes(G)
    assert sorted(m for c in classes for m in c.members) == list(range(G.order))
    assert sorted(map(frozenset, (c.members for c in classes)), key=min) == \
        sorted(fg.brute_force_classes(G), key=min)
    # class equation
    assert sum(c.size for c in classes) == G.order
    for c in classes:
        assert G.order % c.size == 0
        assert G.order // c.size == fg.centralizer(G, c.representative).order


@pytest.mark.parametrize("n", [3, 4])
def test_symmetric_class_sizes_against_permutation_oracle(n):
    G = fg.symmetric(n)
    assert sorted(c.size for c in fg.conjugacy_classes(G)) == s_n_class_sizes(n)


def test_s3_classes_trivial():
    assert [c.size for c in fg.conjugacy_classes(fg.symmetric(3))] == [1, 2, 3]


def test_from_permutations_agrees_with_independent_closure():
    gens = ["(1 2 3 4)", "(1 3)"]
    G = fg.from_permutations(gens)
    elems = perm_group([fg.parse_cycles(g, 4) for g in gens])
    assert G.order == len(elems) == 8
    assert sorted(len(c) for c in perm_classes(elems)) == sorted(c.size for c in fg.conjugacy_classes(G))


def test_parse_cycles_rejects_garbage():
    with pytest.raises(fg.GroupError):
        fg.parse_cycles("(1 x)")
    with pytest.raises(fg.GroupError):
        fg.parse_cycles("(1 1)")


def test_build_group_table_and_errors():
    G = fg.build_group({"table": [[0, 1], [1, 0]], "names": {"t": 1}})
    assert G.order == 2 and G.element("t") == 1
    with pytest.raises(fg.GroupError):
        fg.build_group({"table": [[0, 1], [0, 1]]})
    with pytest.raises(fg.GroupError):
        fg.builtin("nonsense:3")
    with pytest.raises(fg.GroupError):
        fg.cyclic(5).element("zeta")


def test_heisenberg_structure():
    H = fg.heisenberg(3)
    assert H.order == 27 and H.exponent() == 3
    assert len(fg.conjugacy_classes(H)) == 11  # [DERIVED] 3 central + 8 classes of size 3
    Z = H.center()
    assert Z.order == 3 and H.element("rho") in Z
    Q, proj = fg.quotient(H, Z)
    assert Q.order == 9 and Q.is_abelian()
    assert len(fg.conjugacy_classes(fg.heisenberg(5))) == 5 + 24


def test_quotient_projection_is_homomorphism():
    G = fg.builtin("dihedral:4")
    for N in G.normal_subgroups():
        Q, proj = fg.quotient(G, N)
        assert Q.order * N.order == G.order
        a, b = np.meshgrid(np.arange(G.order), np.arange(G.order), indexing="ij")
        assert (proj[G.table[a, b]] == Q.table[proj[a], proj[b]]).all()


def test_product_and_intersection():
    G = fg.elementary_abelian_2(3)
    H1, H2 = G.subgroup([0, 1]), G.subgroup([0, 2])
    assert fg.product_subgroup(H1, H2).members == (0, 1, 2, 3)
    assert fg.intersection(H1, H2).members == (0,)
    S = fg.symmetric(3)
    a, b = S.generate([S.element("t")]), S.generate([S.conj(S.element("t"), S.element("c"))])
    with pytest.raises(fg.GroupError):
        fg.product_subgroup(a, b)


@pytest.mark.parametrize("name, ell, order, cyclic", [
    ("cyclic:4", 2, 4, True),                 # [TRIVIAL]
    ("elementary_abelian:2", 2, 4, False),    # [TRIVIAL]
    ("heisenberg:3", 3, 27, False),           # [DERIVED] exponent 3, order 27
    ("symmetric:3", 3, 3, True),
    ("symmetric:4", 2, 8, False),
    ("cyclic:12", 5, 1, True),
])
def test_sylow(name, ell, order, cyclic):
    P, is_cyc = fg.sylow_and_cyclicity(fg.builtin(name), ell)
    assert P.order == order and is_cyc == cyclic


def test_abelian_groups_up_to_16_count():
    # number of abelian groups of order n summed over n <= 16 [DERIVED: partitions of exponents]
    assert len(fg.abelian_groups_up_to(16)) == 25


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30))
def test_cyclic_group_properties(n):
    G = fg.cyclic(n)
    assert G.is_abelian() and G.exponent() == n
    assert len(fg.conjugacy_classes(G)) == n
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    assert sorted(H.order for H in G.subgroups()) == divisors


def test_normal_subgroups_are_normal():
    for name in ("symmetric:4", "quaternion", "heisenberg:3"):
        G = fg.builtin(name)
        normals = G.normal_subgroups()
        assert all(H.is_normal() for H in normals)
        assert {H.members for H in normals} == {H.members for H in G.subgroups() if H.is_normal()}
