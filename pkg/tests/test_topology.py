import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cebotarev import rationals as rt
from cebotarev import topology as tp
from cebotarev.signature import Atom, FinPresSet, SignatureSpace, quad_clauses_intersect

from oracles import splitting_by_roots, trial_primes


PS = rt.primes(20000)
SMALL = trial_primes(3000)
RADS = [-1, 2, -2, 3, -3, 5, -5, 6, -7, 13]


def Q(a, s):
    return Atom.quad(a, s)


def brute_member(fs: FinPresSet, p: int) -> bool:
    if p in fs.removed:
        return False
    if p in fs.added:
        return True
    for clause in fs.clauses:
        ok = True
        for a in clause:
            if a.kind == "quad":
                ok &= splitting_by_roots(p, a.modulus) == a.value
            else:
                ok &= p % a.modulus == a.value
        if ok:
            return True
    return False


atoms = st.builds(Q, st.sampled_from(RADS), st.sampled_from([1, -1]))
clauses = st.lists(atoms, min_size=1, max_size=3)
finpres = st.builds(lambda cs, add, rem: FinPresSet.build(cs, add, rem),
                    st.lists(clauses, max_size=3),
                    st.lists(st.sampled_from([2, 3, 5, 7, 11, 13]), max_size=2),
                    st.lists(st.sampled_from([17, 19, 23]), max_size=1))


@settings(max_examples=60, deadline=None)
@given(finpres)
def test_membership_against_root_counting(fs):
    mask = fs.member_array(np.array(SMALL))
    assert mask.tolist() == [brute_member(fs, p) for p in SMALL]


@settings(max_examples=60, deadline=None)
@given(finpres, finpres)
def test_region_algebra_matches_sieve(a, b):
    space = SignatureSpace.for_sets([a, b])
    ra, rb = space.region(a), space.region(b)
    ma, mb = a.member_array(PS), b.member_array(PS)
    for r, m in ((ra & rb, ma & mb), (ra | rb, ma | mb), (ra - rb, ma & ~mb), (~ra, ~ma)):
        assert (r.member_array(PS) == m).all()
        # canonical presentation denotes the same set
        assert (r.presentation().member_array(PS) == m).all()
    if (ra & rb).is_empty():
        assert not (ma & mb).any()


@settings(max_examples=60, deadline=None)
@given(clauses, clauses)
def test_fast_clause_intersection(c1, c2):
    a, b = FinPresSet.build([c1]), FinPresSet.build([c2])
    space = SignatureSpace.for_sets([a, b])
    exact = not (space.region(a) & space.region(b)).is_empty()
    n1 = FinPresSet.build([c1]).clauses
    n2 = FinPresSet.build([c2]).clauses
    if n1 and n2:
        assert quad_clauses_intersect(n1[0], n2[0]) == exact
    else:
        assert not exact


@settings(max_examples=60, deadline=None)
@given(finpres)
def test_complement_is_exact(fs):
    comp = tp.complement(fs)
    assert (comp.member_array(PS) == ~fs.member_array(PS)).all()


def test_complement_of_basic_set():
    comp = tp.complement(FinPresSet.clause(Q(-3, 1)))
    assert str(comp) == "(-3|-1) ∪ {3}"


def test_closure_certificate_examples():
    cert = tp.certify_clopen(FinPresSet.clause(Q(-1, -1), Q(5, -1)))
    assert not cert.closed and cert.witness == 2
    whole_signs = FinPresSet.build([[Q(-3, 1)], [Q(-3, -1)]], added=[3])
    assert tp.certify_clopen(whole_signs).clopen


def test_closure_witness_is_a_limit_point():
    # every neighbourhood of the witness meets the set: sample basic neighbourhoods of 2
    s = FinPresSet.clause(Q(-1, -1), Q(5, -1))
    mask = s.member_array(PS)
    for a in (-7, 17, -15, 33, -23, 41):
        sign = int(rt.frobenius(2, rt.QuadField(a)))
        if sign == 0:
            continue
        nbhd = rt.frobenius_array(PS, a) == sign
        assert (mask & nbhd).any()


def test_refine_partition_cells():
    cover = [FinPresSet.build([[Q(-3, 1)]], added=[3]), FinPresSet.clause(Q(-3, -1))]
    cells = tp.refine_partition(cover)
    assert [str(c.set) for c in cells] == ["(-3|1) ∪ {3}", "(-3|-1)"]
    assert not cells[0].certificate.open and cells[0].certificate.open_witness == 3
    with pytest.raises(tp.RefinementError):
        tp.refine_partition(cover, require_clopen=True)
    with pytest.raises(tp.RefinementError) as e:
        tp.refine_partition([FinPresSet.clause(Q(-3, 1))])
    assert e.value.witness is not None


@pytest.mark.parametrize("p1, p2", [(7, 2), (2, 7), (3, 5), (5, 3), (2, 3), (97, 89)])
def test_separation(p1, p2):
    sep = tp.separate_primes(p1, p2)
    assert sep.W1.member(p1) and sep.W2.member(p2)
    assert sep.certificates["W1"]["clopen"] and sep.certificates["W2"]["clopen"]
    assert sep.certificates["disjoint"]
    assert not (sep.W1.member_array(PS) & sep.W2.member_array(PS)).any()


def test_separation_rejects_equal_primes():
    with pytest.raises(ValueError):
        tp.separate_primes(5, 5)


def test_set_expression_render_and_membership():
    a = tp.Basic(FinPresSet.clause(Q(-3, 1)))
    v = tp.Basic(FinPresSet.clause(Q(-1, -1), Q(5, -1)), "V")
    e = tp.Diff(a, v)
    assert e.render() == "(-3|1) \\ V"
    assert e.render(True) == "(-3|1) \\ ((-1|-1) ∩ (5|-1))"
    m = e.member_array(PS)
    assert (m == (a.set.member_array(PS) & ~v.set.member_array(PS))).all()


def test_json_round_trip():
    fs = FinPresSet.build([[Q(-3, 1), Atom.cyclo(8, 3)]], added=[2], removed=[11])
    assert FinPresSet.from_json(fs.as_json()) == fs
    with pytest.raises(ValueError):
        FinPresSet.from_json({"clauses": [[{"quad": 4, "sign": 1}]]})


@pytest.mark.parametrize("cover, expected", [
    ([FinPresSet.full()], ["P"]),                                                   # [TRIVIAL]
    ([FinPresSet.build([[Q(-3, 1)]], added=[3]), FinPresSet.build([[Q(-3, -1)]], added=[3])],
     ["(-3|1) ∪ {3}", "(-3|-1)"]),                                                  # [DERIVED] greedy subtraction
    ([FinPresSet.build([[Q(-1, 1)]], added=[2]), FinPresSet.build([[Q(-1, -1)]], added=[2])],
     ["(-1|1) ∪ {2}", "(-1|-1)"]),
])
def test_refine_examples(cover, expected):
    cells = tp.refine_partition(cover)
    assert [str(c.set) for c in cells] == expected
    space = SignatureSpace.for_sets(cover)
    regions = [space.region(c.set) for c in cells]
    for i, r in enumerate(regions):
        assert r.issubset(space.region(cover[i]))
        for s in regions[i + 1:]:
            assert (r & s).is_empty()


@settings(max_examples=40, deadline=None)
@given(finpres, finpres)
def test_complement_involution_and_de_morgan(a, b):
    space = SignatureSpace.for_sets([a, b])
    assert space.region(tp.complement(tp.complement(a, space), space)) == space.region(a)
    ra, rb = space.region(a), space.region(b)
    assert ~(ra | rb) == (~ra & ~rb) and ~(ra & rb) == (~ra | ~rb)


@settings(max_examples=40, deadline=None)
@given(finpres, finpres)
def test_closure_bound_extensive_and_monotone(a, b):
    union = FinPresSet.build(a.clauses + b.clauses, a.added | b.added, ())
    oa, ou = tp.closure_over_approx(a).over_approx, tp.closure_over_approx(union).over_approx
    space = SignatureSpace.for_sets([a, union, oa, ou])
    assert space.region(a).issubset(space.region(oa))
    if space.region(a).issubset(space.region(union)):
        assert not (oa.member_array(PS) & ~ou.member_array(PS)).any()


@settings(max_examples=40, deadline=None)
@given(clauses)
def test_basic_sets_are_empty_or_large(clause):
    # nonempty basic sets are infinite with positive density; check a finite proxy
    fs = FinPresSet.build([clause])
    ps = rt.primes(10 ** 6)
    m = fs.member_array(ps)
    space = SignatureSpace.for_sets([fs])
    if space.region(fs).is_empty():
        assert not m.any()
        return
    assert m.sum() >= 50
    rank = rt.multiquad_context(fs.quad_radicands()).rank if fs.quad_radicands() else 0
    assert m.mean() >= 0.5 * 2.0 ** -rank
