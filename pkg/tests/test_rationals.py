from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cebotarev import rationals as rt

from oracles import euler_legendre, is_squarefree, splitting_by_roots, trial_primes


PRIMES_500 = trial_primes(500)
RADICANDS = [a for a in range(-30, 31) if a not in (0, 1) and is_squarefree(a)]


def test_sieve_matches_trial_division():
    assert rt.primes(500).tolist() == PRIMES_500
    assert rt.primes(1).size == 0
    assert rt.primes(2).tolist() == [2]
    with pytest.raises(rt.FieldError):
        rt.primes(10 ** 9)


@pytest.mark.parametrize("a", RADICANDS)
def test_frobenius_against_root_counting(a):
    F = rt.QuadField(a)
    for p in PRIMES_500[:60]:
        assert int(rt.frobenius(p, F)) == splitting_by_roots(p, a), (p, a)


@pytest.mark.parametrize("a", RADICANDS)
def test_frobenius_array_matches_scalar(a):
    ps = rt.primes(2000)
    arr = rt.frobenius_array(ps, a)
    D = rt.QuadField(a).discriminant
    assert arr.tolist() == [rt.kronecker(D, int(p)) for p in ps]


def test_kronecker_is_legendre_for_odd_primes():
    for p in PRIMES_500[1:40]:
        for a in range(-20, 21):
            assert rt.kronecker(a, p) == euler_legendre(a, p)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PRIMES_500[1:]), st.sampled_from(PRIMES_500[1:]))
def test_quadratic_reciprocity(p, q):
    if p == q:
        return
    sign = -1 if (p % 4 == 3 and q % 4 == 3) else 1
    assert rt.kronecker(p, q) * rt.kronecker(q, p) == sign


@settings(max_examples=200, deadline=None)
@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 5))
def test_kronecker_multiplicative_in_top(a, b, n):
    assert rt.kronecker(a * b, n) == rt.kronecker(a, n) * rt.kronecker(b, n)


def test_supplementary_laws_at_two():
    # (D/2) = +1 iff D = 1 mod 8, -1 iff D = 5 mod 8 [TRIVIAL]
    assert rt.frobenius(2, rt.QuadField(5)) is rt.Frobenius.INERT
    assert rt.frobenius(2, rt.QuadField(-7)) is rt.Frobenius.SPLIT
    assert rt.frobenius(2, rt.QuadField(-1)) is rt.Frobenius.RAMIFIED


def test_discriminants():
    assert [rt.QuadField(a).discriminant for a in (-1, 2, -3, 5, 3, -7)] == [-4, 8, -3, 5, 12, -7]
    assert rt.is_fundamental_discriminant(-4) and not rt.is_fundamental_discriminant(-12)
    assert rt.QuadField.from_discriminant(12).radicand == 3
    assert rt.QuadField(3).ramified == (2, 3)
    with pytest.raises(rt.FieldError):
        rt.QuadField(4)


@pytest.mark.parametrize("ell", [p for p in PRIMES_500 if p > 2][:30])
def test_signed_prime_gives_field_ramified_only_at_ell(ell):
    F = rt.lp_field(ell)
    assert F.ramified == (ell,)
    assert F.discriminant == F.radicand
    assert rt.signed_prime(ell) == (-1) ** rt.epsilon(ell) * ell


def test_cyclotomic_frobenius():
    assert rt.frobenius(7, 12) == 7
    assert rt.frobenius(3, 12) is None
    with pytest.raises(rt.FieldError):
        rt.frobenius(7, 2)


def test_predicates():
    st_ = rt.sieve_stats("quad(-1)=1 and quad(5)=-1", 100)
    brute = [p for p in PRIMES_500 if p <= 100 and splitting_by_roots(p, -1) == 1 and splitting_by_roots(p, 5) == -1]
    assert st_.members.tolist() == brute
    neg = rt.sieve_stats("not (quad(-1)=1 and quad(5)=-1)", 100)
    assert st_.count + neg.count == st_.total
    assert rt.sieve_stats("cyclo(12)=11", 100).members.tolist() == [p for p in PRIMES_500 if p <= 100 and p % 12 == 11]
    assert rt.sieve_stats("true", 10).count == 4
    for bad in ("quad(-1)=2", "quad(-1)=1 and", "cyclo(2)=1", "foo", "quad(4)=1", "(true"):
        with pytest.raises(ValueError):
            rt.sieve_stats(bad, 100)


def test_dirichlet_density_residue_class():
    # primes = 11 mod 12 have density 1/4 [DERIVED: phi(12) = 4]
    assert abs(rt.sieve_stats("cyclo(12)=11", 10 ** 6).density - 0.25) < 0.005


def test_multiquad_context_ranks():
    assert rt.multiquad_context([-1, 5, -5]).rank == 2
    assert rt.multiquad_context([2, 3, 6]).rank == 2
    ctx = rt.multiquad_context([-1, 2, 3, 5])
    assert ctx.rank == 4
    assert ctx.radicand_of(ctx.express(-30)) == -30
    assert ctx.express(7) is None


def test_multiquad_frobenius_element_matches_symbols():
    ctx = rt.multiquad_context([-1, 2, -3])
    for p in PRIMES_500[3:]:
        e = ctx.frobenius_element(p)
        for i, b in enumerate(ctx.basis):
            assert (e >> i & 1) == (splitting_by_roots(p, b) == -1)
    assert ctx.frobenius_element(3) is None


def test_galois_context_of_multiquadratic():
    from cebotarev import cset_core as cs

    mq = rt.multiquad_context([-1, 5])
    ctx = mq.to_galois_context()
    assert ctx.ambient.order == 4
    a = cs.make_cset(ctx, "Q(sqrt(-1))", 1)
    assert cs.density(a) == Fraction(1, 2)


def test_exceptional_primes_survivor():
    S = trial_primes(50)
    res = rt.exceptional_primes(rt.assignment_from_prime(101, S), 10 ** 5)
    assert 101 in res.survivors
    brute = []
    assign = rt.assignment_from_prime(101, S)
    for q in trial_primes(2000):
        if all(q == p or splitting_by_roots(q, rt.signed_prime(p)) == -s for p, s in assign.items()):
            brute.append(q)
    assert [q for q in res.survivors if q <= 2000] == brute


def test_empirical_density():
    assert rt.empirical_density(np.array([True, False, False, True])) == Fraction(1, 2)
