# %% [markdown]
# Frobenius elements over the rationals and their densities
#
# Splitting in a quadratic field is a Kronecker symbol; the sieve turns
# predicates on Frobenius elements into prime sets whose densities can be
# compared with the group-theoretic prediction.

# %%
import numpy as np

from cebotarev import rationals as rt

for a in (5, -1, -3, 2):
    F = rt.QuadField(a)
    print(F, "D =", F.discriminant, [rt.frobenius(p, F).label for p in (2, 3, 5, 7, 11)])

# %%
# Signature counts in the biquadratic field Q(sqrt -3, sqrt -1).
ps = rt.primes(10 ** 6)
s3, s1 = rt.frobenius_array(ps, -3), rt.frobenius_array(ps, -1)
unram = (s3 != 0) & (s1 != 0)
for x in (1, -1):
    for y in (1, -1):
        share = ((s3 == x) & (s1 == y) & unram).sum() / unram.sum()
        print(f"(-3|{x:+d}) and (-1|{y:+d}): {share:.4f}")

# %%
# Predicates compose; members are capped but counts are exact.
st = rt.sieve_stats("quad(-1)=1 and not cyclo(3)=1", 10 ** 5)
print(st.count, "of", st.total, "primes, density", round(st.density, 4), "first few", st.members[:6])

# %%
# Each odd prime p has a quadratic field ramified only at p.  Choosing the
# Frobenius signs to match q0 = 101 leaves very few survivors below the bound.
S = rt.primes(50).tolist()
res = rt.exceptional_primes(rt.assignment_from_prime(101, S), 10 ** 5)
print("survivors up to 1e5:", res.survivors)

# %%
# Square classes: a multiquadratic context reduces its radicands to a basis.
ctx = rt.multiquad_context([-1, 5, -5, 3, -15])
print("basis", ctx.basis, "rank", ctx.rank, "express -15 ->", bin(ctx.express(-15)))
