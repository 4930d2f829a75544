# %% [markdown]
# Clopen sets of primes
#
# Finitely presented sets are unions of intersections of Frobenius conditions,
# adjusted by finitely many primes.  Every Boolean operation is exact in a
# finite signature space, and closures are bounded by relaxing each condition
# at its ramified primes.

# %%
import json
from pathlib import Path

from cebotarev import topology as tp
from cebotarev.signature import Atom, FinPresSet

here = Path(__file__).parent
V = FinPresSet.from_json(json.loads((here / "data" / "v3_printed.json").read_text()))
print("set:", V)
cert = tp.certify_clopen(V)
print("closed?", cert.closed, "witness", cert.witness, "over-approximation", cert.over_approx)

# %%
# The complement of a basic set picks up the ramified prime.
U = FinPresSet.clause(Atom.quad(-3, 1))
print("complement of", U, "is", tp.complement(U))

# %%
# A greedy refinement of a cover is an exact partition; each cell has its own certificate.
cells = tp.refine_partition([FinPresSet.build([[Atom.quad(-3, 1)]], added=[3]), FinPresSet.clause(Atom.quad(-3, -1))])
for c in cells:
    print(c.index, c.set, "closed", c.certificate.closed, "open", c.certificate.open)

# %%
# Any two primes are separated by disjoint clopen neighbourhoods built from two quadratic conditions.
for p1, p2 in ((7, 2), (5, 13), (89, 97)):
    sep = tp.separate_primes(p1, p2)
    print(f"{p1} in {sep.W1}   |   {p2} in {sep.W2}   auxiliary q: {sep.q_witnesses}")
