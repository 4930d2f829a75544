# %% [markdown]
# Čebotarev sets inside one finite Galois group
#
# A field between the base and the top of a Galois tower is a normal subgroup H,
# and a Čebotarev set at that level is a conjugacy class of G/H.  Everything
# below is decided by finite group computations.

# %%
from cebotarev import cset_core as cs
from cebotarev import finite_group as fg

H = fg.heisenberg(3)
print("order", H.order, "exponent", H.exponent(), "classes", len(fg.conjugacy_classes(H)))
print("center", H.center().members, "generators", H.names)

# %%
# Register the fixed field of the central element rho as level "L".
ctx = cs.GaloisContext(H)
L = ctx.register("L", H.generate([H.element("rho")]))
top = cs.make_cset_from_ambient(ctx, "N", "sigma")
low = cs.make_cset_from_ambient(ctx, L, "sigma")
print("density at N:", cs.density(top), " density at L:", cs.density(low))
print("equal up to density zero:", cs.almost_equal(top, low))

# %%
# Central elements behave differently: the class of rho is a single element,
# while its image in G/L is the identity class, which is three times as large.
rho_top = cs.make_cset_from_ambient(ctx, "N", "rho")
rho_low = cs.make_cset_from_ambient(ctx, L, "rho")
print("rho:", cs.almost_subset(rho_top, rho_low), cs.almost_subset(rho_low, rho_top))

# %%
# Intersections live at the compositum; disjointness is a conjugation search.
G = fg.symmetric(3)
ctx3 = cs.GaloisContext(G)
A3 = ctx3.register("A3", G.generate([G.element("c")]))
sign_odd = cs.make_cset_from_ambient(ctx3, A3, "t")
three_cycle = cs.make_cset_from_ambient(ctx3, "N", "c")
print(cs.intersect(sign_odd, three_cycle).as_dict(), cs.is_disjoint(sign_odd, three_cycle))

# %%
# Ramified points: a non-cyclic Sylow subgroup not inside inertia isolates the point.
for name, T in (("cyclic:4", [0, 2]), ("elementary_abelian:2", [0, 1])):
    grp = fg.builtin(name)
    print(name, cs.isolated_sufficient(grp, grp.subgroup(T), 2))
