# %% [markdown]
# A discriminant-indexed ultrametric on the primes
#
# Level d uses the quadratic fields with |D| = d.  Primes with the same
# Frobenius at every field up to level n stay in one cell; the first level that
# separates x and y sets their distance.

# %%
from cebotarev import metric as mt

h = mt.Hierarchy(mt.MetricConfig(d_max=12))
for d in range(3, 9):
    lv = h.level(d)
    print(d, [F.radicand for F in lv.fields], "ramified", lv.R_d,
          {a: str(t.set) for a, t in lv.tilde_V.items()})

# %%
# Exact validity of each level partition in the signature algebra.
print([h.validity(d)["covers"] and h.validity(d)["disjoint"] for d in range(1, 13)])

# %%
m = mt.delta_matrix([2, 3, 5, 7, 11, 13, 17, 19], h.config, h)
print(m.to_csv())
print("strong triangle violations:", m.ultrametric_violations())

# %%
# Compatibility mode pins the two printed neighbourhoods and lists the printed
# displays.  The anomalies list the points where those sets misbehave.
rep = mt.compat_report()
for d, cells in rep["partitions"].items():
    print(f"W{d}:")
    for c in cells:
        print("   ", c)
for a in rep["anomalies"]:
    print("anomaly:", a)
print(rep["agreements"], "agreements,", rep["disagreements"], "disagreements")
for r in rep["pairs"]:
    if not r["agrees"]:
        print(r["pair"], "printed", r["printed_value"], "computed", r["computed_value"])
