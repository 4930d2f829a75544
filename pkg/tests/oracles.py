"""Independent brute-force oracles.  Nothing here calls the library's algorithms."""

from __future__ import annotations

from itertools import permutations


def trial_primes(n: int) -> list[int]:
    out = []
    for k in range(2, n + 1):
        if all(k % p for p in out if p * p <= k):
            out.append(k)
    return out


def is_squarefree(a: int) -> bool:
    a = abs(a)
    return all(a % (k * k) for k in range(2, int(a ** 0.5) + 1))


def splitting_by_roots(p: int, a: int) -> int:
    """Splitting of ``p`` in ``Q(sqrt(a))`` from roots of the minimal polynomial of an
    integral generator mod ``p``: 2 roots split (+1), none inert (-1), a double root ramified (0)."""
    if a % 4 == 1:
        b, c = -1, -(a - 1) // 4  # x^2 - x - (a-1)/4, root (1 + sqrt a)/2
    else:
        b, c = 0, -a
    roots = [x for x in range(p) if (x * x + b * x + c) % p == 0]
    if len(roots) == 2:
        return 1
    if not roots:
        return -1
    return 0


def euler_legendre(a: int, p: int) -> int:
    """Legendre symbol for odd ``p`` by Euler's criterion."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


# -- groups as explicit permutation sets ------------------------------------------------

def perm_group(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    n = len(gens[0])
    e = tuple(range(n))
    seen, frontier = {e}, [e]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = tuple(g[h[i]] for i in range(n))
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return sorted(seen)


def perm_classes(elems: list[tuple[int, ...]]) -> list[frozenset]:
    n = len(elems[0])

    def comp(a, b):
        return tuple(a[b[i]] for i in range(n))

    def inv(a):
        out = [0] * n
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    left, classes = set(elems), []
    while left:
        x = min(left)
        c = frozenset(comp(comp(g, x), inv(g)) for g in elems)
        classes.append(c)
        left -= c
    return classes


def s_n_class_sizes(n: int) -> list[int]:
    return sorted(len(c) for c in perm_classes(list(permutations(range(n)))))


# -- containment of Čebotarev sets, read off in the ambient group ----------------------------

def ambient_preimage_of_class(G, H: frozenset[int], s: int) -> frozenset[int]:
    """Ambient elements ``g`` whose coset ``gH`` is conjugate in ``G/H`` to ``sH``."""
    n = G.order
    mul = lambda a, b: int(G.table[a, b])
    inv = {a: next(b for b in range(n) if mul(a, b) == 0) for a in range(n)}
    out = set()
    for g in range(n):
        for x in range(n):
            y = mul(mul(x, g), inv[x])
            if mul(inv[s], y) in H:
                out.add(g)
                break
    return frozenset(out)


def contained_up_to_density_zero(G, H1, s1, H2, s2) -> bool:
    """Frobenius classes in the Galois closure decide membership, so containment up to
    density zero is containment of the ambient preimages."""
    return ambient_preimage_of_class(G, H1, s1) <= ambient_preimage_of_class(G, H2, s2)


def splitting_by_roots_many(p: int, radicands) -> list[int]:
    """Vectorized :func:`splitting_by_roots` over many radicands at one prime."""
    import numpy as np

    a = np.asarray(radicands, dtype=np.int64)[:, None]
    b = np.where(a % 4 == 1, -1, 0)
    c = np.where(a % 4 == 1, -((a - 1) // 4), -a)
    x = np.arange(p, dtype=np.int64)[None, :]
    roots = ((x * x + b * x + c) % p == 0).sum(axis=1)
    return [1 if r == 2 else (-1 if r == 0 else 0) for r in roots]
