"""Finite groups given by Cayley tables.

Elements are dense indices ``0..order-1`` with ``0`` the identity.  Everything
here is exhaustive, so groups are capped at ``max_order`` elements.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

DEFAULT_MAX_ORDER = 10_000
MAX_PERMUTATION_POINTS = 12


class GroupError(ValueError):
    """Raised for malformed group input or violated preconditions."""


class FiniteGroup:
    """A finite group stored as a read-only multiplication table.

    ``table[a, b]`` is the index of the product ``a*b``.  ``names`` optionally
    maps human-readable labels (e.g. generator names) to element indices.
    """

    def __init__(self, table, names: dict[str, int] | None = None, *, check: bool = True,
                 max_order: int = DEFAULT_MAX_ORDER):
        table = np.array(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupError("table must be a non-empty square matrix")
        n = table.shape[0]
        if n > max_order:
            raise GroupError(f"group order {n} exceeds bound {max_order}")
        if check:
            _validate_table(table)
        table.flags.writeable = False
        self.table = table
        self.order = n
        inv = np.argmin(table, axis=1)  # position of the identity 0 in each row
        inv.flags.writeable = False
        self.inv = inv
        self.names = dict(names or {})
        self._classes: list[ConjClass] | None = None
        self._class_index: np.ndarray | None = None

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    # -- element arithmetic -------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def conj(self, x: int, g: int) -> int:
        """``g x g^-1``."""
        return int(self.table[self.table[g, x], self.inv[g]])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse(a), -k
        result = 0
        for _ in range(k):
            result = int(self.table[result, a])
        return result

    def element_order(self, a: int) -> int:
        k, x = 1, int(a)
        while x != 0:
            x = int(self.table[x, a])
            k += 1
        return k

    def element(self, ref: int | str) -> int:
        """Resolve an element given as an index or a registered name."""
        if isinstance(ref, str):
            if ref in self.names:
                return self.names[ref]
            try:
                ref = int(ref)
            except ValueError:
                raise GroupError(f"unknown element name {ref!r}") from None
        if not 0 <= ref < self.order:
            raise GroupError(f"element {ref} out of range for order {self.order}")
        return int(ref)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def exponent(self) -> int:
        from math import lcm
        return lcm(*(self.element_order(a) for a in range(self.order)))

    # -- subgroups ----------------------------------------------------------

    def whole(self) -> Subgroup:
        return Subgroup(self, tuple(range(self.order)))

    def trivial(self) -> Subgroup:
        return Subgroup(self, (0,))

    def subgroup(self, members: Iterable[int]) -> Subgroup:
        """Validate ``members`` as a subgroup and wrap it."""
        ms = sorted({self.element(int(m)) for m in members})
        if not ms or ms[0] != 0:
            raise GroupError("subgroup must contain the identity")
        mask = np.zeros(self.order, dtype=bool)
        mask[ms] = True
        idx = np.array(ms)
        if not mask[self.table[np.ix_(idx, idx)]].all():
            raise GroupError("members are not closed under multiplication")
        return Subgroup(self, tuple(ms))

    def generate(self, gens: Iterable[int]) -> Subgroup:
        """The subgroup generated by ``gens``."""
        gens = [self.element(g) for g in gens]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return Subgroup(self, tuple(sorted(seen)))

    def center(self) -> Subgroup:
        t = self.table
        return Subgroup(self, tuple(int(a) for a in np.flatnonzero((t == t.T).all(axis=1))))

    def normal_subgroups(self) -> list[Subgroup]:
        """All normal subgroups, as unions of conjugacy classes closed under products."""
        classes = conjugacy_classes(self)
        found = {(0,)}
        frontier = [(0,)]
        # every normal subgroup is generated by classes; grow by one class at a time
        while frontier:
            nxt = []
            for members in frontier:
                for c in classes:
                    if c.representative in members:
                        continue
                    h = self.generate(list(members) + [c.representative])
                    h = _normal_closure(self, h)
                    if h.members not in found:
                        found.add(h.members)
                        nxt.append(h.members)
            frontier = nxt
        return [Subgroup(self, m) for m in sorted(found, key=lambda m: (len(m), m))]

    def subgroups(self) -> list[Subgroup]:
        """All subgroups (exhaustive closure search; intended for small groups)."""
        found = {(0,)}
        frontier = [(0,)]
        while frontier:
            nxt = []
            for members in frontier:
                mset = set(members)
                for g in range(self.order):
                    if g in mset:
                        continue
                    h = self.generate(list(members) + [g])
                    if h.members not in found:
                        found.add(h.members)
                        nxt.append(h.members)
            frontier = nxt
        return [Subgroup(self, m) for m in sorted(found, key=lambda m: (len(m), m))]


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g) -> bool:
        return int(g) in self._set

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def _set(self) -> frozenset[int]:
        cached = self.__dict__.get("_members_set")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_members_set", cached)
        return cached

    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.members)] = True
        return m

    def issubset(self, other: Subgroup) -> bool:
        return self._set <= other._set

    def is_normal(self) -> bool:
        G = self.parent
        mask = self.mask()
        for h in self.members:
            if not mask[G.table[G.table[:, h], G.inv]].all():
                return False
        return True

    def is_cyclic(self) -> bool:
        return any(self.parent.element_order(g) == self.order for g in self.members)

    def __repr__(self):
        return f"Subgroup(order={self.order}, members={list(self.members)})"


@dataclass(frozen=True)
class ConjClass:
    parent: FiniteGroup
    members: tuple[int, ...]

    @property
    def representative(self) -> int:
        return self.members[0]

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, g) -> bool:
        return int(g) in self.members

    def __repr__(self):
        return f"ConjClass(rep={self.representative}, members={list(self.members)})"


def _normal_closure(G: FiniteGroup, H: Subgroup) -> Subgroup:
    gens = set(H.members)
    for h in H.members:
        gens.update(int(x) for x in G.table[G.table[:, h], G.inv])
    return G.generate(sorted(gens))


def _validate_table(table: np.ndarray) -> None:
    n = table.shape[0]
    ar = np.arange(n)
    if table.min() < 0 or table.max() >= n:
        raise GroupError("table entries out of range")
    if not (np.sort(table, axis=1) == ar).all() or not (np.sort(table, axis=0) == ar[:, None]).all():
        raise GroupError("not a Latin square")
    if not (table[0] == ar).all() or not (table[:, 0] == ar).all():
        raise GroupError("index 0 is not a two-sided identity")
    # Light's test: (xg)y = x(gy) for g in a generating set suffices
    gens: list[int] = []
    span = {0}
    for g in range(n):
        if g not in span:
            gens.append(g)
            span = set(_closure_from_table(table, gens))
    for g in gens:
        left = table[table[:, g][:, None], ar[None, :]]
        right = table[ar[:, None], table[g][None, :]]
        if not np.array_equal(left, right):
            raise GroupError("table is not associative")


def _closure_from_table(table: np.ndarray, gens: Sequence[int]) -> list[int]:
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(table[x, g])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


def close_under(identity: Hashable, gens: Sequence[Hashable], mul: Callable,
                max_order: int = DEFAULT_MAX_ORDER) -> tuple[list, np.ndarray]:
    """BFS closure of ``gens`` under right multiplication.

    Elements are numbered in discovery order (identity first, then generators
    applied in input order), which makes the numbering reproducible.  Returns
    the element list and the Cayley table.
    """
    elements = [identity]
    index = {identity: 0}
    parent: list[tuple[int, int]] = [(-1, -1)]
    right: list[list[int]] = [[] for _ in gens]
    head = 0
    while head < len(elements):
        x = elements[head]
        for k, g in enumerate(gens):
            y = mul(x, g)
            j = index.get(y)
            if j is None:
                j = len(elements)
                if j >= max_order:
                    raise GroupError(f"group order exceeds bound {max_order}")
                index[y] = j
                elements.append(y)
                parent.append((head, k))
            right[k].append(j)
        head += 1
    n = len(elements)
    rm = [np.array(r, dtype=np.int64) for r in right]
    table = np.empty((n, n), dtype=np.int64)
    table[:, 0] = np.arange(n)
    # e_j = e_parent * g_k, hence e_i * e_j = (e_i * e_parent) * g_k
    for j in range(1, n):
        p, k = parent[j]
        table[:, j] = rm[k][table[:, p]]
    return elements, table


# -- constructors ------------------------------------------------------------

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int | None = None) -> tuple[int, ...]:
    """Parse cycle notation with 1-based points, e.g. ``"(1 2 3)(4 5)"``."""
    text = text.strip()
    if not text or _CYCLE.sub("", text).strip():
        raise GroupError(f"malformed cycle string {text!r}")
    cycles = []
    for body in _CYCLE.findall(text):
        tokens = [t for t in re.split(r"[\s,]+", body.strip()) if t]
        if not all(t.isdigit() for t in tokens):
            raise GroupError(f"malformed cycle ({body})")
        pts = [int(t) for t in tokens]
        if len(set(pts)) != len(pts) or any(p < 1 for p in pts):
            raise GroupError(f"malformed cycle ({body})")
        cycles.append(pts)
    top = max([p for c in cycles for p in c], default=1)
    degree = max(degree or 0, top)
    if degree > MAX_PERMUTATION_POINTS:
        raise GroupError(f"permutations act on at most {MAX_PERMUTATION_POINTS} points")
    image = list(range(degree))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            image[a - 1] = b - 1
    return tuple(image)


def from_table(table, names: dict[str, int] | None = None,
               max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    return FiniteGroup(table, names, max_order=max_order)


def from_permutations(generators: Sequence[str], names: Sequence[str] | None = None,
                      max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Group generated by permutations in cycle notation.

    Composition is ``(a*b)(x) = a(b(x))``.
    """
    degree = 1
    for g in generators:
        degree = max(degree, len(parse_cycles(g)))
    perms = [parse_cycles(g, degree) for g in generators]
    ident = tuple(range(degree))
    elements, table = close_under(ident, perms, lambda a, b: tuple(a[i] for i in b), max_order)
    label = {}
    if names:
        index = {e: i for i, e in enumerate(elements)}
        label = {nm: index[p] for nm, p in zip(names, perms)}
    return FiniteGroup(table, label, check=False)


def build_group(spec: dict, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Build a group from a JSON-style record.

    Accepted keys: ``table`` (n x n matrix), ``permutation_generators`` (cycle
    strings, optional ``generator_names``) or ``builtin`` (e.g. ``"heisenberg:3"``).
    An optional ``names`` map labels elements.
    """
    if not isinstance(spec, dict):
        raise GroupError("group spec must be a JSON object")
    if "table" in spec:
        G = from_table(spec["table"], max_order=max_order)
    elif "permutation_generators" in spec:
        gens = spec["permutation_generators"]
        if not isinstance(gens, list) or not gens:
            raise GroupError("permutation_generators must be a non-empty list")
        G = from_permutations(gens, spec.get("generator_names"), max_order=max_order)
    elif "builtin" in spec:
        G = builtin(spec["builtin"], max_order=max_order)
    else:
        raise GroupError("group spec needs 'table', 'permutation_generators' or 'builtin'")
    if "names" in spec:
        G.names.update({str(k): G.element(int(v)) for k, v in spec["names"].items()})
    return G


def builtin(name: str, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    kind, _, arg = name.partition(":")
    args = [int(a) for a in arg.split(",") if a]
    makers = {
        "cyclic": lambda: cyclic(*args),
        "abelian": lambda: abelian(args),
        "elementary_abelian": lambda: abelian([2] * args[0]) if len(args) == 1 else abelian([args[0]] * args[1]),
        "symmetric": lambda: symmetric(*args),
        "dihedral": lambda: dihedral(*args),
        "quaternion": quaternion,
        "heisenberg": lambda: heisenberg(*args, max_order=max_order),
    }
    if kind not in makers:
        raise GroupError(f"unknown builtin group {name!r}")
    try:
        return makers[kind]()
    except TypeError:
        raise GroupError(f"bad arguments for builtin group {name!r}") from None


def cyclic(n: int) -> FiniteGroup:
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, {"g": 1 % n}, check=False)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """``G x H`` with element ``(g, h)`` at index ``g * |H| + h``."""
    m = H.order
    t = G.table[:, None, :, None] * m + H.table[None, :, None, :]
    return FiniteGroup(t.reshape(G.order * m, G.order * m), check=False)


def abelian(invariants: Sequence[int]) -> FiniteGroup:
    G = cyclic(1)
    for n in invariants:
        G = direct_product(G, cyclic(n))
    return G


def elementary_abelian_2(rank: int) -> FiniteGroup:
    """(Z/2)^rank with element index = bit vector and product = XOR."""
    ar = np.arange(1 << rank)
    return FiniteGroup(ar[:, None] ^ ar[None, :], check=False)


def symmetric(n: int) -> FiniteGroup:
    if n < 2:
        return cyclic(1)
    cyc = "(" + " ".join(str(i) for i in range(1, n + 1)) + ")"
    return from_permutations([cyc, "(1 2)"], ["c", "t"])


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order ``2n`` acting on an ``n``-gon."""
    rot = "(" + " ".join(str(i) for i in range(1, n + 1)) + ")"
    refl = "".join(f"({i} {n + 2 - i})" for i in range(2, n // 2 + 1 + (n % 2)) if i < n + 2 - i) or "(1)"
    return from_permutations([rot, refl], ["r", "s"])


def quaternion() -> FiniteGroup:
    def qmul(x, y):
        a1, b1, c1, d1 = x
        a2, b2, c2, d2 = y
        return (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)
    i, j = (0, 1, 0, 0), (0, 0, 1, 0)
    elements, table = close_under((1, 0, 0, 0), [i, j], qmul)
    return FiniteGroup(table, {"i": elements.index(i), "j": elements.index(j)}, check=False)


def heisenberg(p: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Non-abelian group of order p^3 and exponent p, for odd prime ``p``.

    Generated by sigma, tau, rho with rho = [sigma, tau] central.  Realized
    as unitriangular 3x3 matrices over F_p; elements ``(a, b, c)`` multiply as
    ``(a+a', b+b', c+c'+a*b')``.  The generators get indices 1, 2, 3 and are
    registered under the names ``sigma``, ``tau``, ``rho``.
    """
    from sympy import isprime

    if p < 3 or not isprime(p):
        raise GroupError("heisenberg needs an odd prime")
    if p ** 3 > max_order:
        raise GroupError(f"group order {p ** 3} exceeds bound {max_order}")

    def mul(x, y):
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    gens = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    elements, table = close_under((0, 0, 0), gens, mul, max_order)
    names = {nm: elements.index(g) for nm, g in zip(("sigma", "tau", "rho"), gens)}
    return FiniteGroup(table, names, check=False)


def abelian_groups_up_to(n_max: int) -> list[tuple[tuple[int, ...], FiniteGroup]]:
    """Every abelian group of order <= n_max, one per isomorphism type.

    Keyed by invariant factors ``d1 | d2 | ...``.
    """
    out = []
    for n in range(1, n_max + 1):
        for inv in _invariant_factor_lists(n):
            out.append((inv, abelian(inv)))
    return out


def _invariant_factor_lists(n: int, step: int = 1) -> list[tuple[int, ...]]:
    """Chains ``d1 | d2 | ... | dk`` with ``d1 > 1``, each a multiple of ``step``, product ``n``."""
    if n == 1:
        return [()]
    out = []
    for d in range(max(2, step), n + 1, step):
        if n % d == 0 and (n // d) % d == 0 or d == n:
            out.extend((d,) + rest for rest in _invariant_factor_lists(n // d, d)
                       if all(r % d == 0 for r in rest))
    return out


# -- operations named by the contract ---------------------------------------

def conjugacy_classes(G: FiniteGroup) -> list[ConjClass]:
    """Classes ordered by smallest member; each class lists members ascending."""
    if G._classes is None:
        seen = np.full(G.order, -1, dtype=np.int64)
        classes = []
        for x in range(G.order):
            if seen[x] >= 0:
                continue
            orbit = np.unique(G.table[G.table[:, x], G.inv])
            seen[orbit] = len(classes)
            classes.append(ConjClass(G, tuple(int(o) for o in orbit)))
        G._classes = classes
        G._class_index = seen
    return G._classes


def class_of(G: FiniteGroup, g: int) -> ConjClass:
    conjugacy_classes(G)
    return G._classes[int(G._class_index[g])]


def class_index(G: FiniteGroup) -> np.ndarray:
    """Array mapping each element to the position of its class."""
    conjugacy_classes(G)
    return G._class_index


def centralizer(G: FiniteGroup, g: int) -> Subgroup:
    t = G.table
    return Subgroup(G, tuple(int(x) for x in np.flatnonzero(t[:, g] == t[g, :])))


def quotient(G: FiniteGroup, H: Subgroup) -> tuple[FiniteGroup, np.ndarray]:
    """``G/H`` and the projection array ``element -> coset index``.

    Cosets are numbered by their smallest member, so the identity coset is 0.
    """
    if not H.is_normal():
        raise GroupError("subgroup is not normal")
    proj = np.full(G.order, -1, dtype=np.int64)
    reps = []
    hs = np.array(H.members)
    for g in range(G.order):
        if proj[g] < 0:
            proj[G.table[g, hs]] = len(reps)
            reps.append(g)
    r = np.array(reps)
    qt = proj[G.table[np.ix_(r, r)]]
    proj.flags.writeable = False
    return FiniteGroup(qt, check=False), proj


def class_meets_coset(G: FiniteGroup, c: ConjClass | Iterable[int], g: int, H: Subgroup) -> bool:
    """True iff some member of ``c`` lies in the left coset ``gH``."""
    members = c.members if isinstance(c, ConjClass) else tuple(c)
    coset = G.table[g, list(H.members)]
    return bool(np.isin(coset, members).any())


def product_subgroup(H1: Subgroup, H2: Subgroup) -> Subgroup:
    G = H1.parent
    prods = np.unique(G.table[np.ix_(list(H1.members), list(H2.members))])
    mask = np.zeros(G.order, dtype=bool)
    mask[prods] = True
    if not mask[G.table[np.ix_(prods, prods)]].all():
        raise GroupError("product H1*H2 is not a subgroup")
    return Subgroup(G, tuple(int(x) for x in prods))


def intersection(H1: Subgroup, H2: Subgroup) -> Subgroup:
    return Subgroup(H1.parent, tuple(sorted(H1._set & H2._set)))


def subgroup_lattice_ops(G: FiniteGroup, H1: Subgroup, H2: Subgroup):
    """``(H1*H2, H1 & H2, (H1 normal, H2 normal))``."""
    return product_subgroup(H1, H2), intersection(H1, H2), (H1.is_normal(), H2.is_normal())


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def sylow_subgroup(G: FiniteGroup, ell: int) -> Subgroup:
    """A Sylow ``ell``-subgroup.

    Grows an ``ell``-subgroup one element at a time until no element of
    ``ell``-power order extends it; a maximal such subgroup is Sylow because
    a proper ``ell``-subgroup is properly contained in its normalizer inside
    a Sylow subgroup.
    """
    target = 1
    while G.order % (target * ell) == 0:
        target *= ell
    candidates = [g for g in range(1, G.order) if _is_power_of(G.element_order(g), ell)]
    P = G.trivial()
    changed = True
    while changed and P.order < target:
        changed = False
        for g in candidates:
            if g in P:
                continue
            Q = G.generate(list(P.members) + [g])
            if _is_power_of(Q.order, ell):
                P = Q
                changed = True
                if P.order == target:
                    break
    assert P.order == target, "Sylow search failed"
    return P


def sylow_and_cyclicity(G: FiniteGroup, ell: int) -> tuple[Subgroup, bool]:
    P = sylow_subgroup(G, ell)
    return P, P.is_cyclic()


def all_elements(G: FiniteGroup) -> range:
    return range(G.order)


def brute_force_classes(G: FiniteGroup) -> list[frozenset[int]]:
    """Conjugacy classes by the double loop; used as a test oracle."""
    out = []
    seen = set()
    for x, g in product(range(G.order), repeat=2):
        if x in seen:
            continue
        cls = frozenset(G.mul(G.mul(h, x), G.inverse(h)) for h in range(G.order))
        seen |= cls
        out.append(cls)
    return out
