"""Symbolic Čebotarev sets over an abstract Galois context.

A context fixes an ambient group ``G = G(N|K)``.  A *level* is a named normal
subgroup ``H``, standing for the fixed field ``L = N^H``; a Čebotarev set at
that level is a set of conjugacy classes of ``G/H``.  Two sets that differ
only in density-zero primes are identified, so containment, intersection and
disjointness become finite class computations.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .finite_group import (
    ConjClass,
    FiniteGroup,
    GroupError,
    Subgroup,
    centralizer,
    class_index,
    conjugacy_classes,
    intersection,
    product_subgroup,
    quotient,
    sylow_subgroup,
)

TOP = "K"
BOTTOM = "N"


class ContextError(ValueError):
    """Bad level, foreign context, or a violated operation precondition."""


class GaloisContext:
    """Ambient group plus a registry of named normal subgroups.

    Registration is guarded by a lock; every query reads an immutable level
    record, so concurrent queries are safe.
    """

    def __init__(self, ambient: FiniteGroup):
        self.ambient = ambient
        self._lock = threading.Lock()
        self._levels: dict[str, Subgroup] = {}
        self._by_members: dict[tuple[int, ...], str] = {}
        self._quotients: dict[str, tuple[FiniteGroup, np.ndarray]] = {}
        self.register(TOP, ambient.whole())
        self.register(BOTTOM, ambient.trivial())

    def __repr__(self):
        return f"GaloisContext(order={self.ambient.order}, levels={sorted(self._levels)})"

    @property
    def levels(self) -> dict[str, Subgroup]:
        return dict(self._levels)

    def register(self, label: str, H: Subgroup | Iterable[int]) -> str:
        """Register ``H`` under ``label``; returns the label."""
        if not isinstance(H, Subgroup):
            try:
                H = self.ambient.subgroup(H)
            except GroupError as e:
                raise ContextError(f"level {label!r}: {e}") from None
        if H.parent is not self.ambient and H.parent != self.ambient:
            raise ContextError("subgroup belongs to a different group")
        if not H.is_normal():
            raise ContextError(f"level {label!r}: subgroup is not normal")
        with self._lock:
            old = self._levels.get(label)
            if old is not None and old.members != H.members:
                raise ContextError(f"label {label!r} already names a different subgroup")
            self._levels[label] = H
            self._by_members.setdefault(H.members, label)
        return label

    def subgroup(self, label: str) -> Subgroup:
        try:
            return self._levels[label]
        except KeyError:
            raise ContextError(f"unknown level {label!r}") from None

    def label_for(self, H: Subgroup, hint: str) -> str:
        """Existing label for ``H`` or register it as ``hint``."""
        existing = self._by_members.get(H.members)
        if existing is not None:
            return existing
        return self.register(hint, H)

    def quotient(self, label: str) -> tuple[FiniteGroup, np.ndarray]:
        """``G/H`` for the level and the projection array."""
        q = self._quotients.get(label)
        if q is None:
            q = quotient(self.ambient, self.subgroup(label))
            with self._lock:
                self._quotients.setdefault(label, q)
                q = self._quotients[label]
        return q

    def compositum(self, a: str, b: str) -> str:
        """Level of the compositum ``L_a L_b`` (subgroup ``H_a ∩ H_b``)."""
        H = intersection(self.subgroup(a), self.subgroup(b))
        return self.label_for(H, f"({a}*{b})")

    def meet(self, a: str, b: str) -> str:
        """Level of the intersection field ``L_a ∩ L_b`` (subgroup ``H_a H_b``)."""
        H = product_subgroup(self.subgroup(a), self.subgroup(b))
        return self.label_for(H, f"({a}&{b})")


def context_from_spec(spec: dict) -> GaloisContext:
    """Context from ``{"group": <group spec>, "fields": {label: [members]}}``."""
    from .finite_group import build_group

    if not isinstance(spec, dict) or "group" not in spec:
        raise ContextError("context spec needs a 'group' entry")
    ctx = GaloisContext(build_group(spec["group"]))
    for label, members in sorted(spec.get("fields", {}).items()):
        ctx.register(str(label), [int(m) for m in members])
    return ctx


@dataclass(frozen=True)
class CebClassSet:
    """A union of Čebotarev sets at one level, stored as quotient class indices.

    ``classes`` holds positions into ``conjugacy_classes(G/H)``.
    """
    context: GaloisContext
    level: str
    classes: frozenset[int]

    @property
    def quotient_group(self) -> FiniteGroup:
        return self.context.quotient(self.level)[0]

    def class_objects(self) -> list[ConjClass]:
        cl = conjugacy_classes(self.quotient_group)
        return [cl[i] for i in sorted(self.classes)]

    def members(self) -> frozenset[int]:
        """Quotient elements covered by the classes."""
        return frozenset(m for c in self.class_objects() for m in c.members)

    def ambient_members(self) -> frozenset[int]:
        """Ambient elements whose image lies in one of the classes."""
        _, proj = self.context.quotient(self.level)
        mem = np.array(sorted(self.members()), dtype=np.int64)
        return frozenset(int(g) for g in np.flatnonzero(np.isin(proj, mem)))

    def is_empty(self) -> bool:
        return not self.classes

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "classes": [list(c.members) for c in self.class_objects()],
            "density": str(density(self)),
        }

    def __repr__(self):
        return f"CebClassSet(level={self.level!r}, classes={[list(c.members) for c in self.class_objects()]})"


def _check_same(a: CebClassSet, b: CebClassSet) -> None:
    if a.context is not b.context:
        raise ContextError("sets belong to different contexts")


def from_ambient_classes(ctx: GaloisContext, level: str, elements: Iterable[int]) -> CebClassSet:
    """Class set at ``level`` containing the classes of the given quotient elements."""
    Q, _ = ctx.quotient(level)
    idx = class_index(Q)
    return CebClassSet(ctx, level, frozenset(int(idx[e]) for e in elements))


def make_cset(ctx: GaloisContext, level: str, sigma: int) -> CebClassSet:
    """``P_{L|K}(sigma)`` with ``sigma`` an element of ``G/H`` (quotient index)."""
    Q, _ = ctx.quotient(level)
    if not 0 <= int(sigma) < Q.order:
        raise ContextError(f"element {sigma} out of range for G/H of order {Q.order}")
    return CebClassSet(ctx, level, frozenset({int(class_index(Q)[sigma])}))


def make_cset_from_ambient(ctx: GaloisContext, level: str, g: int) -> CebClassSet:
    """``P_{L|K}(g mod H)`` for an ambient element ``g``."""
    _, proj = ctx.quotient(level)
    return make_cset(ctx, level, int(proj[ctx.ambient.element(g)]))


def full_set(ctx: GaloisContext, level: str) -> CebClassSet:
    Q, _ = ctx.quotient(level)
    return CebClassSet(ctx, level, frozenset(range(len(conjugacy_classes(Q)))))


def decomposed_set(ctx: GaloisContext, level: str) -> CebClassSet:
    """``D(L|K)``: the class of the identity."""
    return make_cset(ctx, level, 0)


def lift_to_level(s: CebClassSet, finer: str) -> CebClassSet:
    """Rewrite ``s`` at a finer level (smaller subgroup).

    A class ``tau`` of ``G/H'`` is kept iff it meets the preimage of some class
    of ``s``; equivalently, iff its image in ``G/H`` lies in ``s``.
    """
    ctx = s.context
    H, Hf = ctx.subgroup(s.level), ctx.subgroup(finer)
    if not Hf.issubset(H):
        raise ContextError(f"level {finer!r} does not refine {s.level!r}")
    if finer == s.level or Hf.members == H.members:
        return CebClassSet(ctx, finer, s.classes)
    _, proj = ctx.quotient(s.level)
    Qf, projf = ctx.quotient(finer)
    covered = np.zeros(ctx.quotient(s.level)[0].order, dtype=bool)
    covered[list(s.members())] = True
    keep = covered[proj]  # ambient elements lying over s
    fine_idx = class_index(Qf)
    return CebClassSet(ctx, finer, frozenset(int(c) for c in np.unique(fine_idx[projf[keep]])))


def intersect(a: CebClassSet, b: CebClassSet) -> CebClassSet:
    """Intersection, expressed at the compositum level."""
    _check_same(a, b)
    level = a.context.compositum(a.level, b.level)
    la, lb = lift_to_level(a, level), lift_to_level(b, level)
    return CebClassSet(a.context, level, la.classes & lb.classes)


def union(a: CebClassSet, b: CebClassSet) -> CebClassSet:
    _check_same(a, b)
    level = a.context.compositum(a.level, b.level)
    return CebClassSet(a.context, level, lift_to_level(a, level).classes | lift_to_level(b, level).classes)


def density(s: CebClassSet) -> Fraction:
    """``sum |class| / |G/H|``."""
    Q = s.quotient_group
    return Fraction(sum(c.size for c in s.class_objects()), Q.order)


def _single(s: CebClassSet) -> ConjClass:
    if len(s.classes) != 1:
        raise ContextError("operation needs a single-class Čebotarev set")
    return s.class_objects()[0]


def is_disjoint(a: CebClassSet, b: CebClassSet) -> bool:
    """Disjointness of two single-class sets by the conjugation criterion.

    With ``M = H1 H2`` the sets meet iff some ``rho`` gives
    ``sigma1^{-1} rho sigma2 rho^{-1} ∈ M`` for lifts ``sigma_i``.
    """
    _check_same(a, b)
    ctx = a.context
    G = ctx.ambient
    c1, c2 = _single(a), _single(b)
    s1 = _lift_element(ctx, a.level, c1.representative)
    s2 = _lift_element(ctx, b.level, c2.representative)
    M = product_subgroup(ctx.subgroup(a.level), ctx.subgroup(b.level)).mask()
    conj = G.table[G.table[:, s2], G.inv]  # rho s2 rho^-1 for every rho
    return not bool(M[G.table[G.inv[s1], conj]].any())


def _lift_element(ctx: GaloisContext, level: str, q: int) -> int:
    _, proj = ctx.quotient(level)
    return int(np.flatnonzero(proj == q)[0])


def almost_subset(a: CebClassSet, b: CebClassSet) -> bool:
    """``a ≲ b`` (containment up to density zero) for single-class sets.

    Evaluated by the group criterion: with ``M = H1 H2`` the images of the two
    classes in ``G/M`` coincide, and the centralizer of ``sigma2`` in ``G/H2``
    has the same order as the centralizer of its image in ``G/M``.  The second
    condition says the class of ``sigma2`` is the full preimage of the class
    of its image, which is what makes the containment hold.
    """
    _check_same(a, b)
    ctx = a.context
    c1, c2 = _single(a), _single(b)
    M = product_subgroup(ctx.subgroup(a.level), ctx.subgroup(b.level))
    m_label = ctx.label_for(M, f"({a.level}&{b.level})")
    Qm, projm = ctx.quotient(m_label)
    s1 = _lift_element(ctx, a.level, c1.representative)
    s2 = _lift_element(ctx, b.level, c2.representative)
    r1, r2 = int(projm[s1]), int(projm[s2])
    idx_m = class_index(Qm)
    if idx_m[r1] != idx_m[r2]:
        return False
    Q2, _ = ctx.quotient(b.level)
    return centralizer(Q2, c2.representative).order == centralizer(Qm, r2).order


def almost_equal(a: CebClassSet, b: CebClassSet) -> bool:
    return almost_subset(a, b) and almost_subset(b, a)


def almost_subset_oracle(a: CebClassSet, b: CebClassSet) -> bool:
    """Brute-force ``a ≲ b``: lift both to the compositum and compare classes."""
    level = a.context.compositum(a.level, b.level)
    return lift_to_level(a, level).classes <= lift_to_level(b, level).classes


def _is_central(Q: FiniteGroup, q: int) -> bool:
    return bool((Q.table[q, :] == Q.table[:, q]).all())


def bauer_subset(a: CebClassSet, b: CebClassSet) -> bool:
    """``a ≲ b`` when ``b``'s class is central in ``G/H2``.

    Holds iff ``H1 ⊆ H2`` and ``sigma1`` maps to ``sigma2`` under ``G/H1 -> G/H2``.
    """
    _check_same(a, b)
    ctx = a.context
    c1, c2 = _single(a), _single(b)
    Q2, proj2 = ctx.quotient(b.level)
    if c2.size != 1 or not _is_central(Q2, c2.representative):
        raise ContextError("second set's class is not central")
    if not ctx.subgroup(a.level).issubset(ctx.subgroup(b.level)):
        return False
    s1 = _lift_element(ctx, a.level, c1.representative)
    return int(proj2[s1]) == c2.representative


def complement_unramified(a: CebClassSet) -> CebClassSet:
    """Classes at the same level not in ``a``."""
    n = len(conjugacy_classes(a.quotient_group))
    return CebClassSet(a.context, a.level, frozenset(range(n)) - a.classes)


def isolated_sufficient(G_p: FiniteGroup, T_p: Subgroup, ell: int) -> bool:
    """Sufficient condition for a ramified point to be isolated.

    A Sylow ``ell``-subgroup ``P`` of the decomposition group is non-cyclic
    and ``P`` is not contained in the inertia group (its image in
    ``G_p/T_p`` is non-trivial).
    """
    if not T_p.is_normal():
        raise ContextError("inertia subgroup must be normal in the decomposition group")
    P = sylow_subgroup(G_p, ell)
    return not P.is_cyclic() and not P.issubset(T_p)
