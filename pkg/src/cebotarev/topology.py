"""Clopen sets of rational primes: membership, complements, closure certificates,
partition refinement and separation of two primes by quadratic conditions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .rationals import MultiQuadContext, frobenius_array, kronecker, primes, signed_prime
from .signature import (
    Atom,
    FinPresSet,
    PresentationError,
    Region,
    SignatureSpace,
    clause_holds,
)

__all__ = [
    "Atom", "FinPresSet", "ClopenCertificate", "member", "complement", "closure_over_approx",
    "certify_clopen", "refine_partition", "separate_primes", "Basic", "Inter", "Union", "Diff",
    "SearchExhausted",
]


class SearchExhausted(RuntimeError):
    """A bounded search found nothing."""


def member(p: int, s: FinPresSet) -> bool:
    return s.member(p)


def _space_for(sets: Sequence[FinPresSet], universe) -> SignatureSpace:
    if isinstance(universe, SignatureSpace):
        for s in sets:
            if not universe.covers(s):
                raise PresentationError(f"set {s} uses fields or primes outside the universe")
        return universe
    rads: list[int] = []
    if isinstance(universe, MultiQuadContext):
        rads = list(universe.radicands)
        for s in sets:
            for a in s.atoms():
                if a.kind == "quad" and universe.express(a.modulus) is None:
                    raise PresentationError(f"atom {a} is not registered in the universe")
    return SignatureSpace.for_sets(sets, extra_radicands=rads)


def complement(s: FinPresSet, universe: SignatureSpace | MultiQuadContext | None = None) -> FinPresSet:
    """Exact complement, presented over the universe's basis fields."""
    space = _space_for([s], universe)
    return (~space.region(s)).presentation()


# -- certificates ------------------------------------------------------------------

@dataclass(frozen=True)
class ClopenCertificate:
    """Outcome of the closure over-approximation check.

    ``over_approx`` replaces each atom ``P`` by ``P ∪ R`` (``R`` its ramified
    primes).  Removed primes are not subtracted: a set minus a point can have
    that point in its closure, so subtracting would make the bound unsound.
    ``closed`` is certified iff the over-approximation adds nothing.
    ``open`` is certified when there are no added primes (basic sets are open
    and points are closed) or when the complement's presentation is certified
    closed.
    """
    set: FinPresSet
    over_approx: FinPresSet
    closed: bool
    witness: int | None
    open: bool | None = None
    open_witness: int | None = None

    @property
    def certified(self) -> bool:
        return self.closed

    @property
    def clopen(self) -> bool:
        return bool(self.closed and self.open)

    def as_json(self) -> dict:
        return {
            "set": self.set.as_json(),
            "over_approx": self.over_approx.as_json(),
            "closed": self.closed,
            "closure_witness": self.witness,
            "open": self.open,
            "open_witness": self.open_witness,
            "verdict": "certified" if self.closed else "not-certified",
        }


def _relaxed_holds(clause, p: int) -> bool:
    return all(p in a.ramified or a.holds(p) for a in clause)


def closure_over_approx(s: FinPresSet) -> ClopenCertificate:
    """Closure certificate; only ramified primes of the atoms can be witnesses."""
    extra = {p for c in s.clauses for p in set().union(*(a.ramified for a in c))
             if _relaxed_holds(c, p) and not clause_holds(c, p)}
    over = FinPresSet.build(s.clauses, s.added | extra, ())
    bad = sorted((extra - s.added) | s.removed)
    bad = [p for p in bad if not s.member(p)]
    return ClopenCertificate(s, over, not bad, bad[0] if bad else None)


def certify_clopen(s: FinPresSet, universe=None) -> ClopenCertificate:
    cert = closure_over_approx(s)
    if not s.added:
        return ClopenCertificate(s, cert.over_approx, cert.closed, cert.witness, True, None)
    comp = closure_over_approx(complement(s, universe))
    return ClopenCertificate(s, cert.over_approx, cert.closed, cert.witness, comp.closed, comp.witness)


# -- set expressions ---------------------------------------------------------------

class SetExpr:
    """Boolean combination of named presented sets, kept for display and for
    compositional certificates (Boolean combinations of clopen sets are clopen)."""

    def render(self, inline: bool = False, top: bool = True) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.render()

    def leaves(self) -> list[Basic]:
        raise NotImplementedError

    def region(self, space: SignatureSpace) -> Region:
        raise NotImplementedError

    def member(self, p: int) -> bool:
        raise NotImplementedError

    def member_array(self, ps: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def clopen(self) -> bool:
        raise NotImplementedError

    def to_finpres(self, space: SignatureSpace | None = None) -> FinPresSet:
        space = space or SignatureSpace.for_sets([b.set for b in self.leaves()])
        return self.region(space).presentation()


@dataclass(frozen=True)
class Basic(SetExpr):
    set: FinPresSet
    name: str | None = None
    certified_clopen: bool = False

    def render(self, inline=False, top=True):
        if self.name and not inline:
            return self.name
        s = self.set
        if len(s.clauses) == 1 and not s.added and not s.removed:
            c = s.clauses[0]
            if not c:
                return "P"
            body = " ∩ ".join(str(a) for a in c)
            return f"({body})" if len(c) > 1 else body
        return f"({s})"

    def leaves(self):
        return [self]

    def region(self, space):
        return space.region(self.set)

    def member(self, p):
        return self.set.member(p)

    def member_array(self, ps):
        return self.set.member_array(ps)

    @property
    def clopen(self):
        return self.certified_clopen


@dataclass(frozen=True)
class Inter(SetExpr):
    parts: tuple[SetExpr, ...]

    def render(self, inline=False, top=True):
        if len(self.parts) == 1:
            return self.parts[0].render(inline, top)
        return "(" + " ∩ ".join(p.render(inline, False) for p in self.parts) + ")"

    def leaves(self):
        return [b for p in self.parts for b in p.leaves()]

    def region(self, space):
        r = space.full()
        for p in self.parts:
            r = r & p.region(space)
        return r

    def member(self, p):
        return all(q.member(p) for q in self.parts)

    def member_array(self, ps):
        out = np.ones(np.shape(ps), dtype=bool)
        for q in self.parts:
            out &= q.member_array(ps)
        return out

    @property
    def clopen(self):
        return all(p.clopen for p in self.parts)


@dataclass(frozen=True)
class Union(SetExpr):
    parts: tuple[SetExpr, ...]

    def render(self, inline=False, top=True):
        if len(self.parts) == 1:
            return self.parts[0].render(inline, top)
        return "(" + " ∪ ".join(p.render(inline, False) for p in self.parts) + ")"

    def leaves(self):
        return [b for p in self.parts for b in p.leaves()]

    def region(self, space):
        r = space.empty()
        for p in self.parts:
            r = r | p.region(space)
        return r

    def member(self, p):
        return any(q.member(p) for q in self.parts)

    def member_array(self, ps):
        out = np.zeros(np.shape(ps), dtype=bool)
        for q in self.parts:
            out |= q.member_array(ps)
        return out

    @property
    def clopen(self):
        return all(p.clopen for p in self.parts)


@dataclass(frozen=True)
class Diff(SetExpr):
    left: SetExpr
    right: SetExpr

    def render(self, inline=False, top=True):
        body = f"{self.left.render(inline, False)} \\ {self.right.render(inline, False)}"
        return body if top else f"({body})"

    def leaves(self):
        return self.left.leaves() + self.right.leaves()

    def region(self, space):
        return self.left.region(space) - self.right.region(space)

    def member(self, p):
        return self.left.member(p) and not self.right.member(p)

    def member_array(self, ps):
        return self.left.member_array(ps) & ~self.right.member_array(ps)

    @property
    def clopen(self):
        return self.left.clopen and self.right.clopen


def certified_basic(s: FinPresSet, name: str | None = None, universe=None) -> Basic:
    return Basic(s, name, certify_clopen(s, universe).clopen)


# -- partition refinement --------------------------------------------------------------

@dataclass(frozen=True)
class RefinedCell:
    index: int
    set: FinPresSet
    certificate: ClopenCertificate

    def as_json(self) -> dict:
        return {"index": self.index, "set": self.set.as_json(), "closed": self.certificate.closed,
                "open": self.certificate.open, "closure_witness": self.certificate.witness,
                "open_witness": self.certificate.open_witness}


class RefinementError(ValueError):
    def __init__(self, message: str, witness: int | None = None):
        super().__init__(message)
        self.witness = witness


def refine_partition(cover: Sequence[FinPresSet], universe=None, *,
                     require_clopen: bool = False) -> list[RefinedCell]:
    """Greedy disjoint refinement ``V_i = U_i \\ (U_1 ∪ ... ∪ U_{i-1})``.

    The covering property, disjointness and ``V_i ⊆ U_i`` are exact.  Each
    cell carries its clopen certificate; with ``require_clopen`` an
    uncertified input raises :class:`RefinementError`.
    """
    if not cover:
        raise RefinementError("empty cover")
    space = _space_for(list(cover), universe)
    regions = [space.region(u) for u in cover]
    total = space.empty()
    for r in regions:
        total = total | r
    missing = ~total
    if not missing.is_empty():
        raise RefinementError("sets do not cover all primes", missing.some_member())
    if require_clopen:
        for u in cover:
            cert = certify_clopen(u, space)
            if not cert.clopen:
                raise RefinementError(f"cover element {u} is not certified clopen",
                                      cert.witness if not cert.closed else cert.open_witness)
    cells = []
    seen = space.empty()
    for i, r in enumerate(regions):
        cell = r - seen
        seen = seen | r
        fs = cover[i] if cell == r else cell.presentation()
        cells.append(RefinedCell(i, fs, certify_clopen(fs, space)))
    return cells


# -- separation of two primes ----------------------------------------------------------

@dataclass(frozen=True)
class Separation:
    p1: int
    p2: int
    V1: FinPresSet
    V2: FinPresSet
    W1: FinPresSet
    W2: FinPresSet
    q_witnesses: dict
    certificates: dict

    def as_json(self) -> dict:
        return {
            "p1": self.p1, "p2": self.p2,
            "V1": self.V1.as_json(), "V2": self.V2.as_json(),
            "W1": self.W1.as_json(), "W2": self.W2.as_json(),
            "q": self.q_witnesses, "certificates": self.certificates,
        }


def _find_q(conditions: Sequence[tuple[int, int]], exclude: Iterable[int], bound: int) -> int:
    """Smallest odd prime ``q`` outside ``exclude`` with ``(a/q) = s`` for every condition."""
    ps = primes(bound)
    ps = ps[(ps > 2) & ~np.isin(ps, list(exclude))]
    ok = np.ones(ps.size, dtype=bool)
    for a, s in conditions:
        # for odd q, (a/q) is the quadratic character of Q(sqrt(a)) at q
        ok &= frobenius_array(ps, a) == s
    hits = ps[ok]
    if not hits.size:
        raise SearchExhausted(f"no auxiliary prime below {bound} satisfies {list(conditions)}")
    return int(hits[0])


def _neighbourhood_odd(p: int, other: int, bound: int) -> tuple[FinPresSet, int, int]:
    """Clopen neighbourhood of ``other`` avoiding the odd prime ``p``.

    ``sigma = (other/p)``; ``q`` satisfies ``(p/q) = -sigma``, ``(other/q) = sigma``,
    ``(-1/q) = 1``; the set is ``P_{L_p}(sigma) ∩ P_{L_q}(sigma)``.
    """
    sigma = kronecker(other, p)
    q = _find_q([(p, -sigma), (other, sigma), (-1, 1)], {p, other}, bound)
    V = FinPresSet.clause(Atom.quad(signed_prime(p), sigma), Atom.quad(signed_prime(q), sigma))
    return V, q, sigma


def _neighbourhood_avoiding_two(p: int, bound: int) -> tuple[FinPresSet, int, int]:
    """Clopen neighbourhood of the odd prime ``p`` avoiding 2.

    ``sigma = (2/p)``; ``q`` satisfies ``(p/q) = sigma``, ``(2/q) = -sigma``;
    the set is ``P_{Q(sqrt 2)}(sigma) ∩ P_{L_q}(sigma)``.
    """
    sigma = kronecker(2, p)
    q = _find_q([(p, sigma), (2, -sigma)], {p, 2}, bound)
    V = FinPresSet.clause(Atom.quad(2, sigma), Atom.quad(signed_prime(q), sigma))
    return V, q, sigma


def separate_primes(p1: int, p2: int, bound: int = 10 ** 6) -> Separation:
    """Disjoint clopen neighbourhoods ``W1 ∋ p1``, ``W2 ∋ p2`` from quadratic atoms."""
    from sympy import isprime

    p1, p2 = int(p1), int(p2)
    if p1 == p2 or not (isprime(p1) and isprime(p2)):
        raise ValueError("separate_primes needs two different primes")
    if p1 == 2:
        sep = separate_primes(p2, p1, bound)
        return Separation(p1, p2, sep.V2, sep.V1, sep.W2, sep.W1,
                          {"V1": sep.q_witnesses["V2"], "V2": sep.q_witnesses["V1"]},
                          {"W1": sep.certificates["W2"], "W2": sep.certificates["W1"],
                           "V1": sep.certificates["V2"], "V2": sep.certificates["V1"],
                           "disjoint": sep.certificates["disjoint"]})
    V2, q2, s2 = _neighbourhood_odd(p1, p2, bound)
    if p2 == 2:
        V1, q1, s1 = _neighbourhood_avoiding_two(p1, bound)
    else:
        V1, q1, s1 = _neighbourhood_odd(p2, p1, bound)
    c1, c2 = closure_over_approx(V1), closure_over_approx(V2)
    b1, b2 = Basic(V1, "V1", c1.closed), Basic(V2, "V2", c2.closed)
    space = SignatureSpace.for_sets([V1, V2])
    W1 = Diff(b1, b2).to_finpres(space)
    W2 = Diff(b2, b1).to_finpres(space)
    certs = {
        "V1": {"closed": c1.closed, "witness": c1.witness},
        "V2": {"closed": c2.closed, "witness": c2.witness},
        "W1": {"clopen": Diff(b1, b2).clopen},
        "W2": {"clopen": Diff(b2, b1).clopen},
        "disjoint": (space.region(W1) & space.region(W2)).is_empty(),
    }
    return Separation(p1, p2, V1, V2, W1, W2,
                      {"V1": {"q": q1, "sigma": s1}, "V2": {"q": q2, "sigma": s2}}, certs)
