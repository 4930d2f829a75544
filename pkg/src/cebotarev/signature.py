"""Exact Boolean algebra of prime sets cut out by quadratic and cyclotomic conditions.

Fix quadratic fields ``Q(sqrt(b_1)), ..., Q(sqrt(b_s))`` with independent
square classes and a cyclotomic conductor ``N``.  A prime unramified in all
of them has a *point* ``(p mod N, v)`` where bit ``i`` of ``v`` records that
``p`` is inert in ``Q(sqrt(b_i))``.  The points that occur are exactly the
elements of the Galois group of the compositum, and each occurs for
infinitely many primes.  The finitely many remaining (*special*) primes are
tracked one by one.  A set is therefore exactly a pair (point mask, special
members), and emptiness, equality and containment are decidable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint

from .rationals import (
    FieldError,
    MultiQuadContext,
    fundamental_discriminant,
    is_squarefree,
    kronecker,
    primes,
    quadratic_character,
    support,
)


class PresentationError(ValueError):
    """Malformed atom or set presentation."""


# -- atoms and presentations ---------------------------------------------------

@dataclass(frozen=True, order=True)
class Atom:
    """``(a|±1)`` for ``kind='quad'`` or ``p ≡ r (mod n)`` for ``kind='cyclo'``."""
    kind: str
    modulus: int
    value: int

    def __post_init__(self):
        if self.kind == "quad":
            if self.modulus in (0, 1) or not is_squarefree(self.modulus):
                raise PresentationError(f"radicand {self.modulus} must be squarefree and not 0 or 1")
            if self.value not in (1, -1):
                raise PresentationError("quadratic atoms take the value +1 or -1")
        elif self.kind == "cyclo":
            if self.modulus < 3:
                raise PresentationError(f"cyclotomic conductor must be >= 3, got {self.modulus}")
            object.__setattr__(self, "value", self.value % self.modulus)
            if gcd(self.value, self.modulus) != 1:
                raise PresentationError(f"residue {self.value} is not a unit modulo {self.modulus}")
        else:
            raise PresentationError(f"unknown atom kind {self.kind!r}")

    @classmethod
    def quad(cls, a: int, value: int) -> Atom:
        return cls("quad", int(a), int(value))

    @classmethod
    def cyclo(cls, n: int, residue: int) -> Atom:
        return cls("cyclo", int(n), int(residue))

    @cached_property
    def discriminant(self) -> int:
        """Field discriminant (``n`` itself stands in for cyclotomic atoms)."""
        return fundamental_discriminant(self.modulus) if self.kind == "quad" else self.modulus

    @cached_property
    def ramified(self) -> frozenset[int]:
        return frozenset(factorint(abs(self.discriminant)))

    def holds(self, p: int) -> bool:
        if p in self.ramified:
            return False
        if self.kind == "quad":
            return kronecker(self.discriminant, p) == self.value
        return p % self.modulus == self.value

    def holds_array(self, ps: np.ndarray) -> np.ndarray:
        ps = np.asarray(ps)
        if self.kind == "quad":
            D = self.discriminant
            return quadratic_table(D)[ps % abs(D)] == self.value
        return (ps % self.modulus == self.value) & (self.modulus % ps != 0)

    def negated_values(self) -> list[Atom]:
        """Atoms for the other Frobenius values of the same field."""
        if self.kind == "quad":
            return [Atom.quad(self.modulus, -self.value)]
        n = self.modulus
        return [Atom.cyclo(n, r) for r in range(1, n) if gcd(r, n) == 1 and r != self.value]

    def __str__(self):
        if self.kind == "quad":
            return f"({self.modulus}|{self.value})"
        return f"[{self.value} mod {self.modulus}]"

    def as_json(self) -> dict:
        if self.kind == "quad":
            return {"quad": self.modulus, "sign": self.value}
        return {"cyclo": self.modulus, "residue": self.value}

    @classmethod
    def from_json(cls, d: dict) -> Atom:
        if "quad" in d:
            return cls.quad(int(d["quad"]), int(d.get("sign", d.get("value", 0))))
        if "cyclo" in d:
            return cls.cyclo(int(d["cyclo"]), int(d.get("residue", d.get("value", 0))))
        raise PresentationError(f"atom needs 'quad' or 'cyclo': {d!r}")


def quadratic_table(D: int) -> np.ndarray:
    from .rationals import _character_table
    return _character_table(D)


Clause = tuple  # tuple[Atom, ...]


def _normalize_clause(atoms: Iterable[Atom]) -> Clause | None:
    """Sorted, deduplicated clause; ``None`` if two atoms on one field conflict."""
    atoms = sorted(set(atoms))
    seen: dict[tuple[str, int], int] = {}
    for a in atoms:
        key = (a.kind, a.modulus)
        if key in seen and seen[key] != a.value:
            return None
        seen[key] = a.value
    return tuple(atoms)


def clause_holds(clause: Clause, p: int) -> bool:
    return all(a.holds(p) for a in clause)


@dataclass(frozen=True)
class FinPresSet:
    """``(⋃_clauses ⋀ atoms) ∪ added \\ removed`` with finite ``added``/``removed``.

    Build instances with :meth:`build`, which normalizes: conflicting clauses
    are dropped, a clause without atoms means "all primes", added primes that
    already satisfy a clause and removed primes that satisfy none are
    discarded.
    """
    clauses: tuple[Clause, ...]
    added: frozenset[int] = frozenset()
    removed: frozenset[int] = frozenset()

    @classmethod
    def build(cls, clauses: Iterable[Iterable[Atom]] = (), added: Iterable[int] = (),
              removed: Iterable[int] = ()) -> FinPresSet:
        norm = set()
        for c in clauses:
            nc = _normalize_clause(c)
            if nc is not None:
                norm.add(nc)
        if () in norm:
            norm = {()}
        cl = tuple(sorted(norm, key=lambda c: (len(c), c)))
        added, removed = frozenset(int(p) for p in added), frozenset(int(p) for p in removed)
        if added & removed:
            raise PresentationError(f"primes both added and removed: {sorted(added & removed)}")
        sat = lambda p: any(clause_holds(c, p) for c in cl)
        return cls(cl, frozenset(p for p in added if not sat(p)), frozenset(p for p in removed if sat(p)))

    @classmethod
    def full(cls) -> FinPresSet:
        return cls.build([()])

    @classmethod
    def empty(cls) -> FinPresSet:
        return cls.build([])

    @classmethod
    def clause(cls, *atoms: Atom) -> FinPresSet:
        return cls.build([atoms])

    def member(self, p: int) -> bool:
        p = int(p)
        if p in self.added:
            return True
        if p in self.removed:
            return False
        return any(clause_holds(c, p) for c in self.clauses)

    def member_array(self, ps: np.ndarray) -> np.ndarray:
        ps = np.asarray(ps)
        out = np.zeros(ps.shape, dtype=bool)
        for c in self.clauses:
            m = np.ones(ps.shape, dtype=bool)
            for a in c:
                m &= a.holds_array(ps)
            out |= m
        if self.added:
            out |= np.isin(ps, sorted(self.added))
        if self.removed:
            out &= ~np.isin(ps, sorted(self.removed))
        return out

    def atoms(self) -> list[Atom]:
        return sorted({a for c in self.clauses for a in c})

    def quad_radicands(self) -> list[int]:
        return sorted({a.modulus for a in self.atoms() if a.kind == "quad"}, key=lambda a: (abs(fundamental_discriminant(a)), a))

    def conductors(self) -> list[int]:
        return sorted({a.modulus for a in self.atoms() if a.kind == "cyclo"})

    def ramified(self) -> frozenset[int]:
        return frozenset().union(*(a.ramified for a in self.atoms())) if self.clauses else frozenset()

    def is_full_presentation(self) -> bool:
        return self.clauses == ((),) and not self.removed

    def __str__(self):
        if not self.clauses:
            body = "∅"
        elif self.clauses == ((),):
            body = "P"
        else:
            parts = []
            for c in self.clauses:
                s = " ∩ ".join(str(a) for a in c)
                parts.append(f"({s})" if len(c) > 1 and len(self.clauses) > 1 else s)
            body = " ∪ ".join(parts)
        if self.added:
            body += " ∪ {" + ", ".join(map(str, sorted(self.added))) + "}"
        if self.removed:
            body += " \\ {" + ", ".join(map(str, sorted(self.removed))) + "}"
        return body

    def as_json(self) -> dict:
        return {
            "clauses": [[a.as_json() for a in c] for c in self.clauses],
            "added": sorted(self.added),
            "removed": sorted(self.removed),
            "text": str(self),
        }

    @classmethod
    def from_json(cls, d: dict) -> FinPresSet:
        if not isinstance(d, dict) or "clauses" not in d:
            raise PresentationError("set presentation needs a 'clauses' list")
        clauses = []
        for c in d["clauses"]:
            if not isinstance(c, list):
                raise PresentationError("each clause must be a list of atoms")
            clauses.append([Atom.from_json(a) for a in c])
        return cls.build(clauses, d.get("added", ()), d.get("removed", ()))


# -- signature space -------------------------------------------------------------

def _popcount_parity(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x) & 1


class SignatureSpace:
    """The finite point space for a fixed family of fields, plus special primes."""

    def __init__(self, radicands: Sequence[int] = (), conductors: Sequence[int] = (),
                 extra_primes: Iterable[int] = ()):
        rads = list(dict.fromkeys(int(a) for a in radicands))
        self.mq = MultiQuadContext(tuple(rads))
        self.s = self.mq.rank
        self.N = lcm(*[int(n) for n in conductors]) if conductors else 1
        for n in conductors:
            if n < 3:
                raise FieldError(f"cyclotomic conductor must be >= 3, got {n}")
        self.units = np.array([r for r in range(self.N) if gcd(r, self.N) == 1] if self.N > 1 else [0],
                              dtype=np.int64)
        self.width = 1 << self.s
        self.size = self.units.size * self.width
        special = set(self.mq.ramified_primes()) | set(factorint(self.N)) | {int(p) for p in extra_primes}
        self.special = tuple(sorted(special))
        self._special_index = {p: i for i, p in enumerate(self.special)}
        self._v = np.tile(np.arange(self.width, dtype=np.int64), self.units.size)
        self._u = np.repeat(self.units, self.width)
        self.realizable = self._realizable()
        self.realizable.flags.writeable = False

    @classmethod
    def for_sets(cls, sets: Iterable[FinPresSet], extra_radicands: Sequence[int] = (),
                 extra_primes: Iterable[int] = ()) -> SignatureSpace:
        sets = list(sets)
        rads, conds, extra = list(extra_radicands), [], set(extra_primes)
        for fs in sets:
            rads += fs.quad_radicands()
            conds += fs.conductors()
            extra |= fs.added | fs.removed
        rads = sorted(dict.fromkeys(rads), key=lambda a: (abs(fundamental_discriminant(a)), a))
        return cls(rads, sorted(set(conds)), extra)

    def __repr__(self):
        return f"SignatureSpace(basis={self.mq.basis}, N={self.N}, special={self.special})"

    def covers(self, fs: FinPresSet) -> bool:
        try:
            for a in fs.atoms():
                self._atom_mask(a)
        except PresentationError:
            return False
        return set(fs.added | fs.removed) <= set(self.special)

    def _realizable(self) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        if self.N == 1:
            return mask
        # fields inside Q(zeta_N): their Frobenius is fixed by p mod N
        pivots: list[int] = []
        for c in range(1, self.width):
            a = self.mq.radicand_of(c)
            if a == 1 or self.N % abs(fundamental_discriminant(a)):
                continue
            r = c
            for pv in pivots:
                r = min(r, r ^ pv)
            if not r:
                continue
            pivots.append(r)
            pivots.sort(reverse=True)
            D = fundamental_discriminant(a)
            chi = np.array([quadratic_character(D, int(u)) for u in self.units])
            inert = np.repeat(chi == -1, self.width)
            mask &= _popcount_parity(self._v & c).astype(bool) == inert
        return mask

    # -- evaluation

    def _atom_mask(self, a: Atom) -> np.ndarray:
        if a.kind == "quad":
            c = self.mq.express(a.modulus)
            if c is None:
                raise PresentationError(f"field Q(sqrt({a.modulus})) is not in this space")
            inert = _popcount_parity(self._v & c).astype(bool)
            return inert if a.value == -1 else ~inert
        if self.N % a.modulus:
            raise PresentationError(f"conductor {a.modulus} does not divide {self.N}")
        return self._u % a.modulus == a.value

    def region(self, fs: FinPresSet) -> Region:
        mask = np.zeros(self.size, dtype=bool)
        for c in fs.clauses:
            m = self.realizable.copy()
            for a in c:
                m &= self._atom_mask(a)
            mask |= m
        missing = (fs.added | fs.removed) - set(self.special)
        if missing:
            raise PresentationError(f"primes {sorted(missing)} are not special in this space")
        return Region(self, mask & self.realizable, frozenset(p for p in self.special if fs.member(p)))

    def full(self) -> Region:
        return Region(self, self.realizable.copy(), frozenset(self.special))

    def empty(self) -> Region:
        return Region(self, np.zeros(self.size, dtype=bool), frozenset())

    def point_of(self, p: int) -> int | None:
        """Grid index of a non-special prime."""
        if p in self._special_index:
            return None
        v = self.mq.frobenius_element(p)
        if v is None:
            return None
        ui = 0 if self.N == 1 else int(np.searchsorted(self.units, p % self.N))
        return ui * self.width + v

    def points_of(self, ps: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`point_of`; special primes get ``-1``."""
        ps = np.asarray(ps, dtype=np.int64)
        v = np.zeros(ps.shape, dtype=np.int64)
        for i, b in enumerate(self.mq.basis):
            D = fundamental_discriminant(b)
            v |= (quadratic_table(D)[ps % abs(D)] == -1).astype(np.int64) << i
        ui = np.zeros(ps.shape, dtype=np.int64) if self.N == 1 else np.searchsorted(self.units, ps % self.N)
        idx = ui * self.width + v
        if self.special:
            idx[np.isin(ps, self.special)] = -1
        return idx

    def witness(self, index: int, bound: int = 10 ** 6) -> int | None:
        """Smallest non-special prime at the given point, searching up to ``bound``."""
        step = 1 << 12
        lo = 2
        while lo <= bound:
            ps = primes(min(bound, lo + step))
            ps = ps[ps >= lo]
            hits = ps[self.points_of(ps) == index]
            if hits.size:
                return int(hits[0])
            lo += step + 1
            step *= 2
        return None

    # -- presentation

    def presentation(self, region: Region) -> FinPresSet:
        """Canonical presentation in terms of the basis fields (and ``N``)."""
        s, W = self.s, self.width
        on = region.mask.reshape(self.units.size, W)
        real = self.realizable.reshape(self.units.size, W)
        clauses: list[list[Atom]] = []

        def cube_atoms(bits: int, dash: int) -> list[Atom]:
            return [Atom.quad(self.mq.basis[i], -1 if bits >> i & 1 else 1)
                    for i in range(s) if not dash >> i & 1]

        union_on = on.any(axis=0)
        uniform = bool(((union_on[None, :] & real) == on).all())
        if uniform:
            dc = ~real.any(axis=0)
            for bits, dash in _cover(union_on, dc, s):
                clauses.append(cube_atoms(bits, dash))
        else:
            for ui, u in enumerate(self.units):
                if not on[ui].any():
                    continue
                for bits, dash in _cover(on[ui], ~real[ui], s):
                    clauses.append([Atom.cyclo(self.N, int(u))] + cube_atoms(bits, dash))
        base = FinPresSet.build(clauses)
        added = [p for p in region.special if not base.member(p)]
        removed = [p for p in self.special if p not in region.special and base.member(p)]
        return FinPresSet.build(base.clauses, added, removed)


def _cover(on: np.ndarray, dc: np.ndarray, s: int) -> list[tuple[int, int]]:
    """Prime-implicant cover (Quine-McCluskey with a greedy cover step).

    Returns cubes ``(bits, dash)``: variables in ``dash`` are free.
    """
    ones = [int(i) for i in np.flatnonzero(on)]
    if not ones:
        return []
    care = set(ones)
    level = {(i, 0) for i in np.flatnonzero(on | dc).tolist()}
    primes_: set[tuple[int, int]] = set()
    while level:
        nxt = set()
        used = set()
        for bits, dash in level:
            for k in range(s):
                b = 1 << k
                if dash & b or bits & b:
                    continue
                partner = (bits | b, dash)
                if partner in level:
                    nxt.add((bits, dash | b))
                    used.add((bits, dash))
                    used.add(partner)
        primes_ |= level - used
        level = nxt
    cubes = sorted(primes_, key=lambda c: (-bin(c[1]).count("1"), c))
    remaining = set(care)
    chosen = []

    def covered(cube):
        bits, dash = cube
        return {m for m in remaining if (m & ~dash) == bits}

    while remaining:
        best = max(cubes, key=lambda c: (len(covered(c)), bin(c[1]).count("1")))
        chosen.append(best)
        remaining -= covered(best)
    return sorted(chosen)


@dataclass(frozen=True, eq=False)
class Region:
    """Normal form of a prime set inside a :class:`SignatureSpace`."""
    space: SignatureSpace
    mask: np.ndarray
    special: frozenset[int]

    def _check(self, other: Region) -> None:
        if other.space is not self.space:
            raise PresentationError("regions live in different signature spaces")

    def __and__(self, other: Region) -> Region:
        self._check(other)
        return Region(self.space, self.mask & other.mask, self.special & other.special)

    def __or__(self, other: Region) -> Region:
        self._check(other)
        return Region(self.space, self.mask | other.mask, self.special | other.special)

    def __sub__(self, other: Region) -> Region:
        self._check(other)
        return Region(self.space, self.mask & ~other.mask, self.special - other.special)

    def __invert__(self) -> Region:
        sp = self.space
        return Region(sp, sp.realizable & ~self.mask, frozenset(sp.special) - self.special)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Region) and other.space is self.space
                and np.array_equal(self.mask, other.mask) and self.special == other.special)

    def __hash__(self):
        return hash((self.mask.tobytes(), self.special))

    def is_empty(self) -> bool:
        return not self.mask.any() and not self.special

    def issubset(self, other: Region) -> bool:
        self._check(other)
        return not (self.mask & ~other.mask).any() and self.special <= other.special

    def is_full(self) -> bool:
        return (~self).is_empty()

    def member(self, p: int) -> bool:
        if p in self.space._special_index:
            return p in self.special
        idx = self.space.point_of(p)
        return bool(self.mask[idx])

    def member_array(self, ps: np.ndarray) -> np.ndarray:
        ps = np.asarray(ps, dtype=np.int64)
        idx = self.space.points_of(ps)
        out = np.zeros(ps.shape, dtype=bool)
        gen = idx >= 0
        out[gen] = self.mask[idx[gen]]
        if self.special:
            out |= np.isin(ps, sorted(self.special))
        return out

    def some_member(self, bound: int = 10 ** 6) -> int | None:
        """A member prime: the smallest special member or a witness for the first point."""
        cands = sorted(self.special)
        pts = np.flatnonzero(self.mask)
        if pts.size:
            w = self.space.witness(int(pts[0]), bound)
            if w is not None:
                cands.append(w)
        return min(cands) if cands else None

    def presentation(self) -> FinPresSet:
        return self.space.presentation(self)


# -- fast quadratic clause algebra ---------------------------------------------------

class SupportIndex:
    """Maps square-class supports to bit positions, shared across many clauses."""

    def __init__(self):
        self._pos: dict[int, int] = {}

    def vector(self, a: int) -> int:
        v = 0
        for c in support(a):
            if c not in self._pos:
                self._pos[c] = len(self._pos)
            v |= 1 << self._pos[c]
        return v


def _echelon(rows: Iterable[tuple[int, int]]) -> list[tuple[int, int]] | None:
    """Reduce affine GF(2) rows ``(vector, rhs)``; ``None`` if inconsistent."""
    piv: list[tuple[int, int]] = []
    for v, r in rows:
        for pv, pr in piv:
            if v ^ pv < v:
                v, r = v ^ pv, r ^ pr
        if v:
            piv.append((v, r))
            piv.sort(reverse=True)
        elif r:
            return None
    return piv


def quad_clauses_intersect(c1: Clause, c2: Clause, index: SupportIndex | None = None) -> bool:
    """Exact test whether two conjunctions of quadratic atoms share a prime.

    Frobenius values in quadratic fields are multiplicative in the radicand,
    and the sign, 2 and each odd prime give independent fields, so the
    unramified part is an affine system over GF(2).  Ramified primes are
    checked directly.
    """
    index = index or SupportIndex()
    rows = [(index.vector(a.modulus), 1 if a.value == -1 else 0) for a in c1 + c2]
    if _echelon(rows) is not None:
        return True
    ram = set().union(*(a.ramified for a in c1 + c2))
    return any(clause_holds(c1, p) and clause_holds(c2, p) for p in sorted(ram))
