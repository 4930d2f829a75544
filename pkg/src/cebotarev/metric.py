"""Discriminant-indexed partitions of the rational primes and the ultrametric they define.

Level ``d`` uses the quadratic fields with ``|disc| = d``.  Primes unramified in
all of them are grouped by their Frobenius signature; each prime ``alpha``
ramified at level ``d`` gets a clopen neighbourhood ``Ṽd(alpha)`` found by a
bounded search.  ``W_d`` is the common refinement of levels ``1..d`` and
``δ(x, y) = 1/n`` with ``n`` the deepest level at which ``x`` and ``y`` share a
``W`` cell.
"""

from __future__ import annotations

import csv
import io
import threading
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

from .rationals import QuadField, frobenius, is_fundamental_discriminant, kronecker, primes
from .signature import Atom, FinPresSet, SignatureSpace, SupportIndex, quad_clauses_intersect
from .topology import Basic, Diff, Inter, SearchExhausted, Union, closure_over_approx

PRINTED_TILDE_V = {
    3: {3: FinPresSet.clause(Atom.quad(-1, -1), Atom.quad(5, -1))},
    4: {2: FinPresSet.clause(Atom.quad(-3, 1), Atom.quad(5, 1))},
}
PRINTED_THIRD_PAIRS = ((2, 7), (2, 13), (5, 11), (7, 13), (7, 19), (13, 19))
PRINTED_QUARTER_PAIRS = ((2, 19), (5, 17))
COMPAT_PRIME_BOUND = 19
COMPAT_D_MAX = 4


@dataclass(frozen=True)
class MetricConfig:
    d_max: int = 20
    search_disc_bound: int = 60
    search_clause_width: int = 2
    compat_mode: bool = False
    sieve_bound: int = 100_000
    grouped_cells: bool = False

    def __post_init__(self):
        if self.d_max < 1:
            raise ValueError("d_max must be positive")
        if self.d_max > self.search_disc_bound:
            raise ValueError("d_max must not exceed search_disc_bound")
        if self.search_clause_width < 0:
            raise ValueError("search_clause_width must be non-negative")

    def as_json(self) -> dict:
        return {
            "d_max": self.d_max, "search_disc_bound": self.search_disc_bound,
            "search_clause_width": self.search_clause_width, "compat": self.compat_mode,
            "sieve_bound": self.sieve_bound, "grouped_cells": self.grouped_cells,
        }


# -- fields by discriminant ------------------------------------------------------------

def quadratic_fields_with(d: int) -> tuple[QuadField, ...]:
    """Quadratic fields with ``|disc| = d``, positive discriminant first."""
    return tuple(QuadField.from_discriminant(D) for D in (d, -d) if is_fundamental_discriminant(D))


def quadratic_fields_upto(k: int) -> list[QuadField]:
    out = []
    for d in range(3, k + 1):
        out.extend(quadratic_fields_with(d))
    return out


def frobenius_atom(F: QuadField, x: int) -> Atom | None:
    f = int(frobenius(x, F))
    return Atom.quad(F.radicand, f) if f else None


# -- level data ------------------------------------------------------------------------

@dataclass(frozen=True)
class TildeV:
    alpha: int
    d: int
    set: FinPresSet
    complexity: int
    families: int
    pinned: bool
    closed: bool
    closure_witness: int | None
    contains_alpha: bool

    @property
    def name(self) -> str:
        return f"Ṽ{self.d}({self.alpha})"

    def as_json(self) -> dict:
        return {
            "alpha": self.alpha, "name": self.name, "set": self.set.as_json(),
            "complexity_bound": self.complexity, "minimal_families": self.families,
            "pinned_from_reference": self.pinned, "closure_certified": self.closed,
            "closure_witness": self.closure_witness, "contains_alpha": self.contains_alpha,
        }


@dataclass(frozen=True)
class VCell:
    """One block of the level-``d`` partition.

    ``key`` is ``("all",)``, ``("sig", signs)``, ``("grouped",)`` or ``("tilde", alpha)``.
    """
    d: int
    key: tuple
    atoms: tuple[Atom, ...]
    minus: tuple[TildeV, ...]
    tilde: TildeV | None = None

    def expr(self):
        if self.tilde is not None:
            return Basic(self.tilde.set, self.tilde.name, self.tilde.closed)
        if self.key[0] == "grouped":
            pos = Union(tuple(Inter(tuple(Basic(FinPresSet.clause(a)) for a in combo))
                              for combo in _sign_combos(self.atoms)))
        elif self.atoms:
            pos = Inter(tuple(Basic(FinPresSet.clause(a)) for a in self.atoms))
        else:
            pos = Basic(FinPresSet.full())
        if not self.minus:
            return pos
        return Diff(pos, Union(tuple(Basic(t.set, t.name, t.closed) for t in self.minus)))

    def member(self, p: int) -> bool:
        return self.expr().member(p)


def _sign_combos(fields_atoms):
    rads = [a.modulus for a in fields_atoms]
    for signs in product((1, -1), repeat=len(rads)):
        yield tuple(Atom.quad(r, s) for r, s in zip(rads, signs))


@dataclass
class LevelData:
    d: int
    fields: tuple[QuadField, ...]
    ramified: tuple[int, ...]
    tilde_V: dict[int, TildeV] = field(default_factory=dict)
    v_cells: list[VCell] = field(default_factory=list)
    cells: list = field(default_factory=list)
    search: dict = field(default_factory=dict)

    @property
    def S_d(self):
        return self.fields

    @property
    def R_d(self):
        return self.ramified

    def v_cell_key(self, p: int):
        """Key of the level cell containing ``p`` (``None`` if uncovered)."""
        if not self.fields:
            return ("all",)
        for alpha, tv in self.tilde_V.items():
            if tv.set.member(p):
                return ("tilde", alpha)
        signs = tuple(kronecker(F.discriminant, p) for F in self.fields)
        if 0 in signs:
            return None
        return ("grouped",) if self.v_cells and self.v_cells[0].key == ("grouped",) else ("sig", signs)

    def as_json(self, inline: bool = False) -> dict:
        return {
            "d": self.d,
            "S_d": [F.radicand for F in self.fields],
            "discriminants": [F.discriminant for F in self.fields],
            "R_d": list(self.ramified),
            "tilde_V": {str(a): t.as_json() for a, t in sorted(self.tilde_V.items())},
            "level_cells": [c.expr().render(inline) for c in self.v_cells],
            "cells": [c.render(inline) for c in self.cells],
            "search": self.search,
        }


def enumerate_level(d: int) -> LevelData:
    if d < 1:
        raise ValueError("level must be positive")
    fields_ = quadratic_fields_with(d)
    ram = tuple(sorted({p for F in fields_ for p in F.ramified}))
    return LevelData(d, fields_, ram)


def V_atoms(d: int, x: int) -> list[Atom]:
    """Atoms of ``V_d(x)``: Frobenius of ``x`` in each level-``d`` field unramified at ``x``."""
    out = []
    for F in quadratic_fields_with(d):
        a = frobenius_atom(F, x)
        if a is not None:
            out.append(a)
    return out


def V_set(d: int, x: int) -> FinPresSet:
    return FinPresSet.clause(*V_atoms(d, x))


def required_atoms(d: int, x: int) -> list[Atom]:
    """Atoms of ``V_1(x) ∩ ... ∩ V_d(x)``."""
    return [a for m in range(1, d + 1) for a in V_atoms(m, x)]


# -- presentation complexity -----------------------------------------------------------

def _complexity(atoms: Iterable[Atom]) -> int:
    return max((abs(a.discriminant) for a in atoms), default=0)


@dataclass(frozen=True)
class ComplexityResult:
    bound: int
    presentation: FinPresSet
    bound_only: bool = True

    def as_json(self) -> dict:
        return {"bound": self.bound, "presentation": self.presentation.as_json(), "bound_only": self.bound_only}


def presentation_complexity(s: FinPresSet, config: MetricConfig = MetricConfig()) -> ComplexityResult:
    """Upper bound on the least max ``|disc|`` over presentations of ``s``.

    Searches presentations by unions of clauses of width ``<= search_clause_width``
    over quadratic fields with ``|disc| <= k`` for increasing ``k``.
    """
    if s.added or s.removed:
        raise ValueError("complexity is defined for presentations without explicit primes")
    if any(a.kind != "quad" for a in s.atoms()):
        raise ValueError("complexity search handles quadratic atoms only")
    own = _complexity(s.atoms())
    w = max(config.search_clause_width, 1)
    for k in range(0, own):
        flds = quadratic_fields_upto(k)
        space = SignatureSpace.for_sets([s], extra_radicands=[F.radicand for F in flds])
        target = space.region(s)
        if target.is_empty():
            return ComplexityResult(0, FinPresSet.empty())
        if target.is_full():
            return ComplexityResult(0, FinPresSet.full())
        got = space.empty()
        chosen = []
        for width in range(1, w + 1):
            for fs in combinations(flds, width):
                for signs in product((1, -1), repeat=width):
                    clause = FinPresSet.clause(*(Atom.quad(F.radicand, v) for F, v in zip(fs, signs)))
                    r = space.region(clause)
                    if not r.is_empty() and r.issubset(target):
                        got = got | r
                        chosen.append(clause.clauses[0])
        if got == target:
            return ComplexityResult(k, FinPresSet.build(chosen))
    return ComplexityResult(own, s)


# -- Ṽ search ----------------------------------------------------------------------------

@dataclass
class _Candidate:
    atoms: tuple[Atom, ...]
    complexity: int


def _certified_clause(atoms: tuple[Atom, ...]) -> tuple[bool, int | None]:
    cert = closure_over_approx(FinPresSet.clause(*atoms))
    return cert.closed, cert.witness


def search_tilde_V(d: int, config: MetricConfig = MetricConfig()) -> dict[int, TildeV]:
    """Clopen neighbourhoods of the primes ramified at level ``d``.

    In compat mode levels 3 and 4 return the printed sets unchanged.
    Otherwise, for increasing ``k``, candidates for ``alpha`` are the clauses
    ``V_1(alpha) ∩ ... ∩ V_d(alpha) ∩ C`` where ``C`` has at most
    ``search_clause_width`` atoms on fields with ``|disc| <= k`` unramified at
    ``alpha``, all fields of the clause have ``|disc| <= k``, and the clause
    passes the closure certificate.  The whole prime set is not accepted as a
    neighbourhood.  The first ``k`` admitting a pairwise disjoint choice
    fixes the complexity; each ``Ṽd(alpha)`` is the intersection of the
    ``alpha``-members of all such minimal choices.
    """
    level = enumerate_level(d)
    if not level.fields:
        raise ValueError(f"level {d} has no fields")
    if config.compat_mode and d in PRINTED_TILDE_V:
        out = {}
        for alpha, s in PRINTED_TILDE_V[d].items():
            cert = closure_over_approx(s)
            out[alpha] = TildeV(alpha, d, s, _complexity(s.atoms()), 1, True, cert.closed,
                                cert.witness, s.member(alpha))
        return out

    R = level.ramified
    req = {a: tuple(required_atoms(d, a)) for a in R}
    req_fields = {a: {x.modulus for x in req[a]} for a in R}
    pool = {a: [F for F in quadratic_fields_upto(config.search_disc_bound)
                if a not in F.ramified and F.radicand not in req_fields[a]] for a in R}
    w = config.search_clause_width
    cands: dict[int, list[_Candidate]] = {a: [] for a in R}
    best_uncertified: dict[int, tuple] = {}
    index = SupportIndex()

    for k in range(1, config.search_disc_bound + 1):
        for a in R:
            base = _complexity(req[a])
            if base > k:
                continue
            fresh = [F for F in pool[a] if abs(F.discriminant) == k]
            older = [F for F in pool[a] if abs(F.discriminant) < k]
            choices: list[tuple[QuadField, ...]] = []
            if base == k or (k == 1 and base == 0):
                choices.append(())
            for width in range(1, w + 1):
                for n_fresh in range(1, width + 1):
                    for fs in combinations(fresh, n_fresh):
                        for os_ in combinations(older, width - n_fresh):
                            choices.append(tuple(sorted(os_ + fs, key=lambda F: (abs(F.discriminant), F.radicand))))
            for extra in choices:
                atoms = req[a] + tuple(frobenius_atom(F, a) for F in extra)
                if not atoms:
                    continue  # the whole space is not a useful neighbourhood
                ok, wit = _certified_clause(atoms)
                if ok:
                    cands[a].append(_Candidate(atoms, max(base, _complexity(atoms))))
                elif a not in best_uncertified:
                    best_uncertified[a] = (atoms, wit)
        if any(not cands[a] for a in R):
            continue
        families = []
        for combo in product(*(cands[a] for a in R)):
            if all(not quad_clauses_intersect(x.atoms, y.atoms, index) for x, y in combinations(combo, 2)):
                families.append(combo)
        if not families:
            continue
        out = {}
        for i, a in enumerate(R):
            atoms = set()
            for fam in families:
                atoms.update(fam[i].atoms)
            s = FinPresSet.clause(*atoms)
            cert = closure_over_approx(s)
            out[a] = TildeV(a, d, s, k, len(families), False, cert.closed, cert.witness, s.member(a))
        return out
    detail = {a: (str(FinPresSet.clause(*v[0])), v[1]) for a, v in best_uncertified.items()}
    raise SearchExhausted(f"no certified neighbourhoods at level {d} with |disc| <= "
                          f"{config.search_disc_bound}; best uncertified candidates: {detail}")


# -- partitions ------------------------------------------------------------------------------

@dataclass(frozen=True)
class WCell:
    """A block of ``W_d``: one level cell chosen at every level ``m <= d`` with fields."""
    parts: tuple[VCell, ...]
    atoms: tuple[Atom, ...]
    positive_tilde: tuple[TildeV, ...]
    negative_tilde: tuple[TildeV, ...]
    empty: bool = False

    def expr(self):
        pos = [Basic(FinPresSet.clause(a)) for a in self.atoms]
        pos += [Basic(t.set, t.name, t.closed) for t in self.positive_tilde]
        body = Inter(tuple(pos)) if pos else Basic(FinPresSet.full())
        if not self.negative_tilde:
            return body
        return Diff(body, Union(tuple(Basic(t.set, t.name, t.closed) for t in self.negative_tilde)))

    def render(self, inline: bool = False) -> str:
        return self.expr().render(inline)

    def member(self, p: int) -> bool:
        return all(v.member(p) for v in self.parts)

    def sort_key(self):
        tilde_levels = [v.d for v in self.parts if v.tilde is not None]
        signs = tuple(0 if s == 1 else 1 for v in self.parts if v.key[0] == "sig" for s in v.key[1])
        if not tilde_levels:
            return (0, signs)
        return (1, tilde_levels[0], tuple(v.tilde.alpha if v.tilde else 0 for v in self.parts), signs)

    def as_json(self, inline: bool = False) -> dict:
        return {"cell": self.render(inline), "inline": self.render(True), "empty": self.empty,
                "levels": [_key_text(v.key) for v in self.parts]}


class Hierarchy:
    """Cached level data up to ``config.d_max`` (populated under a lock)."""

    def __init__(self, config: MetricConfig = MetricConfig()):
        self.config = config
        self._levels: dict[int, LevelData] = {}
        self._lock = threading.Lock()
        self._spaces: dict[int, SignatureSpace] = {}

    def level(self, d: int) -> LevelData:
        if d in self._levels:
            return self._levels[d]
        lv = enumerate_level(d)
        if lv.fields:
            lv.tilde_V = search_tilde_V(d, self.config)
            lv.search = {a: {"complexity_bound": t.complexity, "bound_only": True}
                         for a, t in lv.tilde_V.items()}
            tv = tuple(lv.tilde_V[a] for a in sorted(lv.tilde_V))
            if self.config.grouped_cells:
                lv.v_cells = [VCell(d, ("grouped",), tuple(Atom.quad(F.radicand, 1) for F in lv.fields), tv)]
            else:
                lv.v_cells = [VCell(d, ("sig", signs), tuple(Atom.quad(F.radicand, s) for F, s in zip(lv.fields, signs)), tv)
                              for signs in product((1, -1), repeat=len(lv.fields))]
            lv.v_cells += [VCell(d, ("tilde", t.alpha), (), (), t) for t in tv]
        else:
            lv.v_cells = [VCell(d, ("all",), (), ())]
        with self._lock:
            self._levels.setdefault(d, lv)
        return self._levels[d]

    def space(self, d: int) -> SignatureSpace:
        """Signature space containing every field used up to level ``d``."""
        if d not in self._spaces:
            rads = []
            for m in range(1, d + 1):
                lv = self.level(m)
                rads += [F.radicand for F in lv.fields]
                for t in lv.tilde_V.values():
                    rads += t.set.quad_radicands()
            rads = sorted(dict.fromkeys(rads), key=lambda a: (abs(QuadField(a).discriminant), a))
            sp = SignatureSpace(rads)
            with self._lock:
                self._spaces.setdefault(d, sp)
        return self._spaces[d]

    # -- exact partition data

    def level_labels(self, d: int, space: SignatureSpace | None = None):
        """Cell index of every grid point and special prime at level ``d``.

        ``-1`` marks an uncovered point, ``-2`` a point covered twice.
        """
        space = space or self.space(d)
        lv = self.level(d)
        grid = np.full(space.size, -1, dtype=np.int64)
        spec = {p: -1 for p in space.special}
        for i, c in enumerate(lv.v_cells):
            r = c.expr().region(space)
            hit = r.mask
            grid = np.where(hit & (grid == -1), i, np.where(hit, -2, grid))
            for p in r.special:
                spec[p] = i if spec[p] == -1 else -2
        grid = np.where(space.realizable, grid, -3)  # -3: not a point
        return grid, spec

    def partition(self, d: int, formal: bool | None = None) -> LevelData:
        """Level data with the ``W_d`` cells.

        Empty intersections are dropped, except that with ``formal`` (the
        default in compat mode) every combination of signature cells is
        listed, as in the printed displays, and flagged when empty.
        """
        if formal is None:
            formal = self.config.compat_mode
        lv = self.level(d)
        space = self.space(d)
        levels = [m for m in range(1, d + 1) if self.level(m).fields]
        if not levels:
            lv.cells = [WCell((self.level(1).v_cells[0],), (), (), ())]
            return lv
        labels = [self.level_labels(m, space) for m in levels]
        grid = np.stack([g for g, _ in labels], axis=1)[space.realizable]
        rows = {tuple(int(x) for x in r) for r in np.unique(grid, axis=0)}
        for p in space.special:
            rows.add(tuple(lab[1][p] for lab in labels))
        cells = []
        for row in rows:
            if any(i < 0 for i in row):
                continue
            parts = tuple(self.level(m).v_cells[i] for m, i in zip(levels, row))
            cells.append(self._wcell(parts, space))
        if formal:
            sig_idx = [[i for i, c in enumerate(self.level(m).v_cells) if c.tilde is None] for m in levels]
            for row in product(*sig_idx):
                if row not in rows:
                    parts = tuple(self.level(m).v_cells[i] for m, i in zip(levels, row))
                    cells.append(replace(self._wcell(parts, space), empty=True))
        lv.cells = sorted(cells, key=WCell.sort_key)
        return lv

    def _wcell(self, parts: tuple[VCell, ...], space: SignatureSpace) -> WCell:
        atoms = [a for v in parts for a in v.atoms]
        pos_t = [v.tilde for v in parts if v.tilde is not None]
        neg_t = [t for v in parts if v.tilde is None for t in v.minus]
        if pos_t:
            core = space.full()
            for t in pos_t:
                core = core & space.region(t.set)
            atoms = [a for a in atoms if not core.issubset(space.region(FinPresSet.clause(a)))]
        return WCell(parts, tuple(atoms), tuple(pos_t), tuple(neg_t))

    def validity(self, d: int) -> dict:
        """Exact disjointness/covering of level ``d`` and refinement of ``W_{d-1}`` by ``W_d``."""
        space = self.space(d)
        grid, spec = self.level_labels(d, space)
        real = grid[space.realizable]
        uncovered_points = np.flatnonzero(space.realizable & (grid == -1))
        double_points = np.flatnonzero(space.realizable & (grid == -2))
        uncovered = sorted(p for p, i in spec.items() if i == -1)
        double = sorted(p for p, i in spec.items() if i == -2)
        return {
            "d": d,
            "disjoint": not double_points.size and not double,
            "covers": not uncovered_points.size and not uncovered,
            "uncovered_primes": uncovered + [w for w in (space.witness(int(i), 10 ** 6) for i in uncovered_points[:3]) if w],
            "doubly_covered_primes": double,
            "points": int(real.size),
        }

    def cell_trace(self, p: int, d_max: int | None = None) -> list:
        return [self.level(m).v_cell_key(p) for m in range(1, (d_max or self.config.d_max) + 1)]


def level_partition(d: int, config: MetricConfig = MetricConfig(), hierarchy: Hierarchy | None = None) -> LevelData:
    return (hierarchy or Hierarchy(config)).partition(d)


# -- the metric ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaResult:
    x: int
    y: int
    d_max: int
    n_literal: int | None
    n_first_nonempty: int | None
    trace: tuple

    def _value(self, n):
        if self.x == self.y:
            return Fraction(0)
        return None if n is None else Fraction(1, n)

    @property
    def delta(self) -> Fraction | None:
        """``1/n`` (literal convention), ``None`` meaning the interval ``(0, 1/d_max]``."""
        return self._value(self.n_literal)

    @property
    def delta_first_nonempty(self) -> Fraction | None:
        return self._value(self.n_first_nonempty)

    def text(self, convention: str = "literal") -> str:
        v = self.delta if convention == "literal" else self.delta_first_nonempty
        return f"(0,1/{self.d_max}]" if v is None else str(v)

    def key(self, convention: str = "literal") -> tuple:
        """Total order: 0 < interval < exact values."""
        v = self.delta if convention == "literal" else self.delta_first_nonempty
        if v == 0:
            return (0, Fraction(0))
        return (1, Fraction(0)) if v is None else (2, v)

    def as_json(self) -> dict:
        return {
            "pair": [self.x, self.y],
            "n_literal": self.n_literal,
            "delta_literal": self.text("literal"),
            "n_first_nonempty": self.n_first_nonempty,
            "delta_first_nonempty": self.text("first-nonempty"),
            "convention_note": "literal counts levels with no fields (n >= 2 always); "
                               "first-nonempty counts only levels with fields and gives 1 when the "
                               "first such level separates the pair",
            "trace": [dict(t) for t in self.trace],
        }


def _key_text(key) -> str | None:
    if key is None:
        return None
    if key[0] == "sig":
        return "sig(" + ",".join(f"{s:+d}" for s in key[1]) + ")"
    if key[0] == "tilde":
        return f"tilde({key[1]})"
    return key[0]


def delta(x: int, y: int, config: MetricConfig = MetricConfig(), hierarchy: Hierarchy | None = None) -> DeltaResult:
    if not (isprime(x) and isprime(y)):
        raise ValueError("delta is defined on primes")
    if max(x, y) > config.sieve_bound:
        raise ValueError(f"primes must not exceed sieve bound {config.sieve_bound}")
    h = hierarchy or Hierarchy(config)
    return _delta_from_traces(x, y, h.cell_trace(x), h.cell_trace(y), h, config)


@dataclass
class DeltaMatrix:
    primes: list[int]
    entries: dict[tuple[int, int], DeltaResult]
    d_max: int

    def get(self, x: int, y: int) -> DeltaResult:
        return self.entries[(x, y)] if (x, y) in self.entries else self.entries[(y, x)]

    def ultrametric_violations(self, convention: str = "literal") -> list[tuple[int, int, int]]:
        bad = []
        ps = self.primes
        keys = {(x, y): self.get(x, y).key(convention) for x in ps for y in ps}
        for x in ps:
            for y in ps:
                for z in ps:
                    if keys[(x, y)] > max(keys[(x, z)], keys[(z, y)]):
                        bad.append((x, y, z))
        return bad

    def is_symmetric(self, convention: str = "literal") -> bool:
        return all(self.get(x, y).text(convention) == self.get(y, x).text(convention)
                   for x in self.primes for y in self.primes)

    def to_csv(self, convention: str = "literal") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + self.primes)
        for x in self.primes:
            w.writerow([x] + [self.get(x, y).text(convention) for y in self.primes])
        return buf.getvalue()


def delta_matrix(prime_list: Sequence[int], config: MetricConfig = MetricConfig(),
                 hierarchy: Hierarchy | None = None) -> DeltaMatrix:
    h = hierarchy or Hierarchy(config)
    ps = sorted(set(int(p) for p in prime_list))
    entries = {}
    traces = {p: h.cell_trace(p) for p in ps}
    for i, x in enumerate(ps):
        for y in ps[i:]:
            entries[(x, y)] = _delta_from_traces(x, y, traces[x], traces[y], h, config)
            if x != y:
                entries[(y, x)] = _delta_from_traces(y, x, traces[y], traces[x], h, config)
    return DeltaMatrix(ps, entries, config.d_max)


def _delta_from_traces(x, y, tx, ty, h: Hierarchy, config: MetricConfig) -> DeltaResult:
    trace = []
    n_lit = n_first = last_nonempty = None
    together = True
    for d, (kx, ky) in enumerate(zip(tx, ty), start=1):
        same = x == y or (kx is not None and kx == ky)
        trace.append((("d", d), ("same_cell", same), ("cell_x", _key_text(kx)), ("cell_y", _key_text(ky))))
        if together and not same:
            together = False
            n_lit = d - 1
            n_first = last_nonempty if last_nonempty is not None else 1
        if together and h.level(d).fields:
            last_nonempty = d
    return DeltaResult(x, y, config.d_max, n_lit, n_first, tuple(trace))


# -- comparison with the printed d <= 4 example ----------------------------------------------

def compat_config(config: MetricConfig = MetricConfig()) -> MetricConfig:
    return replace(config, compat_mode=True, d_max=COMPAT_D_MAX,
                   search_disc_bound=max(config.search_disc_bound, COMPAT_D_MAX))


def printed_value(x: int, y: int) -> str:
    pair = tuple(sorted((x, y)))
    if pair in PRINTED_THIRD_PAIRS:
        return "1/3"
    if pair in PRINTED_QUARTER_PAIRS:
        return "<=1/4"
    return "1"


def _agrees(printed: str, r: DeltaResult) -> bool:
    v = r.delta_first_nonempty
    if printed == "1/3":
        return v == Fraction(1, 3)
    if printed == "<=1/4":
        return v is None or (v != 0 and v <= Fraction(1, 4))
    return v == 1


def _frobenius_evidence(p: int, fields: Iterable[QuadField]) -> dict:
    return {str(F.radicand): int(frobenius(p, F)) for F in fields}


def compat_report(config: MetricConfig = MetricConfig(), prime_bound: int = COMPAT_PRIME_BOUND) -> dict:
    """Pair-by-pair comparison with the printed ``d <= 4`` classification."""
    cfg = compat_config(config)
    h = Hierarchy(cfg)
    ps = [int(p) for p in primes(prime_bound)]
    evidence_fields = [QuadField(-3), QuadField(-1), QuadField(5)]
    records = []
    for i, x in enumerate(ps):
        for y in ps[i + 1:]:
            r = delta(x, y, cfg, h)
            pv = printed_value(x, y)
            levels = []
            for d in range(1, cfg.d_max + 1):
                lv = h.level(d)
                kx, ky = lv.v_cell_key(x), lv.v_cell_key(y)
                levels.append({
                    "d": d,
                    "same_cell": kx is not None and kx == ky,
                    "cells": {str(x): _cell_name(lv, kx), str(y): _cell_name(lv, ky)},
                })
            records.append({
                "pair": [x, y],
                "printed_value": pv,
                "computed_value": r.text("first-nonempty"),
                "computed_literal": r.text("literal"),
                "agrees": _agrees(pv, r),
                "levels": levels,
                "frobenius": {str(x): _frobenius_evidence(x, evidence_fields),
                              str(y): _frobenius_evidence(y, evidence_fields)},
            })
    anomalies = []
    for d in (3, 4):
        lv = h.level(d)
        for t in lv.tilde_V.values():
            if not t.contains_alpha:
                anomalies.append({"kind": "neighbourhood-misses-point", "set": t.name,
                                  "text": str(t.set), "point": t.alpha})
            if not t.closed:
                anomalies.append({"kind": "closure-not-certified", "set": t.name,
                                  "text": str(t.set), "witness": t.closure_witness})
        v = h.validity(d)
        if not v["covers"]:
            anomalies.append({"kind": "partition-does-not-cover", "d": d, "uncovered": v["uncovered_primes"]})
    partitions = {str(d): [c.render() for c in h.partition(d).cells] for d in (3, 4)}
    partitions_inline = {str(d): [c.render(True) for c in h.partition(d).cells] for d in (3, 4)}
    return {
        "schema": "compat-comparison/1",
        "config": cfg.as_json(),
        "primes": ps,
        "pairs": records,
        "agreements": sum(r["agrees"] for r in records),
        "disagreements": sum(not r["agrees"] for r in records),
        "anomalies": anomalies,
        "partitions": partitions,
        "partitions_inline": partitions_inline,
    }


def _cell_name(lv: LevelData, key) -> str | None:
    if key is None:
        return None
    for c in lv.v_cells:
        if c.key == key:
            return c.expr().render()
    return _key_text(key)
