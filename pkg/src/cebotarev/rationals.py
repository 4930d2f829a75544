"""Splitting of rational primes in quadratic, multiquadratic and cyclotomic fields."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from sympy import factorint, isprime

DEFAULT_SIEVE_CAP = 10_000_000


class FieldError(ValueError):
    """Invalid arithmetic input (non-squarefree radicand, bad conductor, ...)."""


# -- symbols -----------------------------------------------------------------

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a/n)``; ``n = 0`` gives 1 iff ``a = ±1``."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
        n >>= v
    # Jacobi symbol (a/n) for odd positive n
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def epsilon(ell: int) -> int:
    """``(ell-1)/2`` for odd ``ell`` and 0 for ``ell = 2``."""
    return (ell - 1) // 2 if ell % 2 else 0


def signed_prime(ell: int) -> int:
    """``(-1)^epsilon(ell) * ell``; the radicand of the quadratic field ramified only at ``ell``
    (for ``ell = 2`` this is 2 itself)."""
    return -ell if epsilon(ell) % 2 else ell


def is_squarefree(a: int) -> bool:
    return a != 0 and all(e == 1 for e in factorint(abs(a)).values())


def fundamental_discriminant(a: int) -> int:
    if a % 4 == 1:
        return a
    return 4 * a


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def radicand_of_discriminant(D: int) -> int:
    return D if D % 4 == 1 else D // 4


# -- fields ------------------------------------------------------------------

class Frobenius(IntEnum):
    SPLIT = 1
    INERT = -1
    RAMIFIED = 0

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True, order=True)
class QuadField:
    radicand: int

    def __post_init__(self):
        a = self.radicand
        if a in (0, 1) or not is_squarefree(a):
            raise FieldError(f"radicand {a} must be squarefree and not 0 or 1")

    @classmethod
    def from_discriminant(cls, D: int) -> QuadField:
        if not is_fundamental_discriminant(D):
            raise FieldError(f"{D} is not a fundamental discriminant")
        return cls(radicand_of_discriminant(D))

    @property
    def discriminant(self) -> int:
        return fundamental_discriminant(self.radicand)

    @property
    def ramified(self) -> tuple[int, ...]:
        return tuple(sorted(factorint(abs(self.discriminant))))

    def __str__(self):
        return f"Q(sqrt({self.radicand}))"


def frobenius(p: int, field: QuadField | int) -> Frobenius | int | None:
    """Frobenius of the prime ``p``.

    For a :class:`QuadField` the result is a :class:`Frobenius`.  For an integer
    conductor ``n >= 3`` it is the residue ``p mod n`` (an element of
    ``(Z/n)^*``), or ``None`` when ``p`` divides ``n``.
    """
    if isinstance(field, QuadField):
        return Frobenius(kronecker(field.discriminant, p))
    n = int(field)
    if n < 3:
        raise FieldError(f"cyclotomic conductor must be >= 3, got {n}")
    return None if n % p == 0 else p % n


@lru_cache(maxsize=512)
def _character_table(D: int) -> np.ndarray:
    m = abs(D)
    t = np.array([kronecker(D, r) if r else 0 for r in range(m)], dtype=np.int8)
    t.flags.writeable = False
    return t


def frobenius_array(primes: np.ndarray, a: int) -> np.ndarray:
    """Vectorized quadratic Frobenius values (+1, -1, 0) for ``Q(sqrt(a))``.

    ``kronecker(D, .)`` is periodic modulo ``|D|`` on positive integers for a
    fundamental discriminant ``D``, so a lookup table suffices.
    """
    D = fundamental_discriminant(a)
    return _character_table(D)[np.asarray(primes) % abs(D)]


def quadratic_character(D: int, r: int) -> int:
    return int(_character_table(D)[r % abs(D)])


# -- sieve -------------------------------------------------------------------

def _sieve(n: int) -> np.ndarray:
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, int(n ** 0.5) + 1):
        if is_p[i]:
            is_p[i * i::i] = False
    out = np.flatnonzero(is_p)
    out.flags.writeable = False
    return out


_SIEVE_REGISTRY: dict[int, np.ndarray] = {}


def _register(bound: int) -> np.ndarray:
    arr = _sieve(bound)
    _SIEVE_REGISTRY[bound] = arr
    return arr


def primes(bound: int, cap: int = DEFAULT_SIEVE_CAP) -> np.ndarray:
    """Sorted array of primes ``<= bound`` (cached, read-only)."""
    if bound > cap:
        raise FieldError(f"sieve bound {bound} exceeds cap {cap}")
    for n, arr in _SIEVE_REGISTRY.items():
        if n >= bound:
            return arr[: np.searchsorted(arr, bound, side="right")]
    arr = _register(max(int(bound), 2))
    return arr[: np.searchsorted(arr, bound, side="right")]


@dataclass(frozen=True)
class SieveStats:
    bound: int
    count: int
    total: int
    members: np.ndarray

    @property
    def density(self) -> float:
        return self.count / self.total if self.total else 0.0


def sieve_stats(predicate: Callable[[np.ndarray], np.ndarray] | str, bound: int,
                cap: int = DEFAULT_SIEVE_CAP) -> SieveStats:
    """Primes up to ``bound`` satisfying ``predicate`` and their share of all primes.

    ``predicate`` is either a vectorized function of a prime array returning a
    boolean mask, or a predicate expression string (see :func:`parse_predicate`).
    """
    ps = primes(bound, cap)
    if isinstance(predicate, str):
        predicate = parse_predicate(predicate)
    mask = np.asarray(predicate(ps), dtype=bool)
    members = ps[mask]
    return SieveStats(int(bound), int(mask.sum()), int(ps.size), members)


# -- predicate expressions ----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(quad|cyclo)\(\s*(-?\d+)\s*\)\s*=\s*([+-]?\d+)|(and|or|not|true|false)\b|(\()|(\)))")


class PredicateError(ValueError):
    pass


def parse_predicate(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile a boolean combination of ``quad(a)=±1`` and ``cyclo(n)=r`` atoms.

    Grammar: ``or``-separated terms of ``and``-separated factors; ``not``
    binds tightest; parentheses group; ``true``/``false`` are constants.
    A prime ramified in an atom's field never satisfies that atom.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PredicateError(f"cannot parse predicate near {text[pos:pos + 15]!r}")
        pos = m.end()
        if m.group(1):
            tokens.append(("atom", m.group(1), int(m.group(2)), int(m.group(3))))
        elif m.group(4):
            tokens.append((m.group(4),))
        else:
            tokens.append(("(",) if m.group(5) else (")",))
    tokens.append(("end",))
    i = 0

    def peek():
        return tokens[i][0]

    def take(kind):
        nonlocal i
        if tokens[i][0] != kind:
            raise PredicateError(f"expected {kind}, found {tokens[i][0]}")
        i += 1
        return tokens[i - 1]

    def expr():
        node = term()
        while peek() == "or":
            take("or")
            left, right = node, term()
            node = lambda ps, l=left, r=right: l(ps) | r(ps)
        return node

    def term():
        node = factor()
        while peek() == "and":
            take("and")
            left, right = node, factor()
            node = lambda ps, l=left, r=right: l(ps) & r(ps)
        return node

    def factor():
        kind = peek()
        if kind == "not":
            take("not")
            inner = factor()
            return lambda ps: ~inner(ps)
        if kind == "(":
            take("(")
            node = expr()
            take(")")
            return node
        if kind in ("true", "false"):
            take(kind)
            val = kind == "true"
            return lambda ps: np.full(np.shape(ps), val)
        _, op, arg, value = take("atom")
        return _atom_predicate(op, arg, value)

    node = expr()
    take("end")
    return node


def _atom_predicate(op: str, arg: int, value: int):
    if op == "quad":
        QuadField(arg)
        if value not in (1, -1):
            raise PredicateError("quad atoms take the value +1 or -1")
        return lambda ps: frobenius_array(ps, arg) == value
    if arg < 3:
        raise PredicateError(f"cyclotomic conductor must be >= 3, got {arg}")
    if gcd(value, arg) != 1:
        raise PredicateError(f"residue {value} is not a unit modulo {arg}")
    return lambda ps: (np.asarray(ps) % arg == value % arg) & (arg % np.asarray(ps) != 0)


# -- GF(2) square classes ------------------------------------------------------

def support(a: int) -> tuple[int, ...]:
    """Square-class support of ``a``: ``-1`` if negative, then its prime factors with odd exponent."""
    head = (-1,) if a < 0 else ()
    return head + tuple(sorted(p for p, e in factorint(abs(a)).items() if e % 2))


def _reduce(vec: int, pivots: list[tuple[int, int, int]]) -> tuple[int, int]:
    """Reduce ``vec`` against echelon rows; returns the residue and the combination bitmask."""
    combo = 0
    for bit, row, rc in pivots:
        if vec >> bit & 1:
            vec ^= row
            combo ^= rc
    return vec, combo


@dataclass
class MultiQuadContext:
    """Independent square classes among a list of radicands.

    Square classes are GF(2) vectors over the coordinates ``-1, 2, 3, 5, ...``
    (the sign and the primes occurring in any input).  The basis is the
    subsequence of inputs that are independent of their predecessors.  Each
    input radicand ``a`` is recorded as a bitmask ``coords[a]`` over the basis.
    """
    radicands: tuple[int, ...]
    coordinates: tuple[int, ...] = field(init=False)
    basis: tuple[int, ...] = field(init=False)
    coords: dict[int, int] = field(init=False)

    def __post_init__(self):
        self.radicands = tuple(int(a) for a in self.radicands)
        for a in self.radicands:
            if a in (0, 1) or not is_squarefree(a):
                raise FieldError(f"radicand {a} must be squarefree and not 0 or 1")
        self.coordinates = tuple(sorted({c for a in self.radicands for c in support(a)}))
        self._coord_index = {c: i for i, c in enumerate(self.coordinates)}
        pivots: list[tuple[int, int, int]] = []
        basis: list[int] = []
        self.coords = {}
        for a in self.radicands:
            v = self.vector(a)
            res, combo = _reduce(v, pivots)
            if res:
                k = len(basis)
                basis.append(a)
                combo ^= 1 << k
                pivots.append((res.bit_length() - 1, res, combo))
                pivots.sort(reverse=True)
                self.coords[a] = 1 << k
            else:
                self.coords[a] = combo
        self.basis = tuple(basis)
        self._pivots = pivots

    @property
    def rank(self) -> int:
        return len(self.basis)

    def vector(self, a: int) -> int:
        """Square class of ``a`` as a bitmask over :attr:`coordinates`."""
        v = 0
        for c in support(a):
            if c not in self._coord_index:
                raise FieldError(f"{a} involves {c}, outside this context")
            v |= 1 << self._coord_index[c]
        return v

    def express(self, a: int) -> int | None:
        """Bitmask over the basis whose product is ``a`` mod squares, or ``None`` if outside the span."""
        if a in self.coords:
            return self.coords[a]
        try:
            v = self.vector(a)
        except FieldError:
            return None
        res, combo = _reduce(v, self._pivots)
        return None if res else combo

    def radicand_of(self, mask: int) -> int:
        """Squarefree representative of the product of the basis elements in ``mask``."""
        sign, primes_ = 1, set()
        for i, b in enumerate(self.basis):
            if mask >> i & 1:
                for c in support(b):
                    if c == -1:
                        sign = -sign
                    else:
                        primes_ ^= {c}
        out = sign
        for p in primes_:
            out *= p
        return out

    def ramified_primes(self) -> tuple[int, ...]:
        out = set()
        for b in self.basis:
            out.update(QuadField(b).ramified)
        return tuple(sorted(out))

    def signature(self, p: int) -> Signature:
        vals = tuple(int(frobenius(p, QuadField(b))) for b in self.basis)
        ram = tuple(i for i, v in enumerate(vals) if v == 0)
        return Signature(p, None if ram else vals, ram)

    def frobenius_element(self, p: int) -> int | None:
        """Frobenius of an unramified ``p`` in ``(Z/2)^rank``: bit ``i`` set iff ``p`` is inert in basis field ``i``."""
        sig = self.signature(p)
        if sig.vector is None:
            return None
        return sum(1 << i for i, v in enumerate(sig.vector) if v == -1)

    def to_galois_context(self):
        """Abstract context with ambient ``(Z/2)^rank`` and one level per radicand label."""
        from .cset_core import GaloisContext
        from .finite_group import elementary_abelian_2

        G = elementary_abelian_2(self.rank)
        ctx = GaloisContext(G)
        ar = np.arange(G.order)
        for a in self.radicands:
            c = self.coords[a]
            kernel = ar[np.bitwise_count(ar & c) % 2 == 0]
            ctx.register(quad_label(a), G.subgroup(kernel.tolist()))
        return ctx


def quad_label(a: int) -> str:
    return f"Q(sqrt({a}))"


def multiquad_context(radicands: Sequence[int]) -> MultiQuadContext:
    return MultiQuadContext(tuple(radicands))


@dataclass(frozen=True)
class Signature:
    prime: int
    vector: tuple[int, ...] | None
    ramified_at: tuple[int, ...] = ()

    @property
    def is_ramified(self) -> bool:
        return self.vector is None


# -- exceptional primes ------------------------------------------------------

def lp_field(p: int) -> QuadField:
    """``Q(sqrt((-1)^epsilon(p) p))``, the quadratic field ramified exactly at ``p``."""
    return QuadField(signed_prime(p))


def assignment_from_prime(q0: int, S: Iterable[int]) -> dict[int, int]:
    """Signs ``sigma_p`` for ``p`` in ``S`` chosen so that ``q0`` survives.

    Survival at ``p`` needs the Frobenius of ``q0`` in ``L_p`` to equal
    ``-sigma_p``.  For ``p = q0`` the sign is irrelevant and set to +1.
    """
    out = {}
    for p in S:
        f = int(frobenius(q0, lp_field(p)))
        out[int(p)] = -f if f else 1
    return out


@dataclass(frozen=True)
class ExceptionalResult:
    assignment: Mapping[int, int]
    bound: int
    survivors: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.survivors)


def exceptional_primes(assignment: Mapping[int, int], bound: int,
                       cap: int = DEFAULT_SIEVE_CAP) -> ExceptionalResult:
    """Primes ``q <= bound`` lying in ``(P_{L_p}(-sigma_p) ∪ {p})`` for every ``p`` in the assignment."""
    for p, s in assignment.items():
        if not isprime(p) or s not in (1, -1):
            raise FieldError(f"bad assignment entry {p}: {s}")
    ps = primes(bound, cap)
    alive = np.ones(ps.size, dtype=bool)
    for p, s in sorted(assignment.items()):
        alive &= (frobenius_array(ps, signed_prime(p)) == -s) | (ps == p)
    return ExceptionalResult(dict(assignment), int(bound), tuple(int(q) for q in ps[alive]))


def empirical_density(mask: np.ndarray) -> Fraction:
    return Fraction(int(mask.sum()), int(mask.size))
