"""Exact arithmetic substrate: Z/p^k residues, Q_p/Z_p values, and Howell-form
linear algebra over Z/p^k.

All verification-grade computations reduce to integer arithmetic here; the
Howell normal form is the canonical representative of a row span, so subgroup
equality, membership and kernels are exact decidable predicates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "is_prime",
    "inv_mod",
    "valuation",
    "Modulus",
    "QpModZp",
    "ModMatrix",
    "howell_form",
    "howell",
    "kernel",
    "member",
    "reduce_mod_span",
    "span_size",
]


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond desk scale."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def inv_mod(a: int, m: int) -> int:
    return pow(a, -1, m)


def valuation(a: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if a == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


class Modulus:
    """The ring Z/p^k with p certified prime at construction."""

    __slots__ = ("p", "k", "pk")

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"modulus base {p} is not prime")
        if k < 1:
            raise ValueError("k must be >= 1")
        self.p = p
        self.k = k
        self.pk = p**k

    def __eq__(self, other):
        return isinstance(other, Modulus) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash((self.p, self.k))

    def __repr__(self):
        return f"Modulus({self.p}, {self.k})"


class QpModZp:
    """Element of Q_p/Z_p: numerator / p^level mod 1, stored in lowest terms."""

    __slots__ = ("p", "numerator", "level")

    def __init__(self, p: int, numerator: int, level: int):
        if level < 0:
            raise ValueError("level must be >= 0")
        m = p**level
        numerator %= m if m > 1 else 1
        while level > 0 and numerator % p == 0:
            numerator //= p
            level -= 1
        if numerator == 0:
            level = 0
        self.p = p
        self.numerator = numerator
        self.level = level

    @classmethod
    def from_fraction(cls, p: int, x: Fraction) -> "QpModZp":
        den = x.denominator
        lev = 0 if den == 1 else valuation(den, p)
        if p**lev != den:
            raise ValueError(f"denominator {den} is not a power of {p}")
        return cls(p, x.numerator, lev)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.p**self.level)

    def __add__(self, other: "QpModZp") -> "QpModZp":
        if self.p != other.p:
            raise ValueError("mixed primes")
        lev = max(self.level, other.level)
        m = self.p**lev
        num = (self.numerator * (m // self.p**self.level)
               + other.numerator * (m // self.p**other.level))
        return QpModZp(self.p, num, lev)

    def __neg__(self) -> "QpModZp":
        return QpModZp(self.p, -self.numerator, self.level)

    def __sub__(self, other: "QpModZp") -> "QpModZp":
        return self + (-other)

    def scale(self, n: int) -> "QpModZp":
        return QpModZp(self.p, n * self.numerator, self.level)

    def is_zero(self) -> bool:
        return self.numerator == 0

    def __eq__(self, other):
        return (isinstance(other, QpModZp)
                and (self.p, self.numerator, self.level)
                == (other.p, other.numerator, other.level))

    def __hash__(self):
        return hash((self.p, self.numerator, self.level))

    def __str__(self):
        return f"{self.numerator}/{self.p ** self.level}"

    __repr__ = __str__

    @classmethod
    def parse(cls, p: int, text: str) -> "QpModZp":
        num, _, den = text.partition("/")
        return cls.from_fraction(p, Fraction(int(num), int(den) if den else 1))


class ModMatrix:
    """Immutable integer matrix with all entries sharing one modulus p^k."""

    __slots__ = ("modulus", "rows")

    def __init__(self, modulus: Modulus, rows: Iterable[Sequence[int]]):
        pk = modulus.pk
        self.modulus = modulus
        self.rows = tuple(tuple(x % pk for x in r) for r in rows)
        if self.rows:
            w = len(self.rows[0])
            if any(len(r) != w for r in self.rows):
                raise ValueError("ragged matrix")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def identity(cls, modulus: Modulus, n: int) -> "ModMatrix":
        return cls(modulus, [[int(i == j) for j in range(n)] for i in range(n)])

    def mul(self, other: "ModMatrix") -> "ModMatrix":
        if self.modulus != other.modulus or self.ncols != other.nrows:
            raise ValueError("shape or modulus mismatch")
        pk = self.modulus.pk
        ocols = range(other.ncols)
        out = [
            [sum(a * b for a, b in zip(row, col)) % pk
             for col in zip(*other.rows)]
            for row in self.rows
        ] if other.rows else [[] for _ in self.rows]
        return ModMatrix(self.modulus, out)

    def is_invertible(self) -> bool:
        """Invertible over Z/p^k iff invertible mod p."""
        if self.nrows != self.ncols:
            return False
        p = self.modulus.p
        a = [[x % p for x in r] for r in self.rows]
        n = self.nrows
        for c in range(n):
            piv = next((i for i in range(c, n) if a[i][c] % p), None)
            if piv is None:
                return False
            a[c], a[piv] = a[piv], a[c]
            ic = inv_mod(a[c][c], p)
            for i in range(c + 1, n):
                f = a[i][c] * ic % p
                if f:
                    a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
        return True

    def __eq__(self, other):
        return (isinstance(other, ModMatrix)
                and self.modulus == other.modulus and self.rows == other.rows)

    def __hash__(self):
        return hash((self.modulus, self.rows))

    def __repr__(self):
        return f"ModMatrix({self.modulus!r}, {list(map(list, self.rows))})"


def _howell_engine(rows, p, k, ncols, transform):
    """Row-reduce to Howell form over Z/p^k.

    Works in place on a padded copy (ncols spare zero rows absorb annihilator
    rows as invertible 'add to zero row' operations). Returns (matrix, T)
    where T is the composed elementary transform when requested.
    """
    pk = p**k
    a = [list(r) for r in rows] + [[0] * ncols for _ in range(ncols)]
    n = len(a)
    t = [[int(i == j) for j in range(n)] for i in range(n)] if transform else None
    spare_used = 0

    def addmul(dst, src, c):
        a[dst] = [(x + c * y) % pk for x, y in zip(a[dst], a[src])]
        if t is not None:
            t[dst] = [(x + c * y) % pk for x, y in zip(t[dst], t[src])]

    r = 0
    for col in range(ncols):
        piv, pv = None, k
        for i in range(r, n):
            x = a[i][col]
            if x:
                v = valuation(x, p)
                if v < pv:
                    piv, pv = i, v
                    if v == 0:
                        break
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            if t is not None:
                t[r], t[piv] = t[piv], t[r]
        u = inv_mod(a[r][col] // p**pv, pk)
        a[r] = [x * u % pk for x in a[r]]
        if t is not None:
            t[r] = [x * u % pk for x in t[r]]
        step = p**pv
        for i in range(r + 1, n):
            if a[i][col]:
                addmul(i, r, -(a[i][col] // step))
        for i in range(r):
            if a[i][col] >= step:
                addmul(i, r, -(a[i][col] // step))
        if pv > 0:
            z = len(rows) + spare_used
            spare_used += 1
            addmul(z, r, pk // step)
            # keep the fresh annihilator row inside the active region
            if z != r + 1:
                a[r + 1], a[z] = a[z], a[r + 1]
                if t is not None:
                    t[r + 1], t[z] = t[z], t[r + 1]
        r += 1
        if r >= n:
            break
    return a, t


def howell(rows: Sequence[Sequence[int]], modulus: Modulus):
    """Canonical Howell rows (nonzero only) of the span of `rows`."""
    rows = [tuple(x % modulus.pk for x in r) for r in rows]
    if not rows:
        return ()
    ncols = len(rows[0])
    a, _ = _howell_engine(rows, modulus.p, modulus.k, ncols, transform=False)
    return tuple(tuple(r) for r in a if any(r))


def howell_form(m: ModMatrix):
    """Full Howell form with certificate: returns (H, U) with U invertible and
    U * pad(m) = H, where pad(m) appends ncols zero rows (room for annihilator
    rows). The nonzero rows of H are the canonical Howell basis of rowspan(m).
    """
    a, t = _howell_engine(m.rows, m.modulus.p, m.modulus.k, m.ncols, transform=True)
    return ModMatrix(m.modulus, a), ModMatrix(m.modulus, t)


def _pivots(hrows, p):
    """(column, valuation) per Howell row; rows must be nonzero echelon rows."""
    out = []
    for r in hrows:
        c = next(i for i, x in enumerate(r) if x)
        out.append((c, valuation(r[c], p)))
    return out


def reduce_mod_span(x: Sequence[int], hrows, modulus: Modulus, coeffs: bool = False):
    """Reduce x against Howell rows; residue is zero iff x is in the span."""
    pk, p = modulus.pk, modulus.p
    x = [v % pk for v in x]
    cs = []
    for row, (c, v) in zip(hrows, _pivots(hrows, p)):
        q = x[c] // p**v
        if q:
            x = [(a - q * b) % pk for a, b in zip(x, row)]
        cs.append(q)
    return (x, cs) if coeffs else x


def member(x: Sequence[int], hrows, modulus: Modulus) -> bool:
    return not any(reduce_mod_span(x, hrows, modulus))


def span_size(hrows, modulus: Modulus) -> int:
    """Cardinality of the span of Howell rows: product of row orders."""
    n = 1
    for _, v in _pivots(hrows, modulus.p):
        n *= modulus.p ** (modulus.k - v)
    return n


def mat_inverse(m: ModMatrix) -> ModMatrix:
    """Inverse of a square matrix over Z/p^k (unit-pivot Gauss-Jordan)."""
    n = m.nrows
    if n != m.ncols:
        raise ValueError("not square")
    p, pk = m.modulus.p, m.modulus.pk
    a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m.rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] % p), None)
        if piv is None:
            raise ValueError("matrix not invertible over Z/p^k")
        a[c], a[piv] = a[piv], a[c]
        inv = inv_mod(a[c][c], pk)
        a[c] = [x * inv % pk for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % pk for x, y in zip(a[i], a[c])]
    return ModMatrix(m.modulus, [r[n:] for r in a])


def kernel(m: ModMatrix) -> ModMatrix:
    """Generators of {x : x*m = 0}, canonical, via Howell of [m | I]."""
    n = m.nrows
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m.rows)]
    h = howell(aug, m.modulus)
    left = m.ncols
    gens = [r[left:] for r in h if not any(r[:left])]
    return ModMatrix(m.modulus, gens)
