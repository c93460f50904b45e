"""Exact arithmetic in Q(zeta) for zeta a primitive p^M-th root of unity.

Elements live in the power basis 1, zeta, ..., zeta^(phi-1) with Fraction
coefficients, reduced modulo the p^M-th cyclotomic polynomial
Phi(x) = sum_{j<p} x^(j*p^(M-1)). Equality is coefficient equality, so every
identity checked against these numbers is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from orbitlab.arith import QpModZp, is_prime

__all__ = ["CycNumber", "cyc_embed", "embed_exponent"]

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _acc(co: list, p: int, n: int, e: int, c) -> None:
    """Add c*zeta^e into the coefficient list, reducing into the power basis.

    Uses zeta^((p-1)p^(M-1)) = -(1 + zeta^s + ... + zeta^((p-2)s)), s = p^(M-1).
    """
    e %= n
    phi = len(co)
    if e < phi:
        co[e] += c
    else:
        step = n // p
        r = e - phi
        for j in range(p - 1):
            co[r + j * step] -= c


class CycNumber:
    """Element of Q(zeta_{p^M}) with exact rational power-basis coefficients."""

    __slots__ = ("p", "m", "coeffs")

    def __init__(self, p: int, m: int, coeffs: Sequence[Fraction]):
        if m < 1 or not is_prime(p):
            raise ValueError("conductor must be p^M with p prime, M >= 1")
        phi = (p - 1) * p ** (m - 1)
        if len(coeffs) != phi:
            raise ValueError(f"need {phi} coefficients, got {len(coeffs)}")
        self.p = p
        self.m = m
        self.coeffs = tuple(Fraction(c) for c in coeffs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p: int, m: int) -> "CycNumber":
        phi = (p - 1) * p ** (m - 1)
        return cls(p, m, [_ZERO] * phi)

    @classmethod
    def one(cls, p: int, m: int) -> "CycNumber":
        return cls.rational(p, m, _ONE)

    @classmethod
    def rational(cls, p: int, m: int, x) -> "CycNumber":
        phi = (p - 1) * p ** (m - 1)
        return cls(p, m, [Fraction(x)] + [_ZERO] * (phi - 1))

    @classmethod
    def root(cls, p: int, m: int, e: int) -> "CycNumber":
        """zeta^e, reduced into the power basis."""
        phi = (p - 1) * p ** (m - 1)
        co = [_ZERO] * phi
        _acc(co, p, p**m, e, _ONE)
        return cls(p, m, co)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "CycNumber"):
        if (self.p, self.m) != (other.p, other.m):
            raise ValueError("mixed conductors")

    def __add__(self, other: "CycNumber") -> "CycNumber":
        self._check(other)
        return CycNumber(self.p, self.m,
                         [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "CycNumber") -> "CycNumber":
        self._check(other)
        return CycNumber(self.p, self.m,
                         [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "CycNumber":
        return CycNumber(self.p, self.m, [-a for a in self.coeffs])

    def scale(self, x) -> "CycNumber":
        x = Fraction(x)
        return CycNumber(self.p, self.m, [a * x for a in self.coeffs])

    def __mul__(self, other: "CycNumber") -> "CycNumber":
        self._check(other)
        n = self.p**self.m
        co = [_ZERO] * len(self.coeffs)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        _acc(co, self.p, n, i + j, a * b)
        return CycNumber(self.p, self.m, co)

    def mul_root(self, e: int) -> "CycNumber":
        """Multiply by zeta^e (a basis rotation, cheaper than full mul)."""
        n = self.p**self.m
        co = [_ZERO] * len(self.coeffs)
        for i, a in enumerate(self.coeffs):
            if a:
                _acc(co, self.p, n, i + e, a)
        return CycNumber(self.p, self.m, co)

    def galois(self, t: int) -> "CycNumber":
        """Apply the automorphism zeta -> zeta^t, gcd(t, p) = 1."""
        if t % self.p == 0:
            raise ValueError("not a unit exponent")
        n = self.p**self.m
        co = [_ZERO] * len(self.coeffs)
        for i, a in enumerate(self.coeffs):
            if a:
                _acc(co, self.p, n, i * t, a)
        return CycNumber(self.p, self.m, co)

    def conj(self) -> "CycNumber":
        """Complex conjugation zeta -> zeta^(-1)."""
        return self.galois(self.p**self.m - 1)

    def inverse(self) -> "CycNumber":
        """Exact inverse via the product of Galois conjugates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = self.p**self.m
        prod = CycNumber.one(self.p, self.m)
        for t in range(2, n):
            if t % self.p != 0:
                prod = prod * self.galois(t)
        norm = self * prod
        if not norm.is_rational():
            raise ArithmeticError("norm failed to be rational")
        return prod.scale(1 / norm.coeffs[0])

    # -- predicates and views ----------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        return (isinstance(other, CycNumber)
                and (self.p, self.m) == (other.p, other.m)
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.p, self.m, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"

    def serialize(self) -> str:
        return f"{self.p ** self.m}:" + ",".join(str(c) for c in self.coeffs)


def cyc_embed(v: QpModZp, p: int, m: int) -> CycNumber:
    """The embedding psi: a/p^l in Q_p/Z_p -> zeta_{p^M}^(a*p^(M-l))."""
    if v.p != p:
        raise ValueError("prime mismatch")
    if v.level > m:
        raise ValueError(f"level {v.level} exceeds conductor exponent {m}")
    return CycNumber.root(p, m, v.numerator * p ** (m - v.level))


def embed_exponent(v: QpModZp, m: int) -> int:
    """Exponent e with psi(v) = zeta^e; the fast scalar for monomial maps."""
    if v.level > m:
        raise ValueError(f"level {v.level} exceeds conductor exponent {m}")
    return v.numerator * v.p ** (m - v.level) % v.p**m
