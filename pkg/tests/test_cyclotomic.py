from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitlab.arith import QpModZp
from orbitlab.cyclotomic import CycNumber, cyc_embed, embed_exponent


def test_power_basis_length():
    assert len(CycNumber.root(3, 2, 1).coeffs) == 6  # phi(9)
    assert len(CycNumber.root(5, 1, 1).coeffs) == 4
    assert len(CycNumber.root(7, 1, 3).coeffs) == 6


def test_root_of_unity_order():
    z = CycNumber.root(3, 2, 1)
    acc = CycNumber.one(3, 2)
    for _ in range(9):
        acc = acc * z
    assert acc == CycNumber.one(3, 2)
    # and no earlier power is 1
    acc = CycNumber.one(3, 2)
    for _ in range(8):
        acc = acc * z
        assert acc != CycNumber.one(3, 2)


def test_full_sum_vanishes():
    # 1 + zeta + ... + zeta^(n-1) = 0, the defining relation's consequence
    for p, m in ((3, 1), (3, 2), (5, 1), (7, 1)):
        n = p**m
        s = CycNumber.zero(p, m)
        for e in range(n):
            s = s + CycNumber.root(p, m, e)
        assert s.is_zero()


@given(st.integers(-30, 30), st.integers(-30, 30))
def test_root_exponent_addition(a, b):
    za, zb = CycNumber.root(3, 2, a), CycNumber.root(3, 2, b)
    assert za * zb == CycNumber.root(3, 2, a + b)
    assert za.mul_root(b) == CycNumber.root(3, 2, a + b)


@given(st.integers(-20, 20), st.integers(1, 8), st.integers(1, 8))
def test_galois_composition(e, s, t):
    z = CycNumber.root(3, 2, e).scale(Fraction(2, 7)) + CycNumber.one(3, 2)
    if s % 3 == 0 or t % 3 == 0:
        return
    assert z.galois(s).galois(t) == z.galois(s * t)
    assert z.galois(1) == z


def test_conj_on_roots():
    z = CycNumber.root(5, 1, 2)
    assert z.conj() == CycNumber.root(5, 1, -2)
    w = z + CycNumber.root(5, 1, 1).scale(3)
    assert w.conj().conj() == w


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3), min_size=4,
                max_size=4))
def test_inverse_is_two_sided(coeffs):
    x = CycNumber(5, 1, coeffs)
    if x.is_zero():
        with pytest.raises(ZeroDivisionError):
            x.inverse()
        return
    one = CycNumber.one(5, 1)
    assert x * x.inverse() == one
    assert x.inverse() * x == one


def test_rational_detection():
    x = CycNumber.rational(3, 1, Fraction(7, 2))
    assert x.is_rational() and x.rational_value() == Fraction(7, 2)
    z = CycNumber.root(3, 1, 1)
    assert not z.is_rational()
    with pytest.raises(ValueError):
        z.rational_value()
    # zeta + zeta^2 = -1 in Q(zeta_3): rationality after reduction
    s = CycNumber.root(3, 1, 1) + CycNumber.root(3, 1, 2)
    assert s.rational_value() == Fraction(-1)


def test_mixed_conductors_rejected():
    with pytest.raises(ValueError):
        CycNumber.one(3, 1) + CycNumber.one(3, 2)
    with pytest.raises(ValueError):
        CycNumber.one(3, 1) * CycNumber.one(5, 1)


def test_embedding_is_additive_to_multiplicative():
    # psi(u + v) = psi(u) psi(v) across mixed levels
    cases = [((1, 1), (1, 2)), ((2, 2), (4, 2)), ((1, 1), (8, 2))]
    for (anum, alev), (bnum, blev) in cases:
        u, v = QpModZp(3, anum, alev), QpModZp(3, bnum, blev)
        lhs = cyc_embed(u + v, 3, 2)
        rhs = cyc_embed(u, 3, 2) * cyc_embed(v, 3, 2)
        assert lhs == rhs


def test_embed_exponent_matches_embedding():
    for num in range(9):
        v = QpModZp(3, num, 2)
        e = embed_exponent(v, 2)
        assert cyc_embed(v, 3, 2) == CycNumber.root(3, 2, e)
    with pytest.raises(ValueError):
        embed_exponent(QpModZp(3, 1, 2), 1)


def test_serialize_shows_conductor():
    z = CycNumber.root(3, 2, 4).scale(Fraction(1, 3))
    text = z.serialize()
    assert text.startswith("9:")
    assert text.count(",") == 5
