"""Polynomial and rational-function tests: gcd against a resultant oracle,
fast multiplication against schoolbook, reduction invariants."""
import random
from fractions import Fraction

import pytest

from birmap.fields import DEFAULT_PRIME, PrimeField, QQ
from birmap.poly import Polynomial, RationalFunction, poly_gcd

P = 2013265921
F = PrimeField(P)


def rand_poly(field, degree, rng, monic=False):
    co = [field.random_nonzero(rng) if rng.random() < 0.8 else field.coerce(0)
          for _ in range(degree)]
    co.append(field.coerce(1) if monic else field.random_nonzero(rng))
    return Polynomial(field, co)


def schoolbook_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    fld = a.field
    if a.is_zero() or b.is_zero():
        return Polynomial.zero(fld)
    out = [fld.coerce(0)] * (a.degree() + b.degree() + 1)
    for i, ai in enumerate(a.co):
        for j, bj in enumerate(b.co):
            out[i + j] = fld.add(out[i + j], fld.mul(ai, bj))
    return Polynomial(fld, out)


def resultant(a: Polynomial, b: Polynomial):
    """Sylvester-matrix determinant by fraction-free elimination mod p."""
    fld = a.field
    m, n = a.degree(), b.degree()
    size = m + n
    rows = []
    for i in range(n):
        rows.append([fld.coerce(0)] * i + list(reversed(a.co))
                    + [fld.coerce(0)] * (size - i - m - 1))
    for i in range(m):
        rows.append([fld.coerce(0)] * i + list(reversed(b.co))
                    + [fld.coerce(0)] * (size - i - n - 1))
    det = fld.coerce(1)
    for c in range(size):
        piv = next((r for r in range(c, size) if rows[r][c] != 0), None)
        if piv is None:
            return fld.coerce(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = fld.neg(det)
        det = fld.mul(det, rows[c][c])
        inv = fld.inv(rows[c][c])
        for r in range(c + 1, size):
            if rows[r][c] != 0:
                f = fld.mul(rows[r][c], inv)
                rows[r] = [fld.sub(x, fld.mul(f, y)) for x, y in zip(rows[r], rows[c])]
    return det


def test_gcd_factor_extraction():
    x = Polynomial.x(F)
    one = Polynomial.constant(F, 1)
    assert poly_gcd(x * x - one, x - one) == (x - one)


def test_gcd_monomials():
    x = Polynomial.x(F)
    assert poly_gcd(x**3, x**2) == x**2


def test_gcd_of_random_polys_is_one_with_resultant_crosscheck():
    # dense uniform coefficients: a shared root has probability O(deg/p)
    rng = random.Random(11)
    for _ in range(5):
        a = Polynomial(F, [F.random_nonzero(rng) for _ in range(31)])
        b = Polynomial(F, [F.random_nonzero(rng) for _ in range(31)])
        g = poly_gcd(a, b)
        r = resultant(a, b)
        assert (g.degree() == 0) == (r != 0)
        assert g.degree() == 0


def test_gcd_with_planted_common_factor():
    rng = random.Random(13)
    for _ in range(5):
        c = rand_poly(F, 4, rng, monic=True)
        a = rand_poly(F, 10, rng) * c
        b = rand_poly(F, 9, rng) * c
        g = poly_gcd(a, b)
        assert (g % c).is_zero()
        assert resultant(a, b) == 0


def test_gcd_with_zero_is_monic():
    rng = random.Random(5)
    a = rand_poly(F, 7, rng)
    g = poly_gcd(a, Polynomial.zero(F))
    assert g == a.monic() and g.leading() == 1


def test_multiplication_matches_schoolbook_oracle():
    rng = random.Random(3)
    for deg in (5, 31, 64):
        a = rand_poly(F, deg, rng)
        b = rand_poly(F, deg, rng)
        assert a * b == schoolbook_mul(a, b)
    # same for a 61-bit modulus (generic path)
    G = PrimeField(DEFAULT_PRIME)
    a = rand_poly(G, 64, rng)
    b = rand_poly(G, 40, rng)
    assert a * b == schoolbook_mul(a, b)


def test_divmod_roundtrip_and_fast_path():
    rng = random.Random(23)
    for deg_a, deg_b in ((80, 13), (200, 57), (40, 41)):
        a = rand_poly(F, deg_a, rng)
        b = rand_poly(F, deg_b, rng)
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.is_zero() or r.degree() < b.degree()


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        divmod(Polynomial.x(F), Polynomial.zero(F))


def test_rational_field_gcd_subresultant():
    x = Polynomial.x(QQ)

    def c(v):
        return Polynomial.constant(QQ, Fraction(v))

    a = (x - c(1)) * (x - c(2)) * (x + c(Fraction(1, 3)))
    b = (x - c(2)) * (x + c(Fraction(1, 3))) * (x + c(7))
    g = poly_gcd(a, b)
    assert g == ((x - c(2)) * (x + c(Fraction(1, 3)))).monic()
    # coprime pair
    assert poly_gcd(x**2 + c(1), x - c(3)).degree() == 0


def test_polynomial_structure():
    x = Polynomial.x(F)
    p = x**3 - Polynomial.constant(F, 2) * x
    assert p.degree() == 3 and Polynomial.zero(F).degree() == -1
    assert p.evaluate(F.coerce(2)) == F.coerce(4)
    assert p.derivative() == Polynomial.constant(F, 3) * x * x - Polynomial.constant(F, 2)
    assert Polynomial.from_roots(F, [1, 2]) == (x - Polynomial.constant(F, 1)) * (
        x - Polynomial.constant(F, 2))


def test_rational_function_always_reduced():
    rng = random.Random(31)
    for _ in range(10):
        a = rand_poly(F, 8, rng)
        b = rand_poly(F, 6, rng, monic=True)
        c = rand_poly(F, 4, rng, monic=True)
        rf = RationalFunction(a * c, b * c)
        assert rf.is_reduced()
        assert poly_gcd(rf.num, rf.den).degree() == 0
        assert rf.den.leading() == 1
    combo = (RationalFunction(a, b) + RationalFunction(b, c)) * RationalFunction(c, a)
    assert combo.is_reduced()


def test_rational_function_degree_and_eval():
    x = Polynomial.x(F)
    rf = RationalFunction(x**2 - Polynomial.constant(F, 1), x)
    assert rf.degree() == 2
    assert rf.evaluate(F.coerce(2)) == F.div(F.coerce(3), F.coerce(2))
    with pytest.raises(ZeroDivisionError):
        rf.evaluate(F.coerce(0))
