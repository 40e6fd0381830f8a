"""Dense univariate polynomials and reduced rational functions over a field.

Coefficients are stored lowest degree first, trimmed, as raw field values.
The zero polynomial has an empty list and degree() == -1 (the distinguished
sentinel).  RationalFunction keeps gcd(num, den) = 1 with a monic denominator
after every operation, so max(deg num, deg den) is the honest degree that
growth tracking relies on.

gcd runs the monic Euclidean algorithm over prime fields (with a vectorised
path for small moduli) and a content-stripped primitive remainder sequence
over the rationals, which keeps intermediate integers subresultant-sized.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd

from . import _fastpoly
from .fields import FieldElement, PrimeField, QQ

_FAST_MUL_CUTOFF = 48


class Polynomial:
    __slots__ = ("field", "co")

    def __init__(self, field, coeffs, trusted: bool = False):
        if not trusted:
            coeffs = [field.coerce(c) for c in coeffs]
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        self.field = field
        self.co = coeffs

    # -- constructors --

    @classmethod
    def zero(cls, field) -> Polynomial:
        return cls(field, [], trusted=True)

    @classmethod
    def constant(cls, field, c) -> Polynomial:
        c = field.coerce(c)
        return cls(field, [c] if c != 0 else [], trusted=True)

    @classmethod
    def x(cls, field) -> Polynomial:
        return cls(field, [field.coerce(0), field.coerce(1)], trusted=True)

    @classmethod
    def from_roots(cls, field, roots) -> Polynomial:
        out = cls.constant(field, 1)
        x = cls.x(field)
        for r in roots:
            out = out * (x - cls.constant(field, r))
        return out

    # -- structure --

    def degree(self) -> int:
        return len(self.co) - 1

    def is_zero(self) -> bool:
        return not self.co

    def leading(self):
        return self.co[-1] if self.co else self.field.coerce(0)

    def __getitem__(self, k: int):
        return self.co[k] if 0 <= k < len(self.co) else self.field.coerce(0)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Polynomial) and other.field == self.field
                and other.co == self.co)

    def __hash__(self):
        return hash((self.field, tuple(self.co)))

    # -- arithmetic --

    def _wrap(self, co) -> Polynomial:
        while co and co[-1] == 0:
            co.pop()
        return Polynomial(self.field, co, trusted=True)

    def __add__(self, other: Polynomial) -> Polynomial:
        F = self.field
        a, b = self.co, other.co
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = F.add(out[i], c)
        return self._wrap(out)

    def __sub__(self, other: Polynomial) -> Polynomial:
        F = self.field
        n = max(len(self.co), len(other.co))
        out = [F.coerce(0)] * n
        for i, c in enumerate(self.co):
            out[i] = c
        for i, c in enumerate(other.co):
            out[i] = F.sub(out[i], c)
        return self._wrap(out)

    def __neg__(self) -> Polynomial:
        F = self.field
        return Polynomial(self.field, [F.neg(c) for c in self.co], trusted=True)

    def __mul__(self, other: Polynomial) -> Polynomial:
        F = self.field
        a, b = self.co, other.co
        if not a or not b:
            return Polynomial.zero(F)
        if (isinstance(F, PrimeField) and _fastpoly.usable(F.p)
                and len(a) + len(b) > _FAST_MUL_CUTOFF):
            return Polynomial(F, _fastpoly.mul_mod(a, b, F.p), trusted=True)
        out = [F.coerce(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
        return self._wrap(out)

    def scale(self, c) -> Polynomial:
        F = self.field
        c = F.coerce(c)
        if c == 0:
            return Polynomial.zero(F)
        return Polynomial(F, [F.mul(a, c) for a in self.co], trusted=True)

    def shift(self, k: int) -> Polynomial:
        """Multiply by x^k."""
        if self.is_zero():
            return self
        zero = self.field.coerce(0)
        return Polynomial(self.field, [zero] * k + self.co, trusted=True)

    def __divmod__(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if isinstance(F, PrimeField) and _fastpoly.usable(F.p) and len(self.co) > _FAST_MUL_CUTOFF:
            q, r = _fastpoly.divmod_mod(self.co, other.co, F.p)
            return Polynomial(F, q, trusted=True), Polynomial(F, r, trusted=True)
        a = list(self.co)
        b = other.co
        db = len(b) - 1
        if len(a) - 1 < db:
            return Polynomial.zero(F), self
        inv_lead = F.inv(b[-1])
        q = [F.coerce(0)] * (len(a) - db)
        for k in range(len(a) - 1, db - 1, -1):
            c = a[k]
            if c != 0:
                c = F.mul(c, inv_lead)
                q[k - db] = c
                for i in range(db + 1):
                    a[k - db + i] = F.sub(a[k - db + i], F.mul(c, b[i]))
        return self._wrap(q), self._wrap(a[:db])

    def __floordiv__(self, other: Polynomial) -> Polynomial:
        return divmod(self, other)[0]

    def __mod__(self, other: Polynomial) -> Polynomial:
        return divmod(self, other)[1]

    def __pow__(self, e: int) -> Polynomial:
        out = Polynomial.constant(self.field, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    def monic(self) -> Polynomial:
        if self.is_zero() or self.leading() == self.field.coerce(1):
            return self
        return self.scale(self.field.inv(self.leading()))

    def derivative(self) -> Polynomial:
        F = self.field
        out = [F.mul(c, F.coerce(i)) for i, c in enumerate(self.co)][1:]
        return self._wrap(out)

    def evaluate(self, x):
        """Horner evaluation at a raw field value."""
        F = self.field
        acc = F.coerce(0)
        for c in reversed(self.co):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def __call__(self, x: FieldElement) -> FieldElement:
        return FieldElement(self.field, self.evaluate(self.field.coerce(x)))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(len(self.co) - 1, -1, -1):
            c = self.co[i]
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{c}")
            elif i == 1:
                terms.append(f"{c}*x" if c != 1 else "x")
            else:
                terms.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return " + ".join(terms)


def _gcd_prime(a: Polynomial, b: Polynomial) -> Polynomial:
    F = a.field
    if _fastpoly.usable(F.p) and max(len(a.co), len(b.co)) > _FAST_MUL_CUTOFF:
        return Polynomial(F, _fastpoly.gcd_mod(a.co, b.co, F.p), trusted=True)
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _gcd_rational(a: Polynomial, b: Polynomial) -> Polynomial:
    """Primitive PRS over Z after clearing denominators; monic result over Q."""

    def primitive(co: list[int]) -> list[int]:
        g = 0
        for c in co:
            g = int_gcd(g, c)
        if g in (0, 1):
            return co
        return [c // g for c in co]

    def to_int(p: Polynomial) -> list[int]:
        den = 1
        for c in p.co:
            den = den * c.denominator // int_gcd(den, c.denominator)
        return primitive([int(c * den) for c in p.co])

    def prem(A: list[int], B: list[int]) -> list[int]:
        # lead(B)^k * A mod B over Z, content stripped by the caller
        R = list(A)
        dB, lb = len(B) - 1, B[-1]
        while R and len(R) - 1 >= dB:
            c = R[-1]
            R = [ri * lb for ri in R[:-1]]
            for i in range(dB):
                R[len(R) - dB + i] -= c * B[i]
            while R and R[-1] == 0:
                R.pop()
        return R

    A, B = to_int(a), to_int(b)
    if len(A) < len(B):
        A, B = B, A
    while B:
        A, B = B, primitive(prem(A, B))
    return Polynomial(a.field, [Fraction(c) for c in A]).monic()


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor; gcd(a, 0) = monic(a)."""
    if a.field != b.field:
        raise ValueError("gcd of polynomials over different fields")
    if b.is_zero():
        return a.monic()
    if a.is_zero():
        return b.monic()
    if a.field == QQ:
        return _gcd_rational(a, b)
    return _gcd_prime(a, b)


class RationalFunction:
    """Reduced ratio num/den with monic den; the carrier for symbolic iterates."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial, reduce: bool = True):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            g = poly_gcd(num, den)
            if g.degree() > 0:
                num = num // g
                den = den // g
            lead_inv = den.field.inv(den.leading())
            num = num.scale(lead_inv)
            den = den.scale(lead_inv)
        self.num = num
        self.den = den

    @classmethod
    def constant(cls, field, c) -> RationalFunction:
        return cls(Polynomial.constant(field, c), Polynomial.constant(field, 1), reduce=False)

    @classmethod
    def seed(cls, field) -> RationalFunction:
        """The identity function t, used as the symbolic initial condition."""
        return cls(Polynomial.x(field), Polynomial.constant(field, 1), reduce=False)

    @property
    def field(self):
        return self.num.field

    def degree(self) -> int:
        return max(self.num.degree(), self.den.degree(), 0)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    def __sub__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(self.num * other.den - other.num * self.den,
                                self.den * other.den)

    def __mul__(self, other: RationalFunction) -> RationalFunction:
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: RationalFunction) -> RationalFunction:
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den, reduce=False)

    def __eq__(self, other) -> bool:
        return (isinstance(other, RationalFunction)
                and self.num == other.num and self.den == other.den)

    def evaluate(self, t):
        d = self.den.evaluate(t)
        if d == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.field.div(self.num.evaluate(t), d)

    def is_reduced(self) -> bool:
        return poly_gcd(self.num, self.den).degree() <= 0 and (
            self.den.leading() == self.field.coerce(1))

    def __repr__(self) -> str:
        return f"({self.num}) / ({self.den})"
