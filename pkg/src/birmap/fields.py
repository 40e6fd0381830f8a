"""Exact arithmetic carriers: prime fields Z/pZ and the rational field.

Elements are kept in canonical form throughout: residues in [0, p) for prime
fields, reduced Fraction with positive denominator for rationals.  Hot loops
elsewhere work on the raw representations through the field's scalar methods;
FieldElement is the ergonomic wrapper for formula-heavy code.

The default prime is 2^61 - 1.  Witness primes drawn for re-randomised checks
are 59-62 bits, so that an accidental cancellation mod p is persuasively
unlikely to repeat across two draws.
"""
from __future__ import annotations

import random
from fractions import Fraction

DEFAULT_PRIME = 2**61 - 1

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (covers every word-sized modulus)."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random, bits_low: int = 59, bits_high: int = 62,
                 residue: tuple[int, int] | None = None) -> int:
    """Random prime with bits_low..bits_high bits, optionally p = residue[1] mod residue[0]."""
    while True:
        bits = rng.randrange(bits_low, bits_high + 1)
        p = rng.randrange(1 << (bits - 1), 1 << bits) | 1
        if residue is not None:
            m, r = residue
            p += (r - p) % m
        if p.bit_length() >= bits_low and is_probable_prime(p):
            return p


class PrimeField:
    """The field Z/pZ with raw elements represented as ints in [0, p)."""

    __slots__ = ("p",)

    def __init__(self, p: int = DEFAULT_PRIME, check: bool = True):
        if check and not is_probable_prime(p):
            raise ValueError(f"{p} is not prime")
        if p == 2:
            raise ValueError("characteristic 2 is not supported")
        self.p = p

    # -- raw scalar ops (ints in, ints out) --

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in prime field")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def coerce(self, v) -> int:
        """Embed an int, Fraction, or FieldElement as a canonical residue."""
        if isinstance(v, FieldElement):
            if v.field is not self and v.field != self:
                raise ValueError("element from a different field")
            return v.v
        if isinstance(v, Fraction):
            return v.numerator % self.p * self.inv(v.denominator % self.p) % self.p
        if isinstance(v, int):
            return v % self.p
        raise TypeError(f"cannot embed {type(v).__name__} in GF({self.p})")

    def sqrt(self, a: int) -> int | None:
        """A square root of a, or None if a is a non-residue (Tonelli-Shanks)."""
        p = self.p
        a %= p
        if a == 0:
            return 0
        if pow(a, (p - 1) // 2, p) != 1:
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        # write p-1 = q * 2^s with q odd
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t, 0
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r

    def root_of_unity(self, k: int) -> int:
        """A primitive k-th root of unity; requires p = 1 mod k."""
        p = self.p
        if (p - 1) % k != 0:
            raise ValueError(f"GF({p}) has no primitive {k}-th root of unity")
        for g in range(2, 1000):
            w = pow(g, (p - 1) // k, p)
            # primitive iff w^(k/q) != 1 for every prime q | k
            if w == 1:
                continue
            ok = True
            for q in range(2, k + 1):
                if k % q == 0 and pow(w, k // q, p) == 1 and q < k:
                    ok = False
                    break
            if ok:
                return w
        raise RuntimeError("no generator found")  # unreachable for real primes

    def random_nonzero(self, rng: random.Random) -> int:
        return rng.randrange(1, self.p)

    # -- wrapper layer --

    def __call__(self, v) -> FieldElement:
        return FieldElement(self, self.coerce(v))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


class RationalField:
    """The field Q with raw elements represented as Fraction."""

    __slots__ = ()
    p = 0  # characteristic

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def sub(self, a: Fraction, b: Fraction) -> Fraction:
        return a - b

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a: Fraction, b: Fraction) -> Fraction:
        return a / b

    def pow(self, a: Fraction, e: int) -> Fraction:
        return a**e

    def coerce(self, v) -> Fraction:
        if isinstance(v, FieldElement):
            return v.v
        if isinstance(v, (int, Fraction)):
            return Fraction(v)
        raise TypeError(f"cannot embed {type(v).__name__} in Q")

    def sqrt(self, a: Fraction) -> Fraction | None:
        if a < 0:
            return None
        import math

        rn, rd = math.isqrt(a.numerator), math.isqrt(a.denominator)
        if rn * rn == a.numerator and rd * rd == a.denominator:
            return Fraction(rn, rd)
        return None

    def random_nonzero(self, rng: random.Random) -> Fraction:
        return Fraction(rng.randrange(1, 1000), rng.randrange(1, 1000))

    def __call__(self, v) -> FieldElement:
        return FieldElement(self, self.coerce(v))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, Fraction(0))

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, Fraction(1))

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("RationalField")

    def __repr__(self) -> str:
        return "QQ"


QQ = RationalField()


class FieldElement:
    """Immutable field element; arithmetic coerces ints and Fractions."""

    __slots__ = ("field", "v")

    def __init__(self, field, v):
        self.field = field
        self.v = v

    def _co(self, other):
        if isinstance(other, FieldElement):
            return other.v
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.v, self._co(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.v, self._co(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._co(other), self.v))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.v, self._co(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.v, self._co(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._co(other), self.v))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.v, e))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.v))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.v))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.v == other.v
        try:
            return self.v == self.field.coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.v))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"{self.v}"
