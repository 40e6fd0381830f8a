"""Truncated Laurent series in a perturbation variable.

A series is  sum_k  c[k] * eps^(order_offset + k)  with the leading
coefficient nonzero, known exactly for all exponents < truncation_order.
Truncation propagates pessimistically through arithmetic: multiplying by
eps^v shifts the horizon by v, inverting a series of valuation v costs 2v
orders.  Confinement traces watch valuations cross zero, so the bookkeeping
here is the load-bearing part.
"""
from __future__ import annotations

from .errors import ZeroSeries

DEFAULT_TRUNCATION = 12
_BIG = 10**9


class TruncatedSeries:
    __slots__ = ("field", "order_offset", "coefficients", "truncation_order")

    def __init__(self, field, order_offset: int, coefficients, truncation_order: int,
                 trusted: bool = False):
        if not trusted:
            coefficients = [field.coerce(c) for c in coefficients]
        while coefficients and coefficients[0] == 0:
            coefficients = coefficients[1:]
            order_offset += 1
        if order_offset < truncation_order:
            coefficients = coefficients[: truncation_order - order_offset]
        else:
            coefficients = []
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        if not coefficients:
            order_offset = truncation_order
        self.field = field
        self.order_offset = order_offset
        self.coefficients = coefficients
        self.truncation_order = truncation_order

    # -- constructors --

    @classmethod
    def constant(cls, field, c, truncation_order: int = DEFAULT_TRUNCATION) -> TruncatedSeries:
        return cls(field, 0, [c], truncation_order)

    @classmethod
    def eps(cls, field, truncation_order: int = DEFAULT_TRUNCATION) -> TruncatedSeries:
        return cls(field, 1, [field.coerce(1)], truncation_order, trusted=True)

    @classmethod
    def zero(cls, field, truncation_order: int = DEFAULT_TRUNCATION) -> TruncatedSeries:
        return cls(field, truncation_order, [], truncation_order, trusted=True)

    # -- structure --

    def is_zero(self) -> bool:
        """Identically zero up to the truncation order."""
        return not self.coefficients

    def valuation(self) -> int:
        """Lowest known exponent; truncation_order for a zero series."""
        return self.order_offset if self.coefficients else self.truncation_order

    def coefficient(self, k: int):
        """Coefficient of eps^k (zero if outside the stored window)."""
        if k >= self.truncation_order:
            raise ValueError(f"eps^{k} is beyond the truncation order")
        i = k - self.order_offset
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        return self.field.coerce(0)

    def limit0(self):
        """The eps -> 0 limit: coefficient of eps^0, or None on a pole."""
        if self.valuation() < 0:
            return None
        return self.coefficient(0)

    # -- arithmetic --

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        F = self.field
        tr = min(self.truncation_order, other.truncation_order)
        if self.is_zero():
            return TruncatedSeries(F, other.order_offset, list(other.coefficients), tr, trusted=True)
        if other.is_zero():
            return TruncatedSeries(F, self.order_offset, list(self.coefficients), tr, trusted=True)
        lo = min(self.order_offset, other.order_offset)
        hi = max(self.order_offset + len(self.coefficients),
                 other.order_offset + len(other.coefficients))
        out = [F.coerce(0)] * (hi - lo)
        for i, c in enumerate(self.coefficients):
            out[self.order_offset - lo + i] = c
        for i, c in enumerate(other.coefficients):
            j = other.order_offset - lo + i
            out[j] = F.add(out[j], c)
        return TruncatedSeries(F, lo, out, tr, trusted=True)

    def __neg__(self) -> TruncatedSeries:
        F = self.field
        return TruncatedSeries(F, self.order_offset, [F.neg(c) for c in self.coefficients],
                               self.truncation_order, trusted=True)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self + (-other)

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        F = self.field
        tr = min(self.truncation_order + other.valuation(),
                 other.truncation_order + self.valuation())
        if self.is_zero() or other.is_zero():
            return TruncatedSeries.zero(F, tr)
        a, b = self.coefficients, other.coefficients
        out = [F.coerce(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = F.add(out[i + j], F.mul(ai, bj))
        return TruncatedSeries(F, self.order_offset + other.order_offset, out, tr, trusted=True)

    def scale(self, c) -> TruncatedSeries:
        F = self.field
        c = F.coerce(c)
        if c == 0:
            return TruncatedSeries.zero(F, self.truncation_order)
        return TruncatedSeries(F, self.order_offset, [F.mul(a, c) for a in self.coefficients],
                               self.truncation_order, trusted=True)

    def invert(self) -> TruncatedSeries:
        """Multiplicative inverse; result offset is -valuation, horizon shrinks by 2v."""
        if self.is_zero():
            raise ZeroSeries("no nonzero coefficient below the truncation order")
        F = self.field
        v = self.order_offset
        n = self.truncation_order - v
        c = list(self.coefficients) + [F.coerce(0)] * (n - len(self.coefficients))
        lead_inv = F.inv(c[0])
        out = [F.coerce(0)] * n
        out[0] = lead_inv
        for k in range(1, n):
            acc = F.coerce(0)
            for j in range(1, k + 1):
                acc = F.add(acc, F.mul(c[j], out[k - j]))
            out[k] = F.neg(F.mul(lead_inv, acc))
        return TruncatedSeries(F, -v, out, self.truncation_order - 2 * v, trusted=True)

    def __truediv__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self * other.invert()

    def equal_to_truncation(self, other: TruncatedSeries) -> bool:
        return (self - other).is_zero()

    def __repr__(self) -> str:
        if self.is_zero():
            return f"O(eps^{self.truncation_order})"
        terms = [f"{c}*eps^{self.order_offset + i}"
                 for i, c in enumerate(self.coefficients) if c != 0]
        return " + ".join(terms) + f" + O(eps^{self.truncation_order})"


def evaluate_polynomial(poly, s: TruncatedSeries) -> TruncatedSeries:
    """Horner evaluation of a Polynomial at a series point.

    Constants are exact (_BIG horizon), so the chain of products alone
    determines how much precision survives.
    """
    F = s.field
    if not poly.co:
        return TruncatedSeries.zero(F, _BIG)
    acc = TruncatedSeries.constant(F, poly.co[-1], _BIG)
    for c in reversed(poly.co[:-1]):
        acc = acc * s + TruncatedSeries.constant(F, c, _BIG)
    return acc
