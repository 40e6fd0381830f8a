"""Parameter sequences: the n-dependent coefficient data of a mapping.

A ParameterSequence is declarative and field-free, so the same description
can be realized over several witness primes.  Exact scalars are ints,
Fractions, or "a/b" strings; the marker {"random": "label"} draws a nonzero
element deterministically from (seed, label), and the lazy "random" kind
draws per index from (seed, label, n) so evaluation order cannot matter.

The structured kind stores the multiplicative solution shape
    z_n = base * ratio^n * alternating^(n * (-1)^n) * prod_m rho_m(n),
with each rho_m a short table of exact period m.  Solution builders keep the
product over a period equal to 1 (no constant term), matching how a secular
prefactor absorbs any constant.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Union

Scalar = Union[int, Fraction, str, dict]


def parse_scalar(v: Scalar):
    """Normalise a manifest scalar: int | Fraction | 'a/b' | {'random': label}."""
    if isinstance(v, bool):
        raise TypeError("booleans are not exact scalars")
    if isinstance(v, (int, Fraction)):
        return v
    if isinstance(v, str):
        if "/" in v:
            n, d = v.split("/", 1)
            return Fraction(int(n), int(d))
        return int(v)
    if isinstance(v, dict) and set(v) == {"random"}:
        return RandomMarker(str(v["random"]))
    raise TypeError(f"not an exact scalar: {v!r}")


@dataclass(frozen=True)
class RandomMarker:
    label: str


def _draw(field, seed: int, label: str, n=None) -> int:
    rng = random.Random(f"{seed}|{label}|{n}")
    return field.coerce(rng.randrange(1, field.p if field.p else 10**9))


def _resolve(field, v, seed: int, label: str):
    if isinstance(v, RandomMarker):
        return _draw(field, seed, v.label, None)
    return field.coerce(v)


@dataclass(frozen=True)
class ParameterSequence:
    """Declarative sequence; call .realize(field, seed) to evaluate."""

    kind: str  # constant | geometric | table | structured | random
    value: Scalar | None = None
    base: Scalar | None = None
    ratio: Scalar | None = None
    alternating: Scalar | None = None
    periodic: tuple[tuple[Scalar, ...], ...] = ()
    values: tuple[tuple[int, Scalar], ...] = ()
    label: str = "seq"

    @classmethod
    def constant(cls, value: Scalar, label: str = "const") -> ParameterSequence:
        return cls(kind="constant", value=parse_scalar(value), label=label)

    @classmethod
    def geometric(cls, base: Scalar, ratio: Scalar, label: str = "geom") -> ParameterSequence:
        return cls(kind="geometric", base=parse_scalar(base), ratio=parse_scalar(ratio),
                   label=label)

    @classmethod
    def table(cls, values: dict[int, Scalar], label: str = "table") -> ParameterSequence:
        items = tuple(sorted((int(k), parse_scalar(v)) for k, v in values.items()))
        return cls(kind="table", values=items, label=label)

    @classmethod
    def random(cls, label: str) -> ParameterSequence:
        return cls(kind="random", label=label)

    @classmethod
    def structured(cls, base: Scalar = 1, ratio: Scalar = 1, alternating: Scalar | None = None,
                   periodic: tuple[tuple[Scalar, ...], ...] = (),
                   label: str = "structured") -> ParameterSequence:
        per = tuple(tuple(parse_scalar(v) for v in tab) for tab in periodic)
        return cls(kind="structured", base=parse_scalar(base), ratio=parse_scalar(ratio),
                   alternating=None if alternating is None else parse_scalar(alternating),
                   periodic=per, label=label)

    def realize(self, field, seed: int = 0) -> RealizedSequence:
        lab = self.label
        if self.kind == "constant":
            c = _resolve(field, self.value, seed, lab)
            return RealizedSequence(field, lambda n: c, describe=f"{lab}=const")
        if self.kind == "geometric":
            b = _resolve(field, self.base, seed, lab + ".base")
            r = _resolve(field, self.ratio, seed, lab + ".ratio")
            return RealizedSequence(field, lambda n: field.mul(b, field.pow(r, n)),
                                    describe=f"{lab}=geometric")
        if self.kind == "table":
            tab = {k: _resolve(field, v, seed, f"{lab}[{k}]") for k, v in self.values}

            def from_table(n: int):
                if n not in tab:
                    raise KeyError(f"{lab}: index {n} outside the stored table")
                return tab[n]

            return RealizedSequence(field, from_table, describe=f"{lab}=table")
        if self.kind == "random":
            return RealizedSequence(field, lambda n: _draw(field, seed, lab, n),
                                    describe=f"{lab}=random")
        if self.kind == "structured":
            b = _resolve(field, self.base, seed, lab + ".base")
            r = _resolve(field, self.ratio, seed, lab + ".ratio")
            g = (None if self.alternating is None
                 else _resolve(field, self.alternating, seed, lab + ".alt"))
            tabs = [[_resolve(field, v, seed, f"{lab}.p{len(t)}[{i}]") for i, v in enumerate(t)]
                    for t in self.periodic]

            def structured_value(n: int):
                out = field.mul(b, field.pow(r, n))
                if g is not None:
                    out = field.mul(out, field.pow(g, n if n % 2 == 0 else -n))
                for t in tabs:
                    out = field.mul(out, t[n % len(t)])
                return out

            return RealizedSequence(field, structured_value, describe=f"{lab}=structured")
        raise ValueError(f"unknown sequence kind {self.kind!r}")


class RealizedSequence:
    """A sequence bound to a field: memoised raw values by integer index."""

    __slots__ = ("field", "_fn", "_cache", "describe")

    def __init__(self, field, fn, describe: str = ""):
        self.field = field
        self._fn = fn
        self._cache: dict[int, object] = {}
        self.describe = describe

    def __call__(self, n: int):
        if n not in self._cache:
            self._cache[n] = self._fn(n)
        return self._cache[n]

    def element(self, n: int):
        from .fields import FieldElement

        return FieldElement(self.field, self(n))

    def negated(self) -> RealizedSequence:
        return RealizedSequence(self.field, lambda n: self.field.neg(self(n)),
                                describe=f"-({self.describe})")

    @classmethod
    def from_callable(cls, field, fn, describe: str = "derived") -> RealizedSequence:
        return cls(field, fn, describe=describe)


def periodic_table(field, rng: random.Random, period: int) -> list:
    """Random period-m multiplicative table with product 1 over a period."""
    vals = [field.random_nonzero(rng) for _ in range(period - 1)]
    prod = field.coerce(1)
    for v in vals:
        prod = field.mul(prod, v)
    vals.append(field.inv(prod))
    return vals
