"""Degree sequences of symbolic iterates, growth classification, entropy.

The degree of the n-th iterate x_n(t) (reduced, x_0 a random constant,
x_1 = t) is computed over at least two witness primes and two random x_0
draws; only exact agreement across all runs is accepted.  Witness primes
default to two 31-bit moduli so the polynomial arithmetic stays on the
vectorised exact path; unlucky evaluations (an accidental cancellation
mod p, or an x_0 that hits a singular fiber) are retried with fresh draws.

Classification is exact integer pattern matching on difference sequences:
bounded means the degrees freeze, linear/quadratic mean the first/second
differences become periodic (burn-in 4, periods up to 6).  The entropy
estimate prefers an exact minimal linear recurrence fitted to the tail
(overdetermined, every row verified) whose characteristic spectral radius
gives the growth rate; degree sequences of polynomial growth have all
roots on the unit circle and report exactly 0.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import IdenticallySingular, TooShort, UnluckyEvaluation
from .fields import PrimeField
from .mapping import Mapping, MappingSpec

DEFAULT_WITNESS_PRIMES = (2013265921, 1811939329)
DEFAULT_N_MAX = 16
GOLDEN_N_MAX = 24
RATIO_THRESHOLD = 1.25
ENTROPY_TOLERANCE = 0.05


@dataclass(frozen=True)
class DegreeSequence:
    degrees: tuple[int, ...]
    spec_id: str
    prime_witnesses: tuple[int, ...]
    draws: int = 2

    def __len__(self) -> int:
        return len(self.degrees)


@dataclass(frozen=True)
class GrowthClass:
    kind: str  # bounded | linear | quadratic | exponential
    entropy_estimate: float
    fit_residual: Fraction
    provisional: bool = False


def _as_builder(spec):
    if isinstance(spec, MappingSpec):
        return spec.realize, spec.spec_id
    if callable(spec):
        return spec, getattr(spec, "spec_id", getattr(spec, "__name__", "mapping"))
    raise TypeError("need a MappingSpec or a (field, seed) -> Mapping builder")


def _one_run(builder, prime: int, seed: int, draw: int, n_max: int) -> tuple[int, ...]:
    field = PrimeField(prime)
    mapping = builder(field, seed)
    x0 = random.Random(f"x0|{seed}|{prime}|{draw}").randrange(2, prime)
    orbit = mapping.symbolic_orbit(x0, n_max)
    return tuple(r.degree() for r in orbit)


def degree_sequence(spec, n_max: int = DEFAULT_N_MAX, *,
                    primes: tuple[int, ...] = DEFAULT_WITNESS_PRIMES,
                    draws: int = 2, seed: int = 0,
                    max_retries: int = 3) -> DegreeSequence:
    """Degrees of x_0..x_{n_max}, identical across witness primes and draws."""
    builder, spec_id = _as_builder(spec)
    attempt = 0
    diagnostics: list[str] = []
    while attempt <= max_retries:
        runs: list[tuple[int, ...]] = []
        failed = False
        for prime in primes:
            for draw in range(draws):
                try:
                    runs.append(_one_run(builder, prime, seed, draw + attempt * draws, n_max))
                except (IdenticallySingular, ZeroDivisionError) as exc:
                    diagnostics.append(f"attempt {attempt} p={prime} draw={draw}: {exc}")
                    failed = True
                    break
            if failed:
                break
        if not failed:
            if all(r == runs[0] for r in runs[1:]):
                return DegreeSequence(runs[0], spec_id, tuple(primes), draws)
            diagnostics.append(f"attempt {attempt}: witness disagreement {runs}")
        attempt += 1
    raise UnluckyEvaluation(f"degree sequence for {spec_id} unstable: " + "; ".join(diagnostics))


def _degrees_of(seq) -> tuple[int, ...]:
    if isinstance(seq, DegreeSequence):
        return seq.degrees
    return tuple(seq)


def _eventually_periodic(vals: tuple[int, ...], burn: int, max_period: int) -> int | None:
    """Smallest period of vals[burn:], with at least three matched positions."""
    body = vals[burn:]
    for per in range(1, max_period + 1):
        if len(body) < per + 3:
            return None
        if all(body[i] == body[i + per] for i in range(len(body) - per)):
            return per
    return None


def _diffs(vals: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(b - a for a, b in zip(vals, vals[1:]))


def _recurrence_entropy(vals: tuple[int, ...]) -> float | None:
    """Entropy from an exact minimal linear recurrence on the tail, if one verifies.

    Every candidate order is solved exactly over Q and accepted only when all
    remaining rows check out, with at least two rows beyond the unknowns.
    """
    for start in (2, 3, 4):
        tail = [Fraction(v) for v in vals[start:]]
        max_order = min(8, (len(tail) - 2) // 2)
        for order in range(1, max_order + 1):
            rows = [(tail[i:i + order], tail[i + order])
                    for i in range(len(tail) - order)]
            if len(rows) < order + 2:
                continue
            coeffs = _solve_exact([list(reversed(r)) for r, _ in rows[:order]],
                                  [v for _, v in rows[:order]])
            if coeffs is None:
                continue
            ok = all(sum(c * x for c, x in zip(coeffs, reversed(r))) == v
                     for r, v in rows)
            if not ok:
                continue
            # characteristic polynomial k^L - c1 k^(L-1) - ... - cL
            companion = [1.0] + [-float(c) for c in coeffs]
            roots = np.roots(companion)
            radius = max(abs(r) for r in roots) if len(roots) else 1.0
            # repeated unit-circle roots perturb numerically by ~eps^(1/mult);
            # anything within 1e-4 of the circle is polynomial growth
            return math.log(radius) if radius > 1 + 1e-4 else 0.0
    return None


def _solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    n = len(A)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _tail_log_ratios(vals: tuple[int, ...]) -> list[float]:
    pos = [(a, b) for a, b in zip(vals, vals[1:]) if a > 0 and b > 0]
    k = max(3, len(pos) // 4)
    return [math.log(b / a) for a, b in pos[-k:]]


def entropy_estimate(seq) -> float:
    """Algebraic-entropy estimate: exact recurrence spectral radius when one
    verifies on the tail, otherwise the averaged tail log-ratio."""
    vals = _degrees_of(seq)
    if len(vals) < 8:
        raise TooShort(f"entropy estimate needs >= 8 terms, got {len(vals)}")
    exact = _recurrence_entropy(vals)
    if exact is not None:
        return exact
    ratios = _tail_log_ratios(vals)
    return sum(ratios) / len(ratios) if ratios else 0.0


def classify_growth(seq, *, burn: int = 4, max_period: int = 6) -> GrowthClass:
    """Exact pattern classification; provisional below 10 terms."""
    vals = _degrees_of(seq)
    n = len(vals)
    if n < 5:
        raise TooShort(f"classification needs >= 5 terms, got {n}")
    provisional = n < 10
    d1 = _diffs(vals)
    d2 = _diffs(d1)

    if all(v == 0 for v in d1[burn:]):
        return GrowthClass("bounded", 0.0, Fraction(0), provisional)
    per = _eventually_periodic(d1, burn, max_period)
    if per is not None and sum(d1[-per:]) > 0:
        return GrowthClass("linear", 0.0, Fraction(0), provisional)
    per = _eventually_periodic(d2, burn, max_period)
    if per is not None and sum(d2[-per:]) > 0:
        return GrowthClass("quadratic", 0.0, Fraction(0), provisional)

    ratios = [b / a for a, b in zip(vals, vals[1:]) if a > 0 and b > 0]
    streak = 0
    for r in ratios:
        streak = streak + 1 if r >= RATIO_THRESHOLD else 0
    consecutive_ok = streak >= 3
    violations = sum(1 for r in ratios[-6:] if r < RATIO_THRESHOLD)
    residual = Fraction(violations, max(1, len(ratios[-6:])))
    if n >= 8:
        entropy = entropy_estimate(vals)
    else:
        logs = _tail_log_ratios(vals)
        entropy = sum(logs) / len(logs) if logs else 0.0
    return GrowthClass("exponential", entropy, residual,
                       provisional or not consecutive_ok)


def growth_match(spec_a, spec_b, n_max: int = DEFAULT_N_MAX, *,
                 primes: tuple[int, ...] = DEFAULT_WITNESS_PRIMES,
                 seed: int = 0) -> bool:
    """True iff both degree sequences agree termwise up to n_max."""
    a = degree_sequence(spec_a, n_max, primes=primes, seed=seed)
    b = degree_sequence(spec_b, n_max, primes=primes, seed=seed)
    return a.degrees == b.degrees


def step_degree_bound_holds(mapping: Mapping, x0, n_max: int) -> bool:
    """d_{n+1} <= c*d_n + d_{n-1} with c the step's coefficient degree in x_n."""
    orbit = mapping.symbolic_orbit(mapping.field.coerce(x0), n_max)
    degs = [r.degree() for r in orbit]
    for n in range(1, n_max):
        c = mapping.step(n).coefficient_degree()
        if degs[n + 1] > c * degs[n] + degs[n - 1]:
            return False
    return True
