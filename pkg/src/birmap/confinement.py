"""Singularity-confinement traces and deautonomisation constraints.

A trace perturbs the ancillary entry value, xi_{n0} = z_{n0} mu_{n0} + eps,
and iterates the two-factor mapping on truncated Laurent series in eps with
a generic second initial value c.  Entering the singularity freezes the
orbit: the eps^0 parts of the following iterates no longer depend on c.
Confinement means the dependence on c returns after finitely many steps;
the index through which the orbit re-emerges carries the exit factor's
value (z lam xi = 1 read in x), and the first index whose limit genuinely
moves with c sits one past it.  The c-dependence probe runs the trace twice
with two generic c values and compares eps^0 coefficients exactly.

The z sequences admitted by the two discrete-Painleve families satisfy
    nm2:  z_{n+4} z_{n-1} = z_{n+2} z_{n+1}
    nm4:  z_{n+5} z_{n+4} z_n z_{n-1} = z_{n+3} z_{n+2}^2 z_{n+1}
whose multiplicative general solutions carry a secular part, short periodic
parts, and (for nm4) the alternating factor gamma^(n(-1)^n).
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (ConstraintViolated, NoSingularityEntered, TruncationExhausted)
from .mapping import Mapping, ancillary_to_x
from .poly import Polynomial
from .sequences import RealizedSequence, periodic_table
from .series import TruncatedSeries

FAMILIES = ("nm2", "nm4")
CONSTRAINT_IDS = {"nm2": "z-constraint-nm2", "nm4": "z-constraint-nm4"}
PATTERN_LENGTH = {"nm2": 3, "nm4": 4}


# ---------------------------------------------------------------------------
# z constraints and their solutions
# ---------------------------------------------------------------------------

def constraint_residual(z: RealizedSequence, family: str, n: int):
    """LHS - RHS of the family's z constraint at index n, exactly."""
    F = z.field
    if family == "nm2":
        lhs = F.mul(z(n + 4), z(n - 1))
        rhs = F.mul(z(n + 2), z(n + 1))
    elif family == "nm4":
        lhs = F.mul(F.mul(z(n + 5), z(n + 4)), F.mul(z(n), z(n - 1)))
        rhs = F.mul(F.mul(z(n + 3), F.mul(z(n + 2), z(n + 2))), z(n + 1))
    else:
        raise ValueError(f"unknown family {family!r}")
    return F.sub(lhs, rhs)


@dataclass(frozen=True)
class ConstraintReport:
    constraint_id: str
    residuals: tuple[tuple[int, object], ...]
    satisfied: bool


def constraint_check_z(z: RealizedSequence, family: str,
                       index_range=range(0, 10)) -> ConstraintReport:
    """Exact residual table for the family constraint over the given indices."""
    rows = tuple((n, constraint_residual(z, family, n)) for n in index_range)
    return ConstraintReport(CONSTRAINT_IDS[family], rows,
                            all(r == 0 for _, r in rows))


def solution_z(field, rng: random.Random, family: str, *,
               trivial_periodic: bool = False) -> RealizedSequence:
    """A generic multiplicative solution of the family's z constraint."""
    F = field
    base = F.random_nonzero(rng)
    ratio = F.random_nonzero(rng)
    one = F.coerce(1)
    rho2 = [one, one] if trivial_periodic else periodic_table(F, rng, 2)
    rho3 = [one] * 3 if trivial_periodic else periodic_table(F, rng, 3)
    gamma = one if (family == "nm2" or trivial_periodic) else F.random_nonzero(rng)

    def value(n: int):
        out = F.mul(base, F.pow(ratio, n))
        if gamma != one:
            out = F.mul(out, F.pow(gamma, n if n % 2 == 0 else -n))
        out = F.mul(out, rho2[n % 2])
        return F.mul(out, rho3[n % 3])

    return RealizedSequence.from_callable(F, value, describe=f"z[{family}]")


def nm4_characteristic_polynomial(field) -> Polynomial:
    """k^6 + k^5 - k^4 - 2k^3 - k^2 + k + 1, the nm4 z-recurrence in log space."""
    return Polynomial(field, [1, 1, -1, -2, -1, 1, 1])


def characteristic_roots(field) -> dict:
    """Roots with multiplicity: {1: 2, -1: 2, j: 1, j^2: 1}; needs p = 1 mod 3.

    The reconstruction  prod (k - root)^mult  is asserted against the
    polynomial before returning, so the result is self-certifying.
    """
    F = field
    j = F.root_of_unity(3)
    roots = {F.coerce(1): 2, F.coerce(-1): 2, j: 1, F.mul(j, j): 1}
    rebuilt = Polynomial.constant(F, 1)
    x = Polynomial.x(F)
    for r, mult in roots.items():
        rebuilt = rebuilt * (x - Polynomial.constant(F, r)) ** mult
    if rebuilt != nm4_characteristic_polynomial(F):
        raise ArithmeticError("root reconstruction failed")  # not reachable for p = 1 mod 3
    return roots


def mu_lambda_solution(z: RealizedSequence, kappa, periodic: list, family: str, *,
                       check_range=range(0, 8)) -> tuple[RealizedSequence, RealizedSequence]:
    """The (mu, lam) pair solving the family's confinement constraints.

        nm2:  mu_n = z_{n-1} z_{n+1} tau(n) kappa,      tau period 3
        nm4:  mu_n = z_{n-1} z_n z_{n+1} tau(n) kappa,  tau period 4

    with lam the kappa- and tau-inverted partner.  The z constraint, the
    product relation, and the confinement constraints are all verified
    exactly on check_range before returning.
    """
    F = z.field
    period = 3 if family == "nm2" else 4
    if len(periodic) != period:
        raise ValueError(f"{family} needs a period-{period} table")
    prod = F.coerce(1)
    for v in periodic:
        prod = F.mul(prod, F.coerce(v))
    if prod != F.coerce(1):
        raise ValueError("periodic part must have product 1 over a period")
    tau = [F.coerce(v) for v in periodic]
    kap = F.coerce(kappa)

    report = constraint_check_z(z, family, check_range)
    if not report.satisfied:
        raise ConstraintViolated(f"z does not satisfy {report.constraint_id}")

    if family == "nm2":
        def mu_fn(n):
            return F.mul(F.mul(F.mul(z(n - 1), z(n + 1)), tau[n % 3]), kap)

        def lam_fn(n):
            return F.div(F.mul(z(n - 1), z(n + 1)), F.mul(tau[n % 3], kap))
    else:
        def mu_fn(n):
            return F.mul(F.mul(F.mul(z(n - 1), z(n)), F.mul(z(n + 1), tau[n % 4])), kap)

        def lam_fn(n):
            return F.div(F.mul(F.mul(z(n - 1), z(n)), z(n + 1)), F.mul(tau[n % 4], kap))

    mu = RealizedSequence.from_callable(F, mu_fn, describe=f"mu[{family}]")
    lam = RealizedSequence.from_callable(F, lam_fn, describe=f"lam[{family}]")
    _verify_mu_lam(z, mu, lam, family, check_range)
    return mu, lam


def _verify_mu_lam(z, mu, lam, family: str, rng: range) -> None:
    F = z.field
    for n in rng:
        if family == "nm2":
            prod_rel = F.sub(
                F.mul(F.mul(mu(n), lam(n)), F.mul(mu(n + 1), lam(n + 1))),
                F.pow(F.mul(F.mul(z(n + 2), z(n + 1)), F.mul(z(n), z(n - 1))), 2))
            gap = 3
            target = F.mul(F.pow(z(n + 2), 2), F.pow(z(n + 1), 2))
        else:
            prod_rel = F.sub(F.mul(mu(n), lam(n)),
                             F.pow(F.mul(F.mul(z(n + 1), z(n)), z(n - 1)), 2))
            gap = 4
            target = F.mul(F.mul(F.pow(z(n + 1), 2), F.pow(z(n + 2), 2)),
                           F.pow(z(n + 3), 2))
        c1 = F.sub(F.mul(mu(n), lam(n + gap)), target)
        c2 = F.sub(F.mul(lam(n), mu(n + gap)), target)
        if prod_rel != 0 or c1 != 0 or c2 != 0:
            raise ConstraintViolated(
                f"mu/lam solution fails its defining relations at n={n}")


def confinement_constraints_hold(z, mu, lam, family: str, index_range=range(0, 8)) -> bool:
    """Do mu, lam satisfy the family's confinement constraints on the range?"""
    F = z.field
    gap = PATTERN_LENGTH[family]
    for n in index_range:
        if family == "nm2":
            target = F.mul(F.pow(z(n + 2), 2), F.pow(z(n + 1), 2))
        else:
            target = F.mul(F.mul(F.pow(z(n + 1), 2), F.pow(z(n + 2), 2)),
                           F.pow(z(n + 3), 2))
        if F.mul(mu(n), lam(n + gap)) != target or F.mul(lam(n), mu(n + gap)) != target:
            return False
    return True


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    index: int
    valuation: int
    limit: object  # eps^0 coefficient, None when the iterate has a pole
    c_dependent: bool


@dataclass(frozen=True)
class SingularityPattern:
    entry: str
    pattern_length: int
    exit: str
    confined: bool
    memory_check: bool
    steps: tuple[TraceStep, ...]
    truncation_used: int


def _run_trace(mapping: Mapping, entry_value, n0: int, c, horizon: int,
               truncation: int) -> list[TruncatedSeries]:
    F = mapping.field
    if truncation < 2:
        raise TruncationExhausted("truncation order below 2 cannot carry the perturbation")
    xi0 = TruncatedSeries(F, 0, [entry_value, F.coerce(1)], truncation)
    x_cur = xi0 + xi0.invert()
    x_prev = TruncatedSeries.constant(F, ancillary_to_x(F, c), truncation)
    out = []
    for k in range(1, horizon + 1):
        step = mapping.step(n0 + k - 1)
        x_next = step.apply_series(x_cur, x_prev)
        # keep at least two known orders: with a single one the perturbation
        # becomes invisible and "unconfined" could be reported vacuously
        if x_next.truncation_order - max(0, x_next.valuation()) < 2:
            raise TruncationExhausted(f"lost all precision at index {n0 + k}")
        out.append(x_next)
        x_prev, x_cur = x_cur, x_next
    return out


def confinement_trace(mapping: Mapping, entry: str = "mu", n0: int = 3, *,
                      rng: random.Random | None = None, horizon: int = 8,
                      truncation: int = 12, max_truncation: int = 96) -> SingularityPattern:
    """Trace the singularity entered through the chosen factor at index n0.

    The truncation order is doubled and the trace re-run whenever precision
    runs out; TruncationExhausted is only raised past max_truncation.
    """
    if mapping.form != "factorised":
        raise ValueError("confinement traces need a factorised mapping")
    if entry not in ("mu", "lambda"):
        raise ValueError("entry must be 'mu' or 'lambda'")
    rng = rng or random.Random(0)
    F = mapping.field
    factor_seq = mapping.mu if entry == "mu" else mapping.lam
    other_seq = mapping.lam if entry == "mu" else mapping.mu
    entry_value = F.mul(mapping.z(n0), factor_seq(n0))
    if entry_value == 0 or F.mul(entry_value, entry_value) == F.coerce(1):
        raise NoSingularityEntered(f"entry factor value {entry_value} is degenerate")

    c1 = F.random_nonzero(rng)
    c2 = F.random_nonzero(rng)
    while ancillary_to_x(F, c2) == ancillary_to_x(F, c1):
        c2 = F.random_nonzero(rng)

    tr = truncation
    while True:
        try:
            run1 = _run_trace(mapping, entry_value, n0, c1, horizon, tr)
            run2 = _run_trace(mapping, entry_value, n0, c2, horizon, tr)
            break
        except TruncationExhausted:
            tr *= 2
            if tr > max_truncation:
                raise

    steps = []
    first_dependent = None
    for k, (s1, s2) in enumerate(zip(run1, run2), start=1):
        v1, v2 = s1.valuation(), s2.valuation()
        lim1, lim2 = s1.limit0(), s2.limit0()
        finite = v1 >= 0 and v2 >= 0
        dep = finite and lim1 != lim2
        steps.append(TraceStep(n0 + k, min(v1, v2), lim1, dep))
        if dep and first_dependent is None:
            first_dependent = n0 + k

    entry_desc = f"xi - z*{entry} vanishes at n0={n0}"
    if first_dependent is None:
        return SingularityPattern(entry_desc, horizon, "no exit within horizon",
                                  False, False, tuple(steps), tr)
    if first_dependent == n0 + 1:
        raise NoSingularityEntered(
            "first iterate already depends on the generic value; no memory was lost")
    exit_index = first_dependent - 1
    exit_value = run1[exit_index - n0 - 1].limit0()
    other_name = "lambda" if entry == "mu" else "mu"
    exit_target = F.mul(mapping.z(exit_index), other_seq(exit_index))
    if exit_target != 0 and exit_value == ancillary_to_x(F, exit_target):
        exit_desc = f"z*{other_name}*xi = 1 at index {exit_index}"
    else:
        exit_desc = f"exit at index {exit_index} (unrecognised factor)"
    return SingularityPattern(entry_desc, exit_index - n0, exit_desc, True, True,
                              tuple(steps), tr)


# ---------------------------------------------------------------------------
# parameter counting
# ---------------------------------------------------------------------------

def parameter_count(family: str, *, z_periodic: bool = True,
                    ancillary_periodic: bool = True, alternating: bool = True,
                    kappa: bool = True) -> int:
    """Effective parameters of the family's general solution.

    One secular constant always survives (the other is an index shift).  The
    z solution contributes its periodic parts -- for nm4 the period-2 part is
    absorbed into the period-4 ancillary table and only the alternating
    factor survives, as an effective period-2 contribution in the pair
    products.  kappa is the remaining ancillary constant.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    count = 1  # secular
    if family == "nm2":
        if z_periodic:
            count += 1 + 2  # period 2 and period 3 of z
        if ancillary_periodic:
            count += 2      # period 3 of mu/lam
    else:
        if alternating:
            count += 1      # gamma, an effective period-2 in pair products
        if z_periodic:
            count += 2      # period 3 of z; period 2 absorbed into the ancillary table
        if ancillary_periodic:
            count += 3      # period 4 of mu/lam
    if kappa:
        count += 1
    return count
