"""The three linearisation schemes: parameter pencil, two-point reduction,
and the Gambier system in cascade.

All residuals are exact field elements; "satisfied" always means exactly
zero.  Orbits are supplied as plain lists of raw values with a base index,
so the same evaluators serve autonomous and deautonomised runs.

Scheme 1 (linear pencil): for the linear-growth family driven by a free
sequence q_n, the pencil

  (k + (q_n q_{n-1} - 1/(q_n q_{n-1}))^2) T+  -  (k - 2 + 1/(q_n q_{n-1})^2
   + 1/(q_n q_{n+1})^2) x_n  +  (k + (q_n q_{n+1} - 1/(q_n q_{n+1}))^2) T- = 0,

  T+ = (x_{n+1} Q+ - x_n)/(Q+^2 - 1),  Q+ = q_{n-1} q_n q_{n+1} q_{n+2},
  T- = (x_{n-1} Q- - x_n)/(Q-^2 - 1),  Q- = q_{n-2} q_{n-1} q_n q_{n+1},

is affine in k; on true orbits the extracted k is index-independent.

Scheme 2 (two-point reduction): with lam = (z^2 + 1/z^2)/2 the combination
C_n = (x_{n+1} - lam x_n)/(x_{n-1} - lam x_n) satisfies C_n C_{n+1} = 1, so
C_n = C^((-1)^n) and the orbit rolls out of a three-term linear recurrence.

Scheme 3 (Gambier cascade): the ratio variable y_n = x_{n+1}/x_n satisfies a
homographic three-point equation whose linearisation is the pair
w = (y y- + a y- + d)/(f y y- + a y- + 1),  w+ = (h w + k)/(w + m), with the
six coefficients explicit in q.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateStart, DegenerateZ, DenominatorZero, KUndefined
from .sequences import RealizedSequence


def _sq(F, a):
    return F.mul(a, a)


# ---------------------------------------------------------------------------
# scheme 1: the parameter pencil
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PencilInstance:
    k: object
    q: RealizedSequence


def _pencil_parts(q: RealizedSequence, xs: list, n: int, base: int):
    F = q.field
    x_m, x_0, x_p = xs[n - 1 - base], xs[n - base], xs[n + 1 - base]
    Qp = F.mul(F.mul(q(n - 1), q(n)), F.mul(q(n + 1), q(n + 2)))
    Qm = F.mul(F.mul(q(n - 2), q(n - 1)), F.mul(q(n), q(n + 1)))
    dp = F.sub(_sq(F, Qp), F.coerce(1))
    dm = F.sub(_sq(F, Qm), F.coerce(1))
    if dp == 0 or dm == 0:
        raise DenominatorZero("pencil shift denominator Q^2 - 1")
    Tp = F.div(F.sub(F.mul(x_p, Qp), x_0), dp)
    Tm = F.div(F.sub(F.mul(x_m, Qm), x_0), dm)
    u = F.mul(q(n), q(n - 1))
    v = F.mul(q(n), q(n + 1))
    s1 = _sq(F, F.sub(u, F.inv(u)))
    s2 = _sq(F, F.sub(v, F.inv(v)))
    s0 = F.add(F.coerce(-2), F.add(F.inv(_sq(F, u)), F.inv(_sq(F, v))))
    return Tp, Tm, s1, s2, s0, x_0


def thirdkind_k(q: RealizedSequence, xs: list, n: int, base: int = 0):
    """Extract the pencil parameter from an orbit triple; the pencil is affine in k."""
    F = q.field
    Tp, Tm, s1, s2, s0, x_0 = _pencil_parts(q, xs, n, base)
    den = F.add(F.sub(Tp, x_0), Tm)
    if den == 0:
        raise KUndefined(f"k coefficient vanishes at index {n}")
    num = F.add(F.sub(F.mul(s1, Tp), F.mul(s0, x_0)), F.mul(s2, Tm))
    return F.neg(F.div(num, den))


def pencil_residual(pencil: PencilInstance, xs: list, n: int, base: int = 0):
    """The pencil's left side at index n; exactly zero on matching orbits."""
    F = pencil.q.field
    Tp, Tm, s1, s2, s0, x_0 = _pencil_parts(pencil.q, xs, n, base)
    k = pencil.k
    return F.add(F.sub(F.mul(F.add(k, s1), Tp), F.mul(F.add(k, s0), x_0)),
                 F.mul(F.add(k, s2), Tm))


# ---------------------------------------------------------------------------
# scheme 2: two-point reduction of the saturating non-QRT family
# ---------------------------------------------------------------------------

def hky_lambda(field, z):
    """(z^2 + 1/z^2)/2."""
    F = field
    z2 = _sq(F, z)
    return F.div(F.add(z2, F.inv(z2)), F.coerce(2))


def hky_C(field, xs: list, lam, base: int = 0) -> list:
    """C_n = (x_{n+1} - lam x_n)/(x_{n-1} - lam x_n) along an orbit."""
    F = field
    out = []
    for i in range(1, len(xs) - 1):
        den = F.sub(xs[i - 1], F.mul(lam, xs[i]))
        if den == 0:
            raise DenominatorZero(f"x_(n-1) - lam x_n at index {base + i}")
        out.append(F.div(F.sub(xs[i + 1], F.mul(lam, xs[i])), den))
    return out


def _hky_forward(field, z, x, xm):
    """One step of  x+ x- - (2/(z^2+1/z^2)) x (x+ + x-) + x^2 - (z^2-1/z^2)^2 = 0."""
    F = field
    z2 = _sq(F, z)
    s = F.add(z2, F.inv(z2))
    r = F.div(F.coerce(2), s)
    d = _sq(F, F.sub(z2, F.inv(z2)))
    den = F.sub(xm, F.mul(r, x))
    if den == 0:
        raise DegenerateStart("initial pair sits on the reduction's degenerate line")
    num = F.sub(F.add(F.mul(F.mul(r, x), xm), d), _sq(F, x))
    return F.div(num, den)


def hky_reconstruct(field, z, x0, x1, steps: int) -> list:
    """Rebuild the orbit from one nonlinear step plus the linear recurrence.

    The alternating constant comes from the first triple; afterwards
    x_{n+1} = lam x_n + C_n (x_{n-1} - lam x_n) with C flipping to its
    inverse every step.
    """
    F = field
    z4 = F.pow(z, 4)
    if z4 == F.coerce(1):
        raise DegenerateStart("z^4 = 1 collapses the nonlinear family")
    lam = hky_lambda(F, z)
    x0, x1 = F.coerce(x0), F.coerce(x1)
    x2 = _hky_forward(F, z, x1, x0)
    den = F.sub(x0, F.mul(lam, x1))
    if den == 0:
        raise DegenerateStart("C undefined at the initial triple")
    C = F.div(F.sub(x2, F.mul(lam, x1)), den)
    out = [x0, x1, x2]
    for n in range(2, steps):
        C = F.inv(C)
        out.append(F.add(F.mul(lam, out[n]), F.mul(C, F.sub(out[n - 1], F.mul(lam, out[n])))))
    return out


def hky_gambier_residual(field, lam, yp, y, ym):
    """Autonomous ratio-variable equation:
    y+ y- y (y - lam) - lam y- (y^2 - 1) + lam y - 1."""
    F = field
    t1 = F.mul(F.mul(yp, ym), F.mul(y, F.sub(y, lam)))
    t2 = F.mul(F.mul(lam, ym), F.sub(_sq(F, y), F.coerce(1)))
    return F.add(F.sub(t1, t2), F.sub(F.mul(lam, y), F.coerce(1)))


# ---------------------------------------------------------------------------
# scheme 3: the Gambier cascade
# ---------------------------------------------------------------------------

def gambier_equation_residual(q: RealizedSequence, ys: list, n: int, base: int = 0):
    """The deautonomised ratio-variable equation at index n (exactly 0 on orbits)."""
    F = q.field
    yp, y, ym = ys[n + 1 - base], ys[n - base], ys[n - 1 - base]
    s = lambda m: _sq(F, q(m))
    one = F.coerce(1)
    t1 = F.mul(F.mul(F.mul(yp, ym), y), F.mul(q(n + 3), q(n + 2)))
    t1 = F.mul(t1, F.add(F.mul(s(n), s(n + 1)), one))
    t1 = F.mul(t1, F.sub(F.mul(s(n - 1), s(n + 1)), one))
    t1 = F.mul(t1, F.sub(F.mul(F.mul(F.add(s(n), s(n + 1)), q(n + 2)), y),
                         F.mul(q(n), F.add(F.mul(s(n + 2), s(n + 1)), one))))
    t2 = F.mul(ym, q(n + 1))
    inner = F.sub(
        F.mul(F.mul(F.mul(s(n + 2), F.sub(F.mul(s(n - 1), s(n + 1)), one)),
                    F.mul(F.add(F.mul(s(n), s(n + 1)), one),
                          F.add(F.mul(s(n), s(n + 3)), one))), _sq(F, y)),
        F.mul(F.mul(s(n), F.sub(F.mul(s(n + 1), s(n + 3)), one)),
              F.mul(F.add(F.mul(s(n + 2), s(n + 1)), one),
                    F.add(F.mul(s(n - 1), s(n + 2)), one))))
    t2 = F.mul(t2, inner)
    t3 = F.mul(F.mul(ym, y), F.mul(F.mul(q(n), q(n + 1)), q(n + 2)))
    t3 = F.mul(t3, F.add(
        F.mul(F.mul(F.sub(s(n + 3), s(n - 1)), F.add(one, F.mul(s(n), s(n + 1)))),
              F.add(one, F.mul(s(n + 1), s(n + 2)))),
        F.mul(F.mul(F.sub(s(n + 2), s(n)), F.sub(F.mul(s(n + 1), s(n - 1)), one)),
              F.sub(F.mul(s(n + 1), s(n + 3)), one))))
    t4 = F.mul(F.mul(q(n), q(n - 1)),
               F.mul(F.add(F.mul(s(n + 2), s(n + 1)), one),
                     F.sub(F.mul(s(n + 3), s(n + 1)), one)))
    t4 = F.mul(t4, F.sub(F.mul(F.mul(F.add(F.mul(s(n), s(n + 1)), one), q(n + 2)), y),
                         F.mul(q(n), F.add(s(n + 2), s(n + 1)))))
    return F.add(F.sub(F.sub(t1, t2), t3), t4)


@dataclass(frozen=True)
class GambierCoefficients:
    """Cascade coefficients at one index; h = d(next) and
    m = f(next)(k + d d(next)) - d hold by construction."""

    a: object
    d: object
    f: object
    h: object
    k: object
    m: object


def _gambier_a(q: RealizedSequence, n: int):
    F = q.field
    den = F.mul(q(n - 1), F.add(_sq(F, q(n + 1)), _sq(F, q(n + 2))))
    if den == 0:
        raise DenominatorZero("a: q_(n-1) (q_(n+1)^2 + q_(n+2)^2)")
    num = F.mul(q(n + 1), F.add(F.mul(_sq(F, q(n - 1)), _sq(F, q(n + 2))), F.coerce(1)))
    return F.neg(F.div(num, den))


def _gambier_d(q: RealizedSequence, n: int):
    F = q.field
    one = F.coerce(1)
    den = F.mul(F.mul(q(n + 2), q(n + 1)),
                F.mul(F.add(F.mul(_sq(F, q(n - 1)), _sq(F, q(n))), one),
                      F.add(_sq(F, q(n + 1)), _sq(F, q(n + 2)))))
    if den == 0:
        raise DenominatorZero("d: q_(n+2) q_(n+1) (q_(n-1)^2 q_n^2 + 1)(q_(n+1)^2 + q_(n+2)^2)")
    num = F.sub(
        F.mul(F.mul(q(n + 1), q(n + 2)),
              F.mul(F.add(_sq(F, q(n)), _sq(F, q(n + 1))),
                    F.add(F.mul(_sq(F, q(n - 1)), _sq(F, q(n + 2))), one))),
        F.mul(F.mul(q(n), q(n - 1)),
              F.mul(F.add(_sq(F, q(n + 1)), _sq(F, q(n + 2))),
                    F.add(F.mul(_sq(F, q(n + 1)), _sq(F, q(n + 2))), one))))
    return F.div(num, den)


def _gambier_f(q: RealizedSequence, n: int):
    F = q.field
    one = F.coerce(1)
    den = F.mul(F.mul(q(n), q(n - 1)),
                F.mul(F.add(_sq(F, q(n + 1)), _sq(F, q(n + 2))),
                      F.add(F.mul(_sq(F, q(n + 1)), _sq(F, q(n + 2))), one)))
    if den == 0:
        raise DenominatorZero("f: q_n q_(n-1) (q_(n+1)^2 + q_(n+2)^2)(q_(n+1)^2 q_(n+2)^2 + 1)")
    num = F.mul(F.mul(q(n + 1), q(n + 2)),
                F.mul(F.sub(F.mul(_sq(F, q(n - 1)), _sq(F, q(n + 1))), one),
                      F.sub(_sq(F, q(n + 2)), _sq(F, q(n)))))
    return F.div(num, den)


def _gambier_k(q: RealizedSequence, n: int):
    F = q.field
    one = F.coerce(1)
    d_n = _gambier_d(q, n)
    d_next = _gambier_d(q, n + 1)
    den = F.mul(F.mul(q(n + 2), q(n + 3)),
                F.mul(F.sub(F.mul(_sq(F, q(n - 1)), _sq(F, q(n + 1))), one),
                      F.add(F.mul(_sq(F, q(n + 1)), _sq(F, q(n))), one)))
    if den == 0:
        raise DenominatorZero("k: q_(n+2) q_(n+3) (q_(n-1)^2 q_(n+1)^2 - 1)(q_(n+1)^2 q_n^2 + 1)")
    extra = F.div(
        F.mul(F.mul(q(n), q(n + 1)),
              F.mul(F.sub(F.mul(_sq(F, q(n + 1)), _sq(F, q(n + 3))), one),
                    F.add(F.mul(_sq(F, q(n - 1)), _sq(F, q(n + 2))), one))), den)
    return F.add(F.neg(F.mul(d_n, d_next)), F.mul(F.sub(one, d_n), extra))


def gambier_coefficients(q: RealizedSequence, n: int) -> GambierCoefficients:
    """All six cascade coefficients at index n, with the two defining
    identities re-asserted."""
    F = q.field
    a = _gambier_a(q, n)
    d = _gambier_d(q, n)
    f = _gambier_f(q, n)
    h = _gambier_d(q, n + 1)
    k = _gambier_k(q, n)
    m = F.sub(F.mul(_gambier_f(q, n + 1), F.add(k, F.mul(d, h))), d)
    # h and m are definitionally tied; recompute both ways and compare
    if h != _gambier_d(q, n + 1):
        raise ArithmeticError("h != d(n+1)")
    if m != F.sub(F.mul(_gambier_f(q, n + 1), F.add(k, F.mul(d, _gambier_d(q, n + 1)))), d):
        raise ArithmeticError("m identity failed")
    return GambierCoefficients(a, d, f, h, k, m)


def gambier_w(coeffs: GambierCoefficients, F, y, ym):
    """w = (y y- + a y- + d)/(f y y- + a y- + 1)."""
    den = F.add(F.add(F.mul(F.mul(coeffs.f, y), ym), F.mul(coeffs.a, ym)), F.coerce(1))
    if den == 0:
        raise DenominatorZero("w denominator")
    num = F.add(F.add(F.mul(y, ym), F.mul(coeffs.a, ym)), coeffs.d)
    return F.div(num, den)


def gambier_verify(q: RealizedSequence, ys: list, base: int = 0) -> bool:
    """Does w built from the y-orbit obey w+ = (h w + k)/(w + m) at every index?"""
    F = q.field
    lo = base + 1
    hi = base + len(ys) - 2
    coeffs = {n: gambier_coefficients(q, n) for n in range(lo, hi + 1)}
    w = {n: gambier_w(coeffs[n], F, ys[n - base], ys[n - 1 - base])
         for n in range(lo, hi + 1)}
    for n in range(lo, hi):
        den = F.add(w[n], coeffs[n].m)
        if den == 0:
            raise DenominatorZero("w recursion denominator")
        expected = F.div(F.add(F.mul(coeffs[n].h, w[n]), coeffs[n].k), den)
        if w[n + 1] != expected:
            return False
    return True


def gambier_qrt_form(z: RealizedSequence, xs: list, base: int = 0) -> list:
    """Residuals of the symmetrised form after y_n = x_n/(z_n - 1/z_n):

    (y+ + y)(y + y-) = (z+^2 z^2 - 1)(z-^2 z^2 - 1) /
                       (z^2 (z+^2 - 1)(z-^2 - 1)) * (y^2 + 1).
    """
    F = z.field
    one = F.coerce(1)

    def y_of(n):
        zv = z(n)
        d = F.sub(zv, F.inv(zv))
        if d == 0:
            raise DegenerateZ(f"z_n = +-1 at index {n}")
        return F.div(xs[n - base], d)

    out = []
    for n in range(base + 1, base + len(xs) - 1):
        yp, y, ym = y_of(n + 1), y_of(n), y_of(n - 1)
        lhs = F.mul(F.add(yp, y), F.add(y, ym))
        num = F.mul(F.sub(F.mul(_sq(F, z(n + 1)), _sq(F, z(n))), one),
                    F.sub(F.mul(_sq(F, z(n - 1)), _sq(F, z(n))), one))
        den = F.mul(_sq(F, z(n)), F.mul(F.sub(_sq(F, z(n + 1)), one),
                                        F.sub(_sq(F, z(n - 1)), one)))
        if den == 0:
            raise DegenerateZ(f"coefficient denominator vanishes at index {n}")
        out.append(F.sub(lhs, F.mul(F.div(num, den), F.add(_sq(F, y), one))))
    return out
