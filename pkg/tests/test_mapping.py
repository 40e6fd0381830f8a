"""Mapping-layer tests: solved steps against the named equivalent forms,
orbits, the ancillary substitution, and the product/symmetric RHS equivalence."""
import random

import pytest

from birmap.errors import DegenerateStep, NoBranch, SamplePoleHit, SingularOrbit
from birmap.fields import PrimeField
from birmap.mapping import (HomographicStep, Mapping, MappingSpec, RHSSpec,
                            ancillary_to_x, elementary_symmetric,
                            factorised_step_coefficients, homographic_rhs_step,
                            iterate, ratio_equation_value, rhs_equivalence_check,
                            rhs_equivalence_trials, solve_forward, substitute_y,
                            trihomographic_value, two_factor_product_value,
                            verify_step, x_to_ancillary)
from birmap.poly import Polynomial, RationalFunction
from birmap.sequences import ParameterSequence, RealizedSequence

P = 2013265921
F = PrimeField(P)
Z_RANDOM = ParameterSequence.constant({"random": "z"}, label="z")


def const_power_mapping(N, f, seed=1):
    spec = MappingSpec(spec_id=f"N{N}f{f}", form="ratio", z=Z_RANDOM, N=N, f=f,
                       rhs=RHSSpec.const_power())
    return spec.realize(F, seed)


def test_step_matches_qrt_gambier_form():
    """N=2, f=1 solves to (x+ + x)(x + x-) = (z + 1/z)^2 (x^2 + (z - 1/z)^2)."""
    m = const_power_mapping(2, 1)
    z = m.z(0)
    rng = random.Random(3)
    coeff = F.pow(F.add(z, F.inv(z)), 2)
    shift = F.pow(F.sub(z, F.inv(z)), 2)
    step = solve_forward(m, 5)
    for _ in range(10):
        x, xm = F.random_nonzero(rng), F.random_nonzero(rng)
        xp = step.apply_raw(x, xm)
        lhs = F.mul(F.add(xp, x), F.add(x, xm))
        rhs = F.mul(coeff, F.add(F.mul(x, x), shift))
        assert lhs == rhs


def test_step_matches_hky_form():
    """N=0, f=-1 solves to x+ x- - (2/(z^2+1/z^2)) x (x+ + x-) + x^2 - (z^2-1/z^2)^2 = 0."""
    m = const_power_mapping(0, -1)
    z2 = F.mul(m.z(0), m.z(0))
    lam2 = F.add(z2, F.inv(z2))
    d = F.pow(F.sub(z2, F.inv(z2)), 2)
    step = m.step(1)
    rng = random.Random(4)
    for _ in range(10):
        x, xm = F.random_nonzero(rng), F.random_nonzero(rng)
        xp = step.apply_raw(x, xm)
        res = F.add(F.sub(F.mul(xp, xm),
                          F.mul(F.div(F.coerce(2), lam2), F.mul(x, F.add(xp, xm)))),
                    F.sub(F.mul(x, x), d))
        assert res == 0


def test_fixed_orbit_at_unit_z():
    """z=1, N=2, f=1: substituting x_n = x_{n-1} = 1 solves 2(1+x) = 4."""
    spec = MappingSpec(spec_id="unitz", form="ratio",
                       z=ParameterSequence.constant(1), N=2, f=1,
                       rhs=RHSSpec.const_power())
    m = spec.realize(F, 0)
    orbit = iterate(m, 1, 1, 6)
    assert all(v == F.coerce(1) for v in orbit)


def test_identity_like_step_returns_previous():
    """The step x_{n+1} = x_{n-1} composed with f = t, g = const gives back g."""
    one = Polynomial.constant(F, 1)
    zero = Polynomial.zero(F)
    step = HomographicStep(a=one, b=zero, c=zero, d=one)
    f = RationalFunction.seed(F)
    g = RationalFunction.constant(F, 42)
    assert step.apply_symbolic(f, g) == g


def test_symbolic_step_degree_bound():
    m = const_power_mapping(-2, 1)
    orbit = m.symbolic_orbit(F.coerce(1234), 8)
    degs = [r.degree() for r in orbit]
    for n in range(1, 7):
        c = m.step(n).coefficient_degree()
        assert degs[n + 1] <= c * degs[n] + degs[n - 1]
    # every iterate stays reduced with monic denominator
    assert all(r.is_reduced() for r in orbit)


def test_n0_symbolic_degrees():
    m = const_power_mapping(0, 1)
    degs = [r.degree() for r in m.symbolic_orbit(F.coerce(99), 8)]
    assert degs == [0, 1, 2, 4, 6, 8, 10, 12, 14]


def test_verify_step_ratio_and_factorised():
    rng = random.Random(9)
    assert verify_step(const_power_mapping(-4, 1), 2, rng)
    assert verify_step(const_power_mapping(3, 1), 2, rng)  # non-integrable is legal
    m = _autonomous_twofactor("nm2", seed=5)
    assert verify_step(m, 3, rng)


def test_degenerate_step_raises():
    # z=1 with f=-1: the equation reads 1 = -1, which no step satisfies
    spec = MappingSpec(spec_id="bad", form="ratio", z=ParameterSequence.constant(1),
                       N=0, f=-1, rhs=RHSSpec.const_power())
    m = spec.realize(F, 0)
    with pytest.raises(DegenerateStep):
        m.step(1)


def test_numeric_orbit_singularity_reports_index():
    # x = 0 with the N=0,f=1 map: x+ = (x^2 - s)/x- is fine, but x- = 0 breaks
    m = const_power_mapping(0, 1)
    with pytest.raises(SingularOrbit) as err:
        m.orbit(0, 0, 4)
    assert err.value.index >= 1


def test_iterate_validates_steps():
    m = const_power_mapping(0, 1)
    with pytest.raises(ValueError):
        iterate(m, 1, 1, 0)


def test_elementary_symmetric_all_ones():
    vals = [F.coerce(1)] * 8
    Q = elementary_symmetric(F, vals)
    assert [int(q) for q in Q] == [8, 28, 56, 70, 56, 28, 8, 1]


def test_elementary_symmetric_with_zero():
    from math import comb

    vals = [F.coerce(0)] + [F.coerce(1)] * 7
    Q = elementary_symmetric(F, vals)
    assert [int(q) for q in Q] == [comb(7, k) for k in range(1, 9)]


def test_elementary_symmetric_matches_product_expansion():
    rng = random.Random(12)
    vals = [F.random_nonzero(rng) for _ in range(8)]
    Q = elementary_symmetric(F, vals)
    prod = Polynomial.from_roots(F, vals)  # prod (X - v_i)
    # coefficient of X^(8-k) is (-1)^k e_k
    for k in range(1, 9):
        want = F.mul(F.pow(F.coerce(-1), k), Q[k - 1])
        assert prod[8 - k] == want


def test_ancillary_round_trip():
    rng = random.Random(17)
    hits = 0
    for _ in range(40):
        xi = F.random_nonzero(rng)
        x = ancillary_to_x(F, xi)
        back, other = x_to_ancillary(F, x)
        assert back in (xi, F.inv(xi))
        assert F.mul(back, other) == F.coerce(1)
        assert ancillary_to_x(F, back) == x
        hits += 1
    assert hits == 40
    assert ancillary_to_x(F, F.coerce(1)) == F.coerce(2)
    assert ancillary_to_x(F, F.coerce(-1)) == F.coerce(-2)


def test_ancillary_no_branch():
    rng = random.Random(23)
    raised = False
    for _ in range(40):
        x = F.random_nonzero(rng)
        try:
            x_to_ancillary(F, x)
        except NoBranch:
            raised = True
            break
    assert raised


def test_substitute_y():
    m = const_power_mapping(0, -1)
    orbit = m.orbit(7, 11, 10)
    ys = substitute_y(F, orbit)
    assert all(F.mul(ys[i], orbit[i]) == orbit[i + 1] for i in range(len(ys)))
    const = [F.coerce(5)] * 6
    assert substitute_y(F, const) == [F.coerce(1)] * 5
    with pytest.raises(ZeroDivisionError):
        substitute_y(F, [F.coerce(1), F.coerce(0), F.coerce(2)])


def test_rhs_equivalence_200_points():
    rng = random.Random(31)
    agree, checked = rhs_equivalence_trials(F, rng, trials=200)
    assert (agree, checked) == (200, 200)


def test_rhs_equivalence_fails_with_perturbed_q3():
    rng = random.Random(37)
    agree, checked = rhs_equivalence_trials(F, rng, trials=30, perturb_q3=True)
    assert agree < checked // 2


def test_rhs_equivalence_symmetric_point():
    """xi = 1 (x = 2) with a reciprocal-closed parameter set: both right-hand
    sides equal 1 by symmetry (the fixed point of xi -> 1/xi is a base point
    of the pair equation, so the comparison is between the values)."""
    from birmap.mapping import symmetric_rhs_polynomials

    rng = random.Random(41)
    vals = [F.random_nonzero(rng) for _ in range(4)]
    a8 = vals + [F.inv(v) for v in vals]  # products z*mu^i form a reciprocal set
    xi = F.coerce(1)
    lhs = F.coerce(1)
    for a in a8:
        lhs = F.mul(lhs, F.div(F.sub(xi, a), F.sub(F.mul(a, xi), F.coerce(1))))
    assert lhs == F.coerce(1)
    zm, z0, zp = (F.random_nonzero(rng) for _ in range(3))
    gn, gd = symmetric_rhs_polynomials(F, zm, z0, zp, a8)
    prefactor = F.mul(F.mul(zp, F.mul(z0, z0)), zm)
    x = ancillary_to_x(F, xi)
    assert gn.evaluate(x) == F.mul(prefactor, gd.evaluate(x))


def test_rhs_equivalence_rejects_pole_samples():
    with pytest.raises(SamplePoleHit):
        rhs_equivalence_check(F, (F.coerce(0), F.coerce(1), F.coerce(1)),
                              [F.coerce(1)] * 8, F.coerce(2), F.coerce(3))


def test_trihomographic_identity_on_solutions():
    """The three-ratio product with crosswise pairing equals 1 exactly on
    solutions of the ratio form with the homographic RHS."""
    rng = random.Random(43)
    k_seq = [F.random_nonzero(rng) for _ in range(8)]
    z_seq = [F.random_nonzero(rng) for _ in range(10)]
    hits = 0
    for trial in range(40):
        n = rng.randrange(1, 8)
        z_triple = (z_seq[n - 1], z_seq[n], z_seq[n + 1])
        x, xm = F.random_nonzero(rng), F.random_nonzero(rng)
        try:
            xp = homographic_rhs_step(F, z_triple, k_seq[n], x, xm)
            val = trihomographic_value(F, z_triple, k_seq[n], xp, x, xm)
        except ZeroDivisionError:
            continue
        assert val == F.coerce(1)
        hits += 1
    assert hits >= 30


def test_gauge_sign_flip_maps_orbits_to_orbits():
    """Even-power RHS: negating every z and both seeds negates the orbit."""
    for N, f in ((0, 1), (0, -1), (-2, 1), (-4, 1), (2, 1)):
        m = const_power_mapping(N, f, seed=2)
        flipped = m.gauge_flipped()
        orbit = m.orbit(7, 13, 8)
        image = flipped.orbit(F.neg(F.coerce(7)), F.neg(F.coerce(13)), 8)
        assert image == [F.neg(v) for v in orbit]


# ---------------------------------------------------------------------------
# two-factor (factorised) form
# ---------------------------------------------------------------------------

def _autonomous_twofactor(family, seed=0):
    rng = random.Random(seed)
    zc = F.random_nonzero(rng)
    kap = F.random_nonzero(rng)
    e = 2 if family == "nm2" else 3
    z = RealizedSequence.from_callable(F, lambda n: zc)
    mu = RealizedSequence.from_callable(F, lambda n: F.mul(F.pow(zc, e), kap))
    lam = RealizedSequence.from_callable(F, lambda n: F.div(F.pow(zc, e), kap))
    m = Mapping.factorised(F, z, mu, lam, spec_id=f"{family}_auto")
    m.kappa = kap
    return m


@pytest.mark.parametrize("family", ["nm2", "nm4"])
def test_twofactor_matches_homographic_rhs(family):
    """The reduced two-factor step equals the ratio form with
    R(x) = (z^e1 x - z^4 kk)/(z^e3 x - kk), kk = kappa + 1/kappa."""
    m = _autonomous_twofactor(family, seed=7)
    z, kap = m.z(0), m.kappa
    kk = F.add(kap, F.inv(kap))
    rng = random.Random(1)
    step = m.step(2)
    for _ in range(10):
        x, xm = F.random_nonzero(rng), F.random_nonzero(rng)
        xp = step.apply_raw(x, xm)
        if family == "nm2":
            R = F.div(F.sub(F.mul(z, x), F.mul(F.pow(z, 4), kk)),
                      F.sub(F.mul(F.pow(z, 3), x), kk))
        else:
            R = F.div(F.sub(x, F.mul(F.pow(z, 4), kk)),
                      F.sub(F.mul(F.pow(z, 4), x), kk))
        assert ratio_equation_value(F, z, z, z, xp, x, xm) == R


@pytest.mark.parametrize("family,N", [("nm2", -2), ("nm4", -4)])
def test_twofactor_kappa_i_reduces_to_const_power(family, N):
    """kappa = i collapses the two-factor RHS to 1/z^|N| exactly."""
    rng = random.Random(8)
    zc = F.random_nonzero(rng)
    i_unit = F.root_of_unity(4)
    e = 2 if family == "nm2" else 3
    z = RealizedSequence.from_callable(F, lambda n: zc)
    mu = RealizedSequence.from_callable(F, lambda n: F.mul(F.pow(zc, e), i_unit))
    lam = RealizedSequence.from_callable(F, lambda n: F.div(F.pow(zc, e), i_unit))
    m = Mapping.factorised(F, z, mu, lam)
    zconst = ParameterSequence.constant(int(zc))
    plain = MappingSpec(spec_id="plain", form="ratio", z=zconst, N=N, f=1,
                        rhs=RHSSpec.const_power()).realize(F, 0)
    s1, s2 = m.step(1), plain.step(1)
    for _ in range(10):
        x, xm = F.random_nonzero(rng), F.random_nonzero(rng)
        assert s1.apply_raw(x, xm) == s2.apply_raw(x, xm)


def test_twofactor_branch_consistency():
    """Stepping in x then matching against the pair equation holds for both
    branches of the sampled ancillary value."""
    m = _autonomous_twofactor("nm2", seed=11)
    rng = random.Random(2)
    step = m.step(4)
    z, mu, lam = m.z(4), m.mu(4), m.lam(4)
    for _ in range(10):
        xi = F.random_nonzero(rng)
        x = ancillary_to_x(F, xi)
        xm = F.random_nonzero(rng)
        xp = step.apply_raw(x, xm)
        from birmap.mapping import factorised_pair_solve
        for branch in (xi, F.inv(xi)):
            rv = two_factor_product_value(F, z, mu, lam, branch)
            assert factorised_pair_solve(F, z, z, z, branch, xm, rv) == xp


def test_twofactor_coefficient_degrees_are_small():
    m = _autonomous_twofactor("nm4", seed=3)
    step = m.step(1)
    assert step.coefficient_degree() <= 3


def test_linear_equation_detection():
    assert const_power_mapping(4, 1).is_linear_equation()
    assert not const_power_mapping(-4, 1).is_linear_equation()
    assert not const_power_mapping(0, -1).is_linear_equation()


def test_mapping_spec_validation():
    with pytest.raises(ValueError):
        MappingSpec(spec_id="x", form="ratio", z=Z_RANDOM)  # no RHS
    with pytest.raises(ValueError):
        MappingSpec(spec_id="x", form="factorised", z=Z_RANDOM)  # no mu/lam
    with pytest.raises(ValueError):
        MappingSpec(spec_id="x", form="nope", z=Z_RANDOM)
