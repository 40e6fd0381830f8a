"""Built-in catalogue of the mapping families the toolkit analyses.

Core entries are the six autonomous candidates of the ratio ansatz
(g = f z^N with N in {0, +-2, +-4}), their integrable deautonomisations,
and the two constrained two-factor families whose parameter counts place
them with the E7 and E8 affine Weyl groups.  Extra entries (broken
constraints, non-integrable exponents) exist for negative controls and are
listed separately.

Golden degree tables are frozen here; every one is reproduced exactly by
the growth engine across witness primes before release.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from . import confinement
from .fields import PrimeField
from .invariants import InvariantCandidate, grid_from_dict
from .mapping import Mapping, MappingSpec, RHSSpec
from .sequences import ParameterSequence, RealizedSequence

GOLDEN_DEGREES = {
    "n0_plus": (0, 1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20),
    "n0_minus": (0, 1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20),
    "n2_plus": (0, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2),
    "n2_minus": (0, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2),
    "nm2": (0, 1, 2, 3, 6, 9, 12, 17, 22, 27, 34, 41, 48, 57),
    "n4": (0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1),
    "nm4": (0, 1, 1, 2, 3, 5, 6, 9, 11, 14, 17, 21, 24, 29, 33, 38),
}

_RANDOM_Z = ParameterSequence.constant({"random": "z"}, label="z")


def _ratio_spec(spec_id: str, N: int, f) -> MappingSpec:
    return MappingSpec(spec_id=spec_id, form="ratio", z=_RANDOM_Z, N=N, f=f,
                       rhs=RHSSpec.const_power())


# ---------------------------------------------------------------------------
# deautonomisation builders (free functions realized per field)
# ---------------------------------------------------------------------------

def _q_of(field, seed: int, label: str = "q") -> RealizedSequence:
    return ParameterSequence.random(label).realize(field, seed)


def build_thirdkind_deauto(field, seed: int = 0, *, violate: bool = False) -> Mapping:
    """Linear-growth family driven by a free q:
    z_n = q_{n+1} q_{n-1}, g_n = q_{n+2} q_{n-2} / q_n^2 (cubed when violated)."""
    F = field
    q = _q_of(F, seed)
    z = RealizedSequence.from_callable(F, lambda n: F.mul(q(n + 1), q(n - 1)), "z=q+q-")
    power = 3 if violate else 2

    def g_fn(n):
        return F.div(F.mul(q(n + 2), q(n - 2)), F.pow(q(n), power))

    g = RealizedSequence.from_callable(F, g_fn, "g")
    m = _derived_ratio_mapping(
        F, z, g, "thirdkind_deauto" + ("_broken" if violate else ""))
    m.q = q
    return m


def _explicit_g_polys(field, g: RealizedSequence):
    from .poly import Polynomial

    def g_polys(n):
        return Polynomial.constant(field, g(n)), Polynomial.constant(field, 1)

    return g_polys


def _ratio_step_fn(field, z: RealizedSequence, g: RealizedSequence):
    from .mapping import _ratio_bilinear, _step_from_bilinear
    from .poly import Polynomial

    def step_fn(n: int):
        gn = Polynomial.constant(field, g(n))
        gd = Polynomial.constant(field, 1)
        return _step_from_bilinear(*_ratio_bilinear(field, z(n - 1), z(n), z(n + 1), gn, gd))

    return step_fn


def _derived_ratio_mapping(field, z, g, spec_id: str) -> Mapping:
    m = Mapping(field, spec_id, "ratio", _ratio_step_fn(field, z, g), z=z, g=g)
    m.g_polys = _explicit_g_polys(field, g)
    return m


def build_hky_deauto(field, seed: int = 0) -> Mapping:
    """Non-QRT family deautonomised: z_n z_{n-1} = q_{n+1} q_{n-1},
    g_n = -q_{n+2} q_{n-1} / (q_{n+1} q_n)."""
    F = field
    q = _q_of(F, seed)
    z0 = F.coerce(random.Random(f"hkyz0|{seed}").randrange(2, F.p))
    cache = {0: z0}

    def z_fn(n):
        while n not in cache:
            known = sorted(cache)
            lo, hi = known[0], known[-1]
            if n > hi:
                cache[hi + 1] = F.div(F.mul(q(hi + 2), q(hi)), cache[hi])
            else:
                cache[lo - 1] = F.div(F.mul(q(lo + 1), q(lo - 1)), cache[lo])
        return cache[n]

    z = RealizedSequence.from_callable(F, z_fn, "z: z z- = q+ q-")

    def g_fn(n):
        return F.neg(F.div(F.mul(q(n + 2), q(n - 1)), F.mul(q(n + 1), q(n))))

    g = RealizedSequence.from_callable(F, g_fn, "g")
    m = _derived_ratio_mapping(F, z, g, "hky_deauto")
    m.q = q
    return m


def build_gambier_deauto(field, seed: int = 0) -> Mapping:
    """Saturating family with free z and g_n = z_{n+1} z_{n-1}."""
    F = field
    z = ParameterSequence.random("zfree").realize(F, seed)
    g = RealizedSequence.from_callable(F, lambda n: F.mul(z(n + 1), z(n - 1)), "g=z+z-")
    return _derived_ratio_mapping(F, z, g, "gambier_deauto")


def build_nm2_deauto(field, seed: int = 0, *, violate: bool = False) -> Mapping:
    """Quadratic-growth family deautonomised: g_n = 1/(z_{n+1} z_{n-1}) with
    z a structured solution of the nm2 constraint (a random table if violated)."""
    F = field
    rng = random.Random(f"nm2|{seed}")
    z = (ParameterSequence.random("zbad").realize(F, seed) if violate
         else confinement.solution_z(F, rng, "nm2"))
    g = RealizedSequence.from_callable(F, lambda n: F.inv(F.mul(z(n + 1), z(n - 1))), "g")
    return _derived_ratio_mapping(F, z, g, "nm2_deauto" + ("_broken" if violate else ""))


def build_nm4_deauto(field, seed: int = 0, *, violate: bool = False) -> Mapping:
    """g_n = 1/(z_{n+1} z_n^2 z_{n-1}) with z solving the nm4 constraint."""
    F = field
    rng = random.Random(f"nm4|{seed}")
    z = (ParameterSequence.random("zbad4").realize(F, seed) if violate
         else confinement.solution_z(F, rng, "nm4"))

    def g_fn(n):
        return F.inv(F.mul(F.mul(z(n + 1), F.mul(z(n), z(n))), z(n - 1)))

    g = RealizedSequence.from_callable(F, g_fn, "g")
    return _derived_ratio_mapping(F, z, g, "nm4_deauto" + ("_broken" if violate else ""))


def build_twofactor(field, seed: int = 0, family: str = "nm2", *,
                    constrained: bool = True, autonomous: bool = False) -> Mapping:
    """Two-factor factorised mapping: constrained (the Painleve family),
    autonomous, or with generic unconstrained mu/lam as a negative control."""
    F = field
    rng = random.Random(f"twofactor|{family}|{seed}")
    kappa = F.random_nonzero(rng)
    if autonomous:
        zc = F.random_nonzero(rng)
        z = RealizedSequence.from_callable(F, lambda n: zc, "z=const")
        e = 2 if family == "nm2" else 3
        mu = RealizedSequence.from_callable(F, lambda n: F.mul(F.pow(zc, e), kappa), "mu")
        lam = RealizedSequence.from_callable(
            F, lambda n: F.div(F.pow(zc, e), kappa), "lam")
        return Mapping.factorised(F, z, mu, lam, spec_id=f"{family}_twofactor_autonomous")
    if constrained:
        z = confinement.solution_z(F, rng, family)
        period = 3 if family == "nm2" else 4
        from .sequences import periodic_table
        tau = periodic_table(F, rng, period)
        mu, lam = confinement.mu_lambda_solution(z, kappa, tau, family)
        return Mapping.factorised(F, z, mu, lam,
                                  spec_id=("pain_e7" if family == "nm2" else "pain_e8"))
    z = ParameterSequence.random("zg").realize(F, seed)
    mu = ParameterSequence.random("mug").realize(F, seed)
    lam = ParameterSequence.random("lamg").realize(F, seed)
    return Mapping.factorised(F, z, mu, lam, spec_id=f"{family}_twofactor_generic")


# ---------------------------------------------------------------------------
# invariant grids for the integrable cases
# ---------------------------------------------------------------------------

def qrt_invariant_nm2(field, z) -> InvariantCandidate:
    """Symmetric biquadratic ratio conserved by the N=-2, f=1 mapping:
    (x+y)(xy + z^4 - z^2 - 1/z^2 + 1/z^4) over
    (x z^2 - y)(x - z^2 y) + (z^4 - 1)^2/z^2."""
    F = field
    z2 = F.mul(z, z)
    z4 = F.mul(z2, z2)
    s = F.add(F.sub(F.sub(z4, z2), F.inv(z2)), F.inv(z4))
    num = grid_from_dict(F, 2, {(2, 1): 1, (1, 2): 1, (1, 0): s, (0, 1): s})
    den = _shared_denominator_grid(F, z)
    return InvariantCandidate(F, num, den, symmetric=True)


def qrt_invariant_nm4(field, z) -> InvariantCandidate:
    """(x^2 + (z^2-1/z^2)^2)(y^2 + (z^2-1/z^2)^2) over the same denominator."""
    F = field
    z2 = F.mul(z, z)
    s2 = F.pow(F.sub(z2, F.inv(z2)), 2)
    num = grid_from_dict(F, 2, {(2, 2): 1, (2, 0): s2, (0, 2): s2, (0, 0): F.mul(s2, s2)})
    den = _shared_denominator_grid(F, z)
    return InvariantCandidate(F, num, den, symmetric=True)


def _shared_denominator_grid(field, z):
    F = field
    z2 = F.mul(z, z)
    z4 = F.mul(z2, z2)
    return grid_from_dict(F, 2, {
        (2, 0): z2, (0, 2): z2, (1, 1): F.neg(F.add(z4, F.coerce(1))),
        (0, 0): F.div(F.pow(F.sub(z4, F.coerce(1)), 2), z2)})


def hky_invariant(field, z) -> InvariantCandidate:
    """The squared non-biquadratic ratio conserved by the N=0, f=-1 mapping
    (power 2; the stored grids are the square root's halves)."""
    F = field
    z2 = F.mul(z, z)
    lam2 = F.add(z2, F.inv(z2))  # z^2 + 1/z^2
    s2 = F.pow(F.sub(z2, F.inv(z2)), 2)
    num = grid_from_dict(F, 2, {
        (2, 0): 1, (0, 2): 1, (1, 1): F.neg(F.div(F.coerce(4), lam2)), (0, 0): F.neg(s2)})
    den = grid_from_dict(F, 2, {
        (2, 0): 1, (0, 2): 1, (1, 1): F.neg(lam2), (0, 0): s2})
    return InvariantCandidate(F, num, den, symmetric=True, power=2)


# ---------------------------------------------------------------------------
# the catalogue proper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogueEntry:
    name: str
    description: str
    build: object  # (field, seed) -> Mapping
    growth: str
    golden: tuple[int, ...] | None = None
    core: bool = True
    tags: tuple[str, ...] = ()


def _spec_builder(spec: MappingSpec):
    def build(field, seed: int = 0) -> Mapping:
        return spec.realize(field, seed)

    build.spec_id = spec.spec_id
    return build


_AUTONOMOUS = {
    "n0_plus": (_ratio_spec("n0_plus", 0, 1), "linear",
                "linear growth; linearisable through a parameter pencil"),
    "n0_minus": (_ratio_spec("n0_minus", 0, -1), "linear",
                 "linear growth; conserved quantity is a squared ratio (HKY family)"),
    "n2_plus": (_ratio_spec("n2_plus", 2, 1), "bounded",
                "saturating growth; the QRT-Gambier mapping"),
    "n2_minus": (_ratio_spec("n2_minus", 2, -1), "bounded",
                 "saturating growth; sign of f absorbed by the gauge"),
    "nm2": (_ratio_spec("nm2", -2, 1), "quadratic",
            "quadratic growth; biquadratic QRT invariant"),
    "n4": (_ratio_spec("n4", 4, 1), "bounded",
           "explicitly a linear three-term equation; trivially integrable"),
    "nm4": (_ratio_spec("nm4", -4, 1), "quadratic",
            "quadratic growth; biquadratic QRT invariant"),
}

CATALOGUE: dict[str, CatalogueEntry] = {}

for _name, (_spec, _growth, _desc) in _AUTONOMOUS.items():
    CATALOGUE[_name] = CatalogueEntry(
        name=_name, description=_desc, build=_spec_builder(_spec), growth=_growth,
        golden=GOLDEN_DEGREES.get(_name), tags=("autonomous",))

CATALOGUE["thirdkind_deauto"] = CatalogueEntry(
    "thirdkind_deauto",
    "free-function deautonomisation of n0_plus; degree growth unchanged",
    build_thirdkind_deauto, "linear", GOLDEN_DEGREES["n0_plus"], tags=("deauto",))
CATALOGUE["hky_deauto"] = CatalogueEntry(
    "hky_deauto",
    "free-function deautonomisation of n0_minus; linearised via the Gambier cascade",
    build_hky_deauto, "linear", GOLDEN_DEGREES["n0_minus"], tags=("deauto",))
CATALOGUE["gambier_deauto"] = CatalogueEntry(
    "gambier_deauto",
    "free-z deautonomisation of n2_plus; symmetrises to the Gambier mapping",
    build_gambier_deauto, "bounded", GOLDEN_DEGREES["n2_plus"], tags=("deauto",))
CATALOGUE["nm2_deauto"] = CatalogueEntry(
    "nm2_deauto",
    "constrained deautonomisation of nm2 (discrete Painleve; 4 visible parameters)",
    build_nm2_deauto, "quadratic", GOLDEN_DEGREES["nm2"], tags=("deauto",))
CATALOGUE["nm4_deauto"] = CatalogueEntry(
    "nm4_deauto",
    "constrained deautonomisation of nm4 (discrete Painleve; 4 visible parameters)",
    build_nm4_deauto, "quadratic", GOLDEN_DEGREES["nm4"], tags=("deauto",))
CATALOGUE["pain_e7"] = CatalogueEntry(
    "pain_e7",
    "two-factor family containing nm2_deauto; 7 parameters (E7-associated)",
    lambda field, seed=0: build_twofactor(field, seed, "nm2"),
    "quadratic", GOLDEN_DEGREES["nm2"], tags=("painleve",))
CATALOGUE["pain_e8"] = CatalogueEntry(
    "pain_e8",
    "two-factor family containing nm4_deauto; 8 parameters (E8-associated)",
    lambda field, seed=0: build_twofactor(field, seed, "nm4"),
    "quadratic", GOLDEN_DEGREES["nm4"], tags=("painleve",))

# negative controls and non-integrable exponents (not part of the core listing)
for _name, _N, _f in (("n1", 1, 1), ("n3", 3, 1), ("n6", 6, 1),
                      ("n0_f2", 0, 2), ("n4_minus", 4, -1), ("nm4_minus", -4, -1)):
    CATALOGUE[_name] = CatalogueEntry(
        _name, f"non-integrable control (N={_N}, f={_f}); exponential growth",
        _spec_builder(_ratio_spec(_name, _N, _f)), "exponential", core=False,
        tags=("control",))

CATALOGUE["thirdkind_deauto_broken"] = CatalogueEntry(
    "thirdkind_deauto_broken", "negative control: the free-function law violated",
    lambda field, seed=0: build_thirdkind_deauto(field, seed, violate=True),
    "exponential", core=False, tags=("control",))
CATALOGUE["nm2_deauto_broken"] = CatalogueEntry(
    "nm2_deauto_broken", "negative control: random z violating the nm2 constraint",
    lambda field, seed=0: build_nm2_deauto(field, seed, violate=True),
    "exponential", core=False, tags=("control",))
CATALOGUE["nm4_deauto_broken"] = CatalogueEntry(
    "nm4_deauto_broken", "negative control: random z violating the nm4 constraint",
    lambda field, seed=0: build_nm4_deauto(field, seed, violate=True),
    "exponential", core=False, tags=("control",))


def get_entry(name: str) -> CatalogueEntry:
    if name not in CATALOGUE:
        raise KeyError(f"unknown catalogue entry {name!r}; see `birmap catalogue`")
    return CATALOGUE[name]


def catalogue_rows(include_controls: bool = False) -> list[tuple[str, str, str]]:
    """(name, growth, description) rows, stable order."""
    rows = []
    for name, e in CATALOGUE.items():
        if e.core or include_controls:
            rows.append((name, e.growth, e.description))
    return rows
