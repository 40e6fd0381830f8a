"""Growth tests: golden sequences, classification, entropy, growth matching."""
import math
import random

import pytest

from birmap.catalogue import GOLDEN_DEGREES, get_entry
from birmap.errors import TooShort, UnluckyEvaluation
from birmap.fields import DEFAULT_PRIME, PrimeField
from birmap.growth import (DEFAULT_WITNESS_PRIMES, DegreeSequence, classify_growth,
                           degree_sequence, entropy_estimate, growth_match,
                           step_degree_bound_holds)
from birmap.mapping import Mapping, MappingSpec, RHSSpec
from birmap.sequences import ParameterSequence

Z = ParameterSequence.constant({"random": "z"}, label="z")


def spec_of(N, f):
    return MappingSpec(spec_id=f"N{N}f{f}", form="ratio", z=Z, N=N, f=f,
                       rhs=RHSSpec.const_power())


@pytest.mark.parametrize("name", sorted(GOLDEN_DEGREES))
def test_golden_sequences(name):
    golden = GOLDEN_DEGREES[name]
    ds = degree_sequence(get_entry(name).build, len(golden) - 1)
    assert ds.degrees == golden
    assert len(ds.prime_witnesses) >= 2


def test_witness_primes_support_larger_modulus():
    """The same golden sequence over the 61-bit default prime."""
    ds = degree_sequence(get_entry("nm2").build, 13,
                         primes=(DEFAULT_PRIME, DEFAULT_WITNESS_PRIMES[0]))
    assert ds.degrees == GOLDEN_DEGREES["nm2"]


def test_seed_changes_draws_but_not_degrees():
    a = degree_sequence(spec_of(-4, 1), 12, seed=0)
    b = degree_sequence(spec_of(-4, 1), 12, seed=99)
    assert a.degrees == b.degrees


def test_classify_paper_verdicts():
    assert classify_growth([0, 1, 2, 2, 2, 2, 2, 2, 2, 2]).kind == "bounded"
    assert classify_growth([0, 1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20]).kind == "linear"
    assert classify_growth([0, 1, 2, 3, 6, 9, 12, 17, 22, 27, 34, 41, 48, 57]).kind == "quadratic"
    assert classify_growth(GOLDEN_DEGREES["nm4"]).kind == "quadratic"
    doubling = [0, 1] + [2**k for k in range(1, 10)]
    verdict = classify_growth(doubling)
    assert verdict.kind == "exponential" and verdict.entropy_estimate > 0.2


def test_classify_provisional_and_too_short():
    verdict = classify_growth([0, 1, 2, 2, 2, 2, 2])
    assert verdict.kind == "bounded" and verdict.provisional
    with pytest.raises(TooShort):
        classify_growth([0, 1, 2, 3])


def test_entropy_polynomial_cases_are_zero():
    for name in ("n0_plus", "nm2", "nm4", "n2_plus"):
        assert entropy_estimate(GOLDEN_DEGREES[name]) == 0.0


def test_entropy_fibonacci_is_log_golden_ratio():
    fib = [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
    h = entropy_estimate(fib)
    assert abs(h - math.log((1 + 5**0.5) / 2)) < 0.05


def test_entropy_exponential_cases_exceed_threshold():
    for N, f in ((1, 1), (5, 1), (0, 2), (4, -1), (-4, -1)):
        ds = degree_sequence(spec_of(N, f), 11)
        verdict = classify_growth(ds)
        assert verdict.kind == "exponential"
        assert verdict.entropy_estimate > 0.2
        assert not verdict.provisional


def test_entropy_requires_eight_terms():
    with pytest.raises(TooShort):
        entropy_estimate([0, 1, 2, 4, 8, 16, 32])


def test_growth_match_deautonomisations():
    for auto, deauto in (("n0_plus", "thirdkind_deauto"), ("n0_minus", "hky_deauto"),
                         ("nm2", "nm2_deauto"), ("nm4", "nm4_deauto")):
        assert growth_match(get_entry(auto).build, get_entry(deauto).build, 16)


def test_growth_match_self():
    assert growth_match(get_entry("nm2").build, get_entry("nm2").build, 10)


def test_broken_deautonomisations_diverge_quickly():
    for auto, broken in (("n0_plus", "thirdkind_deauto_broken"),
                         ("nm2", "nm2_deauto_broken"), ("nm4", "nm4_deauto_broken")):
        a = degree_sequence(get_entry(auto).build, 10)
        b = degree_sequence(get_entry(broken).build, 10)
        diverged = next((n for n, (x, y) in enumerate(zip(a.degrees, b.degrees))
                         if x != y), None)
        assert diverged is not None and diverged <= 10


def test_step_degree_bound():
    F = PrimeField(DEFAULT_WITNESS_PRIMES[0])
    for name in ("n0_plus", "nm2", "n1"):
        m = get_entry(name).build(F, 1)
        assert step_degree_bound_holds(m, 1234, 9)


def test_unlucky_evaluation_on_prime_dependent_builder():
    """A builder whose dynamics depends on the witness prime must be rejected."""

    def chameleon(field, seed):
        N = 0 if field.p == DEFAULT_WITNESS_PRIMES[0] else -2
        return spec_of(N, 1).realize(field, seed)

    with pytest.raises(UnluckyEvaluation):
        degree_sequence(chameleon, 8, max_retries=1)


def test_degree_sequence_dataclass():
    ds = degree_sequence(spec_of(0, 1), 6)
    assert isinstance(ds, DegreeSequence)
    assert ds.degrees[0] == 0 and ds.degrees[1] == 1
    assert len(ds) == 7
