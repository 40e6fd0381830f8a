"""birmap: exact-arithmetic analysis of multiplicative birational mappings.

Degree growth and algebraic entropy, conserved-quantity verification and
search, singularity-confinement traces with truncated series, and the three
linearisation schemes (parameter pencil, two-point reduction, Gambier
cascade), all over prime fields or the rationals with no floating point in
any verdict.
"""
from .fields import DEFAULT_PRIME, FieldElement, PrimeField, QQ
from .poly import Polynomial, RationalFunction, poly_gcd
from .series import TruncatedSeries
from .sequences import ParameterSequence, RealizedSequence
from .mapping import (HomographicStep, Mapping, MappingSpec, RHSSpec,
                      ancillary_to_x, elementary_symmetric, iterate,
                      rhs_equivalence_check, solve_forward, substitute_y,
                      x_to_ancillary)
from .growth import (DegreeSequence, GrowthClass, classify_growth, degree_sequence,
                     entropy_estimate, growth_match)
from .invariants import (InvariantCandidate, SearchResult, check_invariant,
                         detect_squared_ratio, normalise_candidate, search_invariant)
from .confinement import (ConstraintReport, SingularityPattern, characteristic_roots,
                          confinement_trace, constraint_check_z, mu_lambda_solution,
                          parameter_count)
from .linearisation import (GambierCoefficients, PencilInstance, gambier_coefficients,
                            gambier_qrt_form, gambier_verify, hky_C, hky_reconstruct,
                            pencil_residual, thirdkind_k)
from .catalogue import CATALOGUE, get_entry

__version__ = "0.1.0"
