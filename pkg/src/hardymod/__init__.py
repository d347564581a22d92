"""Graded decompositions and invariance verification for truncated Hardy modules."""

__version__ = "0.1.0"

from .algebra import AxiomReport, Poly, check_axioms, parse_poly, poly_ord, unital_split
from .beurling import (ProjectionConsistencyError, SynthesisObstruction, SynthesisTrace,
                       TheoremVerdict, generator_criterion, partial_projection,
                       synthesize, verify_beurling)
from .corpus import (BUILTIN_NAMES, ExpectedVerdicts, Scenario, UscProbeReport,
                     blaschke_coeffs, blaschke_tail_bound, build_subspace, example,
                     fuzz_params, random_scenario, run_fuzz_case, usc_probe,
                     verify_scenario)
from .decomposition import (ElementDecomposition, GradedDecomposition,
                            LeadingBlockAnalysis, NotAMemberError,
                            analyze_leading_block, decompose_element,
                            decompose_subspace, order_from_components)
from .elements import (Element, Space, SpaceMismatchError, element_from_poly, inner,
                       linear_combine, mul_poly, norm)
from .grading import MonomialOrder, add_indices, degree, enumerate_monomials
from .properties import (FAIL, INCONCLUSIVE, PASS, PropertyReport, Witness,
                         has_full_projection, is_invariant,
                         is_near_inner_decomposition, is_near_inner_subspace,
                         is_weakly_near_inner, product_table)
from .subspaces import (ClosureResult, ContainmentError, SubspaceBasis,
                        complement_within, graded_slice, member, module_closure,
                        orthonormalize, project)
from .tolerances import DEFAULT, Tolerances

__all__ = [name for name in dir() if not name.startswith("_")]
