"""Exact-arithmetic workbench for finitely supported measures on the
naturals with an extra limit point, submeasure-generated ideals, and
certified reduction machinery between them.

Everything computes with exact rationals; every positive or negative
verdict carries replayable evidence, and anything outside the certified
rule tables is reported as undetermined rather than guessed.
"""

from .errors import (NikodymError, ParseError, ValidationError, EvalError,
                     MagnitudeOverflow, UnsupportedAsymptotics, EmptyMeasure,
                     HasPFAtom, UndefinedAt, OutOfGround, GroundTooLarge,
                     NotBlockStructured, BlockTooLarge, HorizonExhausted,
                     BoundedSubmeasure, MassMismatch, AtomTooLarge,
                     NormMismatch, AtomConditionFails, NonPositiveValue,
                     NormTooSmall, DominationFails, NotPseudoUnion,
                     NotFiniteToOne, DomainTooSmall, AllZeroPrefix,
                     HypothesisFails, ConditionFails, NotAnIdeal,
                     InconsistentVerdicts)
from .rat import parse_rational, format_rational
from .expr import (Expr, Env, EMPTY_ENV, parse_expr, render, eval_expr,
                   eval_int, cmp_exprs, subst_var)
from .measures import PF, FinMeasure, combine, require_omega_nonneg
from .sets import (SetSpec, FiniteSet, IntervalRule, IntervalUnion,
                   BlockSelect, Complement, Union, Intersect,
                   omega_complement, everything, is_finite_with_bound)
from .blocks import (BlockGenerator, UniformBlocks, ExplicitBlocks,
                     phi_blocks)
from .submeasures import (SubmeasureSpec, DensitySubmeasure,
                          SummableSubmeasure, MaxMerge, FiniteTable,
                          asymptotic_density, phi_d_generator,
                          eval_submeasure, interval_value, interval_search,
                          unboundedness_check, bounded_certificate,
                          nonpathology_defect, NonpathReport, PrefixSearch)
from .ideals import (IdealSpec, ExhIdeal, PhiOfIdeal, SimpleDensityIdeal,
                     summable_ideal, generator_of, membership,
                     MembershipVerdict, block_values)
from .sequences import (MeasureSeq, FilterContext, make_filter_context,
                        default_filter_context, frechet_context, verify_AN,
                        ANReport, ConditionVerdict, disjointify,
                        positive_to_AN, AN_to_positive, AN_to_density,
                        submeasure_to_AN, bjn_normalize)
from .classify import (ClassificationVerdict, classify_density,
                       classify_summable, classify_submeasure,
                       SimpleDensityResult, simple_density_check)
from .katetov import (ReductionTable, identity_reduction, transport,
                      TransportLog, build_reduction_density,
                      ReductionCertificate, phi_ideal, GrowthFunction,
                      reduce_to_phi, domination_reduction, kb_upgrade,
                      verify_reduction, VerificationReport, successor,
                      SuccessorResult, refute_reduction, RefutationWitness,
                      NoWitnessFound, tukey_map)
from .serialize import parse_spec, parse_obj, emit_obj

__version__ = "0.1.0"
