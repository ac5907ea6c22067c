"""Numerical verification toolkit for orthotoric Kahler surface geometry."""

__version__ = "0.1.0"

from .chart import (ChartError, DomainError, Jet, OneForm, Point, ScalarField,
                    SingularMetricError, TwoForm, VectorField, eval_jet,
                    exterior_derivative, flat, lie_bracket, sharp)
from .curvature import (CurvaturePackage, TwoFormBasis, WeylSplit, christoffel,
                        eigenform_residual, ricci, riemann, scalar_curvature,
                        sym3_eigenvalues, weyl_split)
from .hermitian import (AlmostComplexStructure, IntegrabilityPredicates,
                        alpha_from_nabla_J, complex_structures,
                        integrability_predicates, kahler_forms, lee_form,
                        nijenhuis_norm, ricci_form_identity, special_frame,
                        structure_equation_residuals)
from .metrics import (DomainRect, FamilyError, FlatFamily, FramePackage,
                      HyperkahlerParams, MetricAtPoint, OrthotoricFamily,
                      OrthotoricParams, PerturbedOrthotoricFamily, flat_metric,
                      hyperkahler_parameters, hyperkahler_profiles,
                      orthotoric_frame, orthotoric_metric)
from .qch import (QCHSample, classify, holomorphic_curvature, qch_samples,
                  qch_spread)
from .symmetry import (HyperkahlerTriple, KillingCandidate,
                       find_holomorphic_structure, holomorphy_residual,
                       hyperkahler_triple, kahler_sphere, killing_residual,
                       phi_homomorphism, triholomorphic_scan)

__all__ = [name for name in dir() if not name.startswith("_")]
