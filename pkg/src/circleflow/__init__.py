"""Capacity flow of analytic circle diffeomorphisms.

Analytic circle maps, their conformal measures, Herglotz transforms, exterior
Riemann maps of invariant hulls, the flow ``Phi_t`` with its generator, and the
conformal radius identities of linearization domains.
"""
from .circlemap import (DIOPHANTINE_MENU, TOL_EVAL, AdmissibilityError, AnnulusError, CircleMap,
                        ConformalConjugacy, compose, estimate_rotation_number, make_linearizable, make_rotation)
from .config import RunConfig
from .confmap import (CurveError, ExteriorMap, JordanCurveSamples, MappingConvergenceError, Welding,
                      boundary_residual, exterior_map, welding)
from .flow import (FlowDomainError, FlowState, GeneratorField, Germ, backward_limit_check, generator,
                   germ_state, integrate_flow, loewner_measure, moebius_flow_oracle, phi_exact, sup_distance)
from .herglotz import (BoundaryValues, HerglotzField, ResolutionError, boundary_values, herglotz_eval,
                       poltoratski_reconstruct, positivity_probe)
from .measures import (CircleMeasure, ConvergenceError, conformal_measure_oracle, conformal_measure_solve,
                       pushforward, verify_conformal, weak_distance)
from .radius import RadiusTrace, radius_trace, verify_radius_identities

__version__ = "0.1.0"

__all__ = [
    "DIOPHANTINE_MENU", "TOL_EVAL", "AdmissibilityError", "AnnulusError", "CircleMap", "ConformalConjugacy",
    "compose", "estimate_rotation_number", "make_linearizable", "make_rotation",
    "RunConfig",
    "CurveError", "ExteriorMap", "JordanCurveSamples", "MappingConvergenceError", "Welding",
    "boundary_residual", "exterior_map", "welding",
    "FlowDomainError", "FlowState", "GeneratorField", "Germ", "backward_limit_check", "generator",
    "germ_state", "integrate_flow", "loewner_measure", "moebius_flow_oracle", "phi_exact", "sup_distance",
    "BoundaryValues", "HerglotzField", "ResolutionError", "boundary_values", "herglotz_eval",
    "poltoratski_reconstruct", "positivity_probe",
    "CircleMeasure", "ConvergenceError", "conformal_measure_oracle", "conformal_measure_solve",
    "pushforward", "verify_conformal", "weak_distance",
    "RadiusTrace", "radius_trace", "verify_radius_identities",
]
