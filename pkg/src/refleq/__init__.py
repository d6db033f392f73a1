"""refleq: Green's-function solvers, sign theory, and involution
transforms for first-order linear differential equations with reflection
of the argument,

    x'(t) + a(t) x(-t) + b(t) x(t) = h(t),

under initial conditions (constant coefficients) or periodic boundary
conditions (variable coefficients).
"""

from .core import (BvpProblem, CaseTag, CaseVariant, GreenKernel, IvpProblem,
                   ParityPair, ScalarField, as_field, classify_bvp,
                   classify_ivp, oriented_indicator, parity_split)
from .errors import (CannotShootError, ContractionGateError, ConvergenceError,
                     DegenerateProblemError, DomainError, EvalDomainError,
                     NonUniqueSolutionError, ParseError, QuadratureError,
                     RefleqError, ResonanceError, UnsupportedCaseError,
                     VerificationError)
from .ivp import (BandRule, HomogeneousPair, SignReport, WedgeRule,
                  alt_solve_c31, alt_solve_c32, c2_sign_threshold,
                  eta_threshold, green_ivp, green_ivp_assembled,
                  homogeneous_pair, sign_classify_ivp, solve_ivp,
                  uniqueness_check)
from .bvp import (PhasorForm, Primitives, SignVerdict, SolutionFamily,
                  bound_F, build_primitives, constant_sign_check,
                  contraction_constant, green_bvp_c3, green_bvp_constant,
                  green_bvp_nonconstant, green_ode_periodic,
                  harmonic_periodic_green, homogeneous_bvp_solution,
                  hyperbolic_phasor, sigma_threshold, solve_bvp,
                  solve_mixed_picard, solve_resonant_c4, solve_resonant_c5,
                  solve_with_kernel)
from .involution import (CorrespondenceMap, GeneralProblem, Involution,
                         change_involution, correspondence_map,
                         reflection_reduction, solve_general,
                         verify_involution)
from .numerics import (Grid, antiderivative_field, central_difference,
                       integrate, oracle_bvp_shooting, oracle_ivp,
                       residual_check, spline_field)

__version__ = "0.1.0"

__all__ = [
    "ScalarField", "ParityPair", "IvpProblem", "BvpProblem", "CaseTag",
    "CaseVariant", "GreenKernel", "as_field", "parity_split",
    "oriented_indicator", "classify_ivp", "classify_bvp",
    "HomogeneousPair", "homogeneous_pair", "uniqueness_check", "green_ivp",
    "green_ivp_assembled", "solve_ivp", "alt_solve_c31", "alt_solve_c32",
    "eta_threshold", "c2_sign_threshold", "sign_classify_ivp", "SignReport",
    "WedgeRule", "BandRule",
    "Primitives", "build_primitives", "harmonic_periodic_green",
    "green_bvp_constant", "green_bvp_c3", "homogeneous_bvp_solution",
    "green_bvp_nonconstant", "solve_with_kernel", "solve_bvp",
    "sigma_threshold", "PhasorForm", "hyperbolic_phasor", "SignVerdict",
    "constant_sign_check", "SolutionFamily", "solve_resonant_c4",
    "solve_resonant_c5", "green_ode_periodic", "bound_F",
    "contraction_constant", "solve_mixed_picard",
    "Involution", "GeneralProblem", "verify_involution", "CorrespondenceMap",
    "correspondence_map", "change_involution", "reflection_reduction",
    "solve_general",
    "Grid", "integrate", "antiderivative_field", "central_difference",
    "residual_check", "oracle_ivp", "oracle_bvp_shooting", "spline_field",
    "RefleqError", "DomainError", "UnsupportedCaseError",
    "NonUniqueSolutionError", "DegenerateProblemError", "ResonanceError",
    "QuadratureError", "ConvergenceError", "ContractionGateError",
    "CannotShootError", "ParseError", "EvalDomainError", "VerificationError",
]
