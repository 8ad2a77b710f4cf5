"""Closed planar curves with radially prescribed curvature.

Classifies, counts, and reconstructs the closed and simple-closed
solution curves of kappa = f(|Z|) through an auxiliary planar
Hamiltonian flow, and re-certifies the algebraic inequalities behind
the monomial counting results in exact arithmetic.
"""

from .models import (
    CurvatureModel,
    PotentialEval,
    EXAMPLE_IDS,
    monomial,
    example,
    parse_model_spec,
    eval_f,
    eval_f_prime,
    eval_F,
    eval_F2,
    fixed_radius,
    potential_eval,
    sf_derivatives,
)
from .flow import flow_map, hamiltonian, integrate_orbit, minimal_period
from .winding import WindingProfile, omega_ode, omega_quadrature, winding_profile
from .classification import (
    ClassificationReport,
    JordanRecord,
    classify,
    classify_monomial,
)
from .curves import CurveTrace, reconstruct
from .positivity import certificate
from .normal_flow import (
    SupplementReport,
    classify_supplement,
    normal_model,
    nu_profile,
)

__version__ = "0.1.0"
