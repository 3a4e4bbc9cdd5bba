"""Entire maximal graphs in Lorentz-Minkowski 3-space with conelike
singularities, built from explicit data on a hyperelliptic curve.

The pipeline: pick real branch points a_1 < ... < a_{2n+2} (curve), pick one
endpoint per cut (weierstrass), integrate the resulting holomorphic forms
along cut-avoiding paths (quadrature), assemble the immersion, its singular
points and a mesh (surface), and check every claimed identity numerically
(verify). io_cli wraps the above in a small command line tool.
"""

__version__ = "0.1.0"

from .curve import (
    Bank,
    CurveError,
    HyperellipticCurve,
    OnCutError,
    SlitPoint,
    eval_w,
    eval_w_on_slit,
    laurent_at_infinity,
    make_curve,
)
from .weierstrass import (
    EndpointSingularityError,
    SpinChoice,
    WeierstrassData,
    build_data,
    build_data_from_endpoints,
    congruence_classes,
    enumerate_admissible,
    eval_forms,
    eval_g,
    growth_coefficient,
)
from .quadrature import (
    IntegrationPath,
    LoopPeriod,
    PathError,
    ToleranceError,
    integrate_forms,
    plan_path,
    slit_loop_period,
)
from .surface import (
    FoldError,
    GraphEvaluator,
    GraphFunction,
    InversionError,
    MaximalGraph,
    SlitCollapseError,
    SurfaceMesh,
    build_graph,
    default_z0,
    eval_X,
    gradient_norm,
    harmonic_residual_orders,
    log_growth_fit,
    pde_residual_orders,
    project_to_graph,
    sample_X,
    sample_mesh,
    singular_points,
)
from .verify import (
    CheckRecord,
    FamilyReport,
    VerificationReport,
    VerifySettings,
    complement_reflection_residual,
    count_preimages,
    interior_samples,
    verify_family,
    verify_surface,
)

__all__ = [
    "Bank",
    "CheckRecord",
    "CurveError",
    "EndpointSingularityError",
    "FamilyReport",
    "FoldError",
    "GraphEvaluator",
    "GraphFunction",
    "HyperellipticCurve",
    "IntegrationPath",
    "InversionError",
    "LoopPeriod",
    "MaximalGraph",
    "OnCutError",
    "PathError",
    "SlitCollapseError",
    "SlitPoint",
    "SpinChoice",
    "SurfaceMesh",
    "ToleranceError",
    "VerificationReport",
    "VerifySettings",
    "WeierstrassData",
    "build_data",
    "build_data_from_endpoints",
    "build_graph",
    "complement_reflection_residual",
    "congruence_classes",
    "count_preimages",
    "default_z0",
    "enumerate_admissible",
    "eval_X",
    "eval_forms",
    "eval_g",
    "eval_w",
    "eval_w_on_slit",
    "gradient_norm",
    "growth_coefficient",
    "harmonic_residual_orders",
    "integrate_forms",
    "interior_samples",
    "laurent_at_infinity",
    "log_growth_fit",
    "make_curve",
    "pde_residual_orders",
    "plan_path",
    "project_to_graph",
    "sample_X",
    "sample_mesh",
    "singular_points",
    "slit_loop_period",
    "verify_family",
    "verify_surface",
]
