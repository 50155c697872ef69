"""slowrate: exact asymptotic convergence rates of PPA, alternating
projections, and Douglas-Rachford on axis-versus-epigraph geometries."""

from .funlib import (
    PpaCategory,
    ScalarConvexFunction,
    TheoryMeta,
    catalog_get,
    catalog_names,
    half_square,
    theory_meta,
    tilted,
)
from .prox_engine import PlanePoint, ProxConfig, project_A, project_epigraph, prox, reflect_A
from .drivers import (
    UNDERFLOW_FLOOR,
    FejerReport,
    PlaneTrace,
    ScalarTrace,
    check_fejer,
    run_dra,
    run_map,
    run_ppa,
)
from .ratekit import (
    RatePrediction,
    RateReport,
    RecursionModel,
    classify_rate,
    envelope_check,
    estimate_r_infinity,
    guler_product,
    linear_rate_bound_check,
    make_recursion_model,
    ppa_superlinear_majorant,
    predict,
    sandwich_check,
    stolz_bounds,
)

__version__ = "0.1.0"
