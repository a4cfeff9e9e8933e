"""weyllab: spectral counting and extremal remainder statistics for rational
Heisenberg manifolds, with the circle-problem baseline alongside."""

from .approx import (
    EstarComparison,
    VaalerCoeffs,
    estar,
    estar_compare,
    psi,
    sigma_H,
    sigma_H_star,
    vaaler_coeffs,
    vaaler_slack,
)
from .analytic import (
    DyadicScheme,
    FejerAverage,
    FejerIdentity,
    ThetaTable,
    TrigSum,
    build_trig_sum,
    dyadic_scheme,
    exp_sum_direct,
    exp_sum_transformed,
    fejer_average_I,
    fejer_identity_check,
    fejer_kernel,
    theta_coeff,
    theta_table,
    trig_sum_S,
)
from .circle import CircleSample, CramerReport, circle_count, cramer_mean_square
from .counting import (
    CountingResult,
    MeanSquareReport,
    brute_force_N,
    count_spectrum,
    mean_square,
    normalized_error_E,
    weyl_main_term,
)
from .diophantine import (
    BesicovitchCertificate,
    Discrepancy,
    KroneckerTarget,
    besicovitch_check,
    discrepancy_mod1,
    dist_nearest_int,
    kronecker_search,
    squarefree_up_to,
)
from .extremal import ExtremalReport, omega_normalizer, run_pipeline, theta_lower_sum
from .manifold import (
    ManifoldParams,
    RepCounts,
    SpectralLine,
    enumerate_class1,
    enumerate_class2,
    rep_counts,
    validate_params,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
