"""q-deformed exponential/logarithm family: series evaluation, inverse-series
coefficients, zero sum rules, deformed Bernoulli/zeta/dilogarithm values, and
the numerical zero/turning-point landscape with collisions and contours."""

from .compositions import composition_count, composition_sum, compositions
from .lnq import (
    CoeffList,
    SeriesEval,
    lnq_coefficients,
    lnq_eval,
    lnq_qderivative_coeffs,
    polynomial_eval,
)
from .qnum import (
    Convention,
    DomainError,
    Family,
    FunctionSpec,
    NoConvergence,
    QParam,
    TruncatedValue,
    bracket,
    bracket_factorial,
    degree_for_radius,
    eval_exp_continued,
    eval_series,
    inverse_bracket_factorials,
    series_coefficients,
)
from .sumrules import (
    SumFamily,
    SumRule,
    TailedValue,
    b_series_coeffs,
    b_series_eval,
    bracket_reciprocal_from_sigma,
    exp_b_eval,
    l_coefficient,
    l_coefficients,
    q_bernoulli,
    q_dilog,
    q_zeta,
    reconstruct_coefficients,
    series_exp,
    series_log,
    sigma,
    sigma_production,
)
from .zeroscape import (
    CollisionResult,
    ContourSet,
    RootKind,
    Trajectory,
    TurningPointRecord,
    ZeroRecord,
    ZeroScan,
    collision_point,
    continue_in_q,
    enumerate_zeros,
    extract_contours,
    find_complex_zeros,
    find_real_zeros,
    find_turning_points,
    local_scale,
    winding_number,
    winding_number_circle,
)

__version__ = "0.1.0"
