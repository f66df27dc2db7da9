"""Admissible derivative norms of r-monotone functions on the negative half-line."""

from .admissibility import (
    Certainty,
    DecisionConfig,
    SplineType,
    Verdict,
    decide,
    estimate_limit,
    extremal_check,
    extremal_checks,
    olov_bound,
)
from .errors import (
    InvalidArgument,
    MaxIterations,
    NoSolution,
    NumericalFailure,
    PathCollision,
    SolverError,
)
from .knots import (
    MomentSystem,
    grow_knot,
    solve_fixed_count,
    solve_for_l,
    solve_min_l,
    vandermonde_det,
)
from .spline import (
    AlternatingSpline,
    MonotoneSpline,
    NormTargets,
    OrderSpec,
    ScaleTransform,
    closed_form_norms,
    eval_derivative,
    measure_norms,
    rescale,
    validate_r_monotone,
)

__all__ = [name for name in dir() if not name.startswith("_")]
