"""Euclidean Jordan algebras, symmetric-cone geometry and self-scaled barriers."""

from .barriers import (
    BarrierSpec,
    barrier_gradient,
    barrier_hessian,
    barrier_scaling_point,
    barrier_value,
    check_self_scaled,
    conjugate_spec,
    conjugate_value,
    newton_decrement_sq,
    perturbed_decrement_bound,
    upsilon,
)
from .exceptions import (
    DegenerateProgramError,
    DomainError,
    InitializationError,
    NearBoundaryWarning,
    NotInKError,
    StallError,
    StructuralError,
)
from .geometry import geodesic, geometric_mean, riemannian_distance, scaling_point
from .ipm import ConicProgram, IterateState, SolveReport, nt_step, solve
from .jordan import (
    DirectSum,
    Element,
    LinMap,
    SpinFactor,
    SymMatrix,
    det,
    direct_sum,
    eigenvalues,
    inner,
    inverse,
    jordan_product,
    parse_algebra,
    quadratic_rep,
    sample_cone,
    spectral,
    trace,
)
from .reports import CheckReport
from .verification import factor_nondefective, in_k, lie_span_probe, polar_decompose

__version__ = "0.1.0"
