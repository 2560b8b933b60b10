"""Hardy and uncertainty inequalities on the exterior of a Schwarzschild black hole.

Radial weights (:mod:`~schwarzhardy.distances`), a singular-endpoint
quadrature engine (:mod:`~schwarzhardy.quadrature`), the functionals and
extremal families (:mod:`~schwarzhardy.functionals`) and the numerical
studies built on them (:mod:`~schwarzhardy.analysis`).
"""

from .analysis import (
    Check,
    RatioScanResult,
    VerificationReport,
    distance_ratio,
    kappa_lower_bound,
    limit_suite,
    ratio_infimum,
    sharpness_table,
)
from .distances import (
    DistanceKind,
    branch_radius,
    critical_delta,
    delta_ode_residual,
    induced_distance,
    induced_ivp_residual,
    riemannian_distance,
)
from .functionals import (
    InadmissibleProfileError,
    RadialProfile,
    hardy_quotient,
    heisenberg_minimiser,
    heisenberg_report,
    sharpness_profile,
)
from .geometry import DomainError, gradient_weight, measure_weight, metric_factor
from .quadrature import (
    QuadratureError,
    QuadratureResult,
    SingularitySpec,
    TailSpec,
    cumulative,
    integrate,
)

__version__ = "0.1.0"

__all__ = [
    "Check",
    "DistanceKind",
    "DomainError",
    "InadmissibleProfileError",
    "QuadratureError",
    "QuadratureResult",
    "RadialProfile",
    "RatioScanResult",
    "SingularitySpec",
    "TailSpec",
    "VerificationReport",
    "branch_radius",
    "critical_delta",
    "cumulative",
    "delta_ode_residual",
    "distance_ratio",
    "gradient_weight",
    "hardy_quotient",
    "heisenberg_minimiser",
    "heisenberg_report",
    "induced_distance",
    "induced_ivp_residual",
    "integrate",
    "kappa_lower_bound",
    "limit_suite",
    "measure_weight",
    "metric_factor",
    "ratio_infimum",
    "riemannian_distance",
    "sharpness_profile",
    "sharpness_table",
]
