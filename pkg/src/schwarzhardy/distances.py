"""Distance-like radial functions measured from the event horizon.

Three weights appear in the inequalities:

``d``      Riemannian distance, ``int_1^r metric_factor``.
``delta``  piecewise weight built from the two solutions of
           ``f' - (n-1) f / r = +-metric_factor`` (with ``f = delta / (n-2)``),
           glued continuously at ``R = (4/3)**(1/(n-2))``.
``s``      induced distance, ``r**(1-n) * int_1^r measure_weight``.

``d`` and ``s`` have closed forms for ``n = 3, 4``; otherwise they come
from the singular quadrature in :mod:`schwarzhardy.quadrature`.  Array
arguments are sorted once and integrated as a single cumulative batch.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

import numpy as np

from .geometry import (
    DomainError,
    _one_minus_inv_t,
    _out,
    check_dimension,
    horizon_offset,
    measure_weight_offset,
    metric_factor_offset,
    radial_power,
)
from .quadrature import (
    DEFAULT_TOL,
    QuadratureError,
    QuadratureResult,
    SingularitySpec,
    _cumulative_core,
)

__all__ = [
    "DistanceKind",
    "branch_radius",
    "critical_delta",
    "critical_delta_offset",
    "delta_derivative",
    "delta_ode_residual",
    "distance",
    "distance_offset",
    "induced_distance",
    "induced_distance_offset",
    "induced_ivp_residual",
    "riemannian_distance",
    "riemannian_distance_offset",
]

_HORIZON = SingularitySpec(-0.5)


class DistanceKind(str, Enum):
    RIEMANNIAN = "d"
    CRITICAL_DELTA = "delta"
    INDUCED_S = "s"


def branch_radius(n) -> float:
    """Radius ``(4/3)**(1/(n-2))`` where the two branches of delta meet."""
    n = check_dimension(n)
    return (4.0 / 3.0) ** (1.0 / (n - 2))


def _branch_offset(n):
    # exact: R lies in (1, 2)
    return branch_radius(n) - 1.0


# -- closed forms -----------------------------------------------------------

def _d_closed(n, h):
    r = 1.0 + h
    if n == 3:
        return np.sqrt(r * h) + np.arcsinh(np.sqrt(h))
    if n == 4:
        return np.sqrt(h * (2.0 + h))
    raise ValueError(f"no closed form for d in dimension {n}")


def _s_closed(n, h):
    r = 1.0 + h
    if n == 3:
        return (np.sqrt(r * h) / 24.0 * (8.0 + 10.0 / r + 15.0 / r**2)
                + 5.0 / (8.0 * r**2) * np.arcsinh(np.sqrt(h)))
    if n == 4:
        root = np.sqrt(h * (2.0 + h))
        return root / 8.0 * (2.0 + 3.0 / r**2) + 3.0 / (8.0 * r**3) * np.log1p(h + root)
    raise ValueError(f"no closed form for s in dimension {n}")


# -- quadrature -------------------------------------------------------------

def _running_integral(integrand, h, tol, what):
    flat = np.ravel(h)
    grid, inverse = np.unique(flat, return_inverse=True)
    values, errors, ok, nev = _cumulative_core(integrand, grid, _HORIZON, tol)
    if not ok.all():
        worst = int(np.argmin(ok))
        raise QuadratureError(
            f"{what} did not converge at r = {1 + grid[worst]!r}",
            QuadratureResult(values[worst], errors[worst], False, nev[worst]))
    return values[inverse].reshape(np.shape(h))


@lru_cache(maxsize=8192)
def _scalar_integral(kind, n, h, tol):
    return float(_integral_array(kind, n, np.array([h]), tol)[0])


def _integral_array(kind, n, h, tol):
    if kind == "d":
        return _running_integral(lambda x: metric_factor_offset(n, x), h, tol,
                                 "Riemannian distance")
    return _running_integral(lambda x: measure_weight_offset(n, x), h, tol,
                             "induced distance")


def _integral(kind, n, h, tol):
    if np.ndim(h) == 0:
        return np.asarray(_scalar_integral(kind, n, float(h), tol))
    return _integral_array(kind, n, h, tol)


def _pick(method, n):
    if method == "auto":
        return "closed" if n in (3, 4) else "quadrature"
    if method not in ("closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    return method


def _check_offset(h):
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise DomainError("horizon offset must be positive")
    return h


# -- public evaluators ------------------------------------------------------

def riemannian_distance_offset(n, h, method="auto", tol=DEFAULT_TOL):
    n = check_dimension(n)
    h = _check_offset(h)
    if _pick(method, n) == "closed":
        return _out(_d_closed(n, h))
    return _out(_integral("d", n, h, tol))


def induced_distance_offset(n, h, method="auto", tol=DEFAULT_TOL):
    n = check_dimension(n)
    h = _check_offset(h)
    if _pick(method, n) == "closed":
        return _out(_s_closed(n, h))
    return _out(_integral("s", n, h, tol) / radial_power(h, n - 1))


def critical_delta_offset(n, h, branch=None):
    n = check_dimension(n)
    h = _check_offset(h)
    omi = _one_minus_inv_t(n, h)
    q = np.sqrt(omi)
    r = 1.0 + h
    inner = 2.0 * radial_power(h, n - 1) * q
    # 2 r^(n-1) (1 - q) with 1 - q = r^(2-n) / (1 + q)
    outer = 2.0 * r / (1.0 + q)
    if branch == "inner":
        return _out(inner)
    if branch == "outer":
        return _out(outer)
    if branch is not None:
        raise ValueError(f"unknown branch {branch!r}")
    return _out(np.where(h < _branch_offset(n), inner, outer))


def riemannian_distance(n, r, method="auto", tol=DEFAULT_TOL):
    """Riemannian distance from the horizon, ``d(r) = int_1^r metric_factor``.

    ``method`` is ``"closed"`` (n = 3, 4 only), ``"quadrature"`` or
    ``"auto"``, which prefers the closed form when there is one.
    """
    return riemannian_distance_offset(n, horizon_offset(r), method, tol)


def induced_distance(n, r, method="auto", tol=DEFAULT_TOL):
    """Induced distance ``s(r) = r^(1-n) int_1^r measure_weight``."""
    return induced_distance_offset(n, horizon_offset(r), method, tol)


def critical_delta(n, r, branch=None):
    """Critical Hardy weight.

    ``branch`` forces the ``"inner"`` (``r < R``) or ``"outer"`` formula;
    by default the branch is chosen from ``r``.
    """
    return critical_delta_offset(n, horizon_offset(r), branch)


def distance_offset(kind, n, h):
    kind = DistanceKind(kind)
    if kind is DistanceKind.RIEMANNIAN:
        return riemannian_distance_offset(n, h)
    if kind is DistanceKind.CRITICAL_DELTA:
        return critical_delta_offset(n, h)
    return induced_distance_offset(n, h)


def distance(kind, n, r):
    return distance_offset(kind, n, horizon_offset(r))


# -- derivatives and ODE residuals -------------------------------------------

def _delta_derivative_branch(n, h, branch):
    q = np.sqrt(_one_minus_inv_t(n, h))
    if branch == "inner":
        return 2.0 * (n - 1) * radial_power(h, n - 2) * q + (n - 2) / q
    return 2.0 * (n - 1) / (1.0 + q) - (n - 2) / q


def delta_derivative(n, r, side=None):
    """Derivative of delta.

    At ``r = R`` the derivative jumps; ask for ``side="left"`` or
    ``side="right"`` there.  Elsewhere ``side`` may be omitted.
    """
    n = check_dimension(n)
    h = horizon_offset(r)
    at_kink = h == _branch_offset(n)
    if side is None:
        if np.any(at_kink):
            raise DomainError("delta is not differentiable at the branch radius; pass side=")
        inner = h < _branch_offset(n)
    elif side == "left":
        inner = h <= _branch_offset(n)
    elif side == "right":
        inner = h < _branch_offset(n)
    else:
        raise ValueError(f"unknown side {side!r}")
    return _out(np.where(inner, _delta_derivative_branch(n, h, "inner"),
                         _delta_derivative_branch(n, h, "outer")))


def _fd_step(r, h, hk):
    step = 1e-6 * np.maximum(1.0, r)
    step = np.minimum(step, 1e-4 * h)
    return np.minimum(step, 0.5 * np.abs(h - hk))


def delta_ode_residual(n, r, method="analytic"):
    """``f' - (n-1) f / r -+ metric_factor`` for ``f = delta / (n-2)``.

    The sign follows the active branch (``+`` inside ``R``).  ``method`` is
    ``"analytic"`` or ``"fd"`` (central differences of delta itself).
    """
    n = check_dimension(n)
    h = horizon_offset(r)
    hk = _branch_offset(n)
    if np.any(h == hk):
        raise DomainError("the ODE residual is undefined at the branch radius")
    r = 1.0 + h
    inner = h < hk
    if method == "analytic":
        slope = np.where(inner, _delta_derivative_branch(n, h, "inner"),
                         _delta_derivative_branch(n, h, "outer"))
    elif method == "fd":
        step = _fd_step(r, h, hk)
        slope = (critical_delta_offset(n, h + step) - critical_delta_offset(n, h - step)) / (2 * step)
    else:
        raise ValueError(f"unknown method {method!r}")
    f = critical_delta_offset(n, h) / (n - 2)
    sign = np.where(inner, 1.0, -1.0)
    return _out(slope / (n - 2) - (n - 1) / r * f - sign * metric_factor_offset(n, h))


def induced_ivp_residual(n, r, method="analytic", distance_method="auto"):
    """``s' + (n-1) s / r - metric_factor``.

    ``"analytic"`` differentiates the defining integral; ``"fd"`` takes
    central differences of ``s`` evaluated with ``distance_method``.
    """
    n = check_dimension(n)
    h = horizon_offset(r)
    r = 1.0 + h
    step = np.minimum(1e-6 * np.maximum(1.0, r), 0.5 * h)
    # one batch, so the quadrature panels are shared between the stencil points
    lower, s, upper = np.asarray(
        induced_distance_offset(n, np.stack([h - step, h, h + step]), distance_method))
    if method == "analytic":
        slope = measure_weight_offset(n, h) / radial_power(h, n - 1) - (n - 1) * s / r
    elif method == "fd":
        slope = (upper - lower) / (2 * step)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _out(slope + (n - 1) * s / r - metric_factor_offset(n, h))
