"""Radial coefficients of the reduced Schwarzschild metric.

Everything is evaluated from the horizon offset ``h = r - 1`` so that
``r**(n-2) - 1`` keeps full relative precision when ``r`` is close to the
horizon.  The public ``*_offset`` variants take ``h`` directly; they are
what the quadrature code calls, since offsets below ``eps`` cannot be
represented as a radius.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DomainError",
    "check_dimension",
    "gradient_weight",
    "gradient_weight_offset",
    "horizon_offset",
    "measure_weight",
    "measure_weight_offset",
    "metric_factor",
    "metric_factor_offset",
    "radial_power",
]


class DomainError(ValueError):
    """Argument outside the open exterior ``r > 1`` or dimension below 3."""


def check_dimension(n) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 3:
        raise DomainError(f"dimension must be at least 3, got {n}")
    return n


def horizon_offset(r):
    """``r - 1`` as an array, rejecting points on or inside the horizon."""
    r = np.asarray(r, dtype=float)
    h = r - 1.0
    if np.any(~(h > 0)):
        raise DomainError("radius must satisfy r > 1")
    return h


def _check_offset(h):
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise DomainError("horizon offset must be positive")
    return h


def _out(x):
    return x.item() if np.ndim(x) == 0 else x


def _log_t(n, h):
    # log(r**(n-2))
    return (n - 2) * np.log1p(h)


def _one_minus_inv_t(n, h):
    # 1 - r**(2-n), exact near the horizon
    return -np.expm1(-_log_t(n, h))


def radial_power(h, k):
    """``r**k`` from the offset (rounding ``1 + h`` costs at most ``k * h``)."""
    return (1.0 + np.asarray(h, dtype=float)) ** k


def metric_factor_offset(n, h):
    n = check_dimension(n)
    h = _check_offset(h)
    return _out(1.0 / np.sqrt(_one_minus_inv_t(n, h)))


def measure_weight_offset(n, h):
    n = check_dimension(n)
    h = _check_offset(h)
    return _out(radial_power(h, n - 1) / np.sqrt(_one_minus_inv_t(n, h)))


def gradient_weight_offset(n, h):
    n = check_dimension(n)
    h = _check_offset(h)
    return _out(radial_power(h, n - 1) * np.sqrt(_one_minus_inv_t(n, h)))


def metric_factor(n, r):
    """Square root of the radial metric coefficient, ``sqrt(r^(n-2) / (r^(n-2) - 1))``."""
    return metric_factor_offset(n, horizon_offset(r))


def measure_weight(n, r):
    """Radial density of the Riemannian volume, ``r^(n-1) * metric_factor``."""
    return measure_weight_offset(n, horizon_offset(r))


def gradient_weight(n, r):
    """Radial density multiplying ``psi'(r)**2`` in the Dirichlet energy."""
    return gradient_weight_offset(n, horizon_offset(r))
