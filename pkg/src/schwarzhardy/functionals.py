"""Hardy and Heisenberg functionals for radial profiles.

A :class:`RadialProfile` is described through the horizon offset
``h = r - 1``: ``value(h)`` and ``derivative(h)`` return ``psi`` and
``dpsi/dr`` there.  Working in ``h`` keeps the integrands accurate at
offsets far below machine epsilon, where most of the mass of the
near-critical Hardy profiles sits.

All integrals are radial: the angular factor ``|S^(n-1)|`` cancels from
every quotient and ratio computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .distances import (
    DistanceKind,
    _branch_offset,
    branch_radius,
    critical_delta_offset,
    distance_offset,
    induced_distance_offset,
    riemannian_distance_offset,
)
from .geometry import (
    _one_minus_inv_t,
    check_dimension,
    gradient_weight_offset,
    measure_weight_offset,
    metric_factor_offset,
    radial_power,
)
from .quadrature import (
    DEFAULT_TOL,
    QuadratureError,
    QuadratureResult,
    SingularitySpec,
    TailSpec,
    _cumulative_core,
    _integrate_core,
)

__all__ = [
    "HardyReport",
    "HeisenbergReport",
    "InadmissibleProfileError",
    "RadialProfile",
    "bump_profile",
    "distance_power_profile",
    "euclidean_reference",
    "hardy_quotient",
    "hat_profile",
    "heisenberg_minimiser",
    "heisenberg_report",
    "modulated",
    "profile_diagnostics",
    "random_profile",
    "sharpness_closed_form_quotient",
    "sharpness_denominator",
    "sharpness_exponent",
    "sharpness_profile",
]


class InadmissibleProfileError(ValueError):
    """Profile violates the decay conditions of the inequality being tested."""


@dataclass(frozen=True)
class RadialProfile:
    """Radial test function.

    ``horizon_decay`` is the exponent ``alpha`` in ``psi = O((r-1)**alpha)``;
    ``infinity_decay`` describes ``psi**2 * r**(n-1)`` as ``r -> inf``.
    ``breakpoints`` lists radii where ``psi`` is not smooth.
    """

    value: Callable
    derivative: Callable
    horizon_decay: float
    infinity_decay: TailSpec
    support: tuple[float, float] = (1.0, math.inf)
    breakpoints: tuple[float, ...] = ()
    name: str = ""

    def __call__(self, r):
        return self.value(np.asarray(r, dtype=float) - 1.0)

    def slope(self, r):
        return self.derivative(np.asarray(r, dtype=float) - 1.0)

    def scaled(self, factor: float) -> "RadialProfile":
        value, derivative = self.value, self.derivative
        return replace(self, value=lambda h: factor * value(h),
                       derivative=lambda h: factor * derivative(h),
                       name=f"{factor:g}*{self.name}")

    @property
    def touches_horizon(self) -> bool:
        return self.support[0] <= 1.0


@dataclass(frozen=True)
class HardyReport:
    n: int
    kind: DistanceKind
    numerator: float
    denominator: float
    quotient: float
    constant_bound: float
    numerator_result: QuadratureResult = field(repr=False)
    denominator_result: QuadratureResult = field(repr=False)

    @property
    def margin(self) -> float:
        return self.quotient - self.constant_bound


@dataclass(frozen=True)
class HeisenbergReport:
    n: int
    lhs: float
    moment: float
    energy: float
    rhs: float
    slack: float

    @property
    def relative_slack(self) -> float:
        return self.slack / self.rhs

    @property
    def ratio(self) -> float:
        return self.rhs / self.lhs


def profile_diagnostics(n, profile: RadialProfile, probes=None) -> dict:
    """Numerical cross-check of a profile's declared behaviour.

    Returns the worst relative mismatch between ``derivative`` and a
    central difference of ``value`` at probe radii away from breakpoints,
    and the observed decay of ``|psi| (r-1)**(-1/4)`` towards the horizon
    and of ``psi**2 r**(n-2)`` at large radius (``None`` when the support
    does not reach there).  Both decay numbers shrink toward zero for
    Hardy-admissible profiles.
    """
    n = check_dimension(n)
    lo, hi = profile.support
    if probes is None:
        top = min(hi, 1e3)
        probes = np.geomspace(max(lo, 1.0) - 1.0 + 1e-3, top - 1.0, 24)[1:-1] + 1.0
    probes = np.asarray(probes, dtype=float)
    kinks = np.asarray((*profile.breakpoints, lo, hi), dtype=float)
    gap = np.min(np.abs(probes[:, None] - kinks[None, :]), axis=1)
    probes = probes[gap > 1e-3 * probes]
    step = 1e-6 * probes
    fd = (profile(probes + step) - profile(probes - step)) / (2 * step)
    exact = profile.slope(probes)
    scale = np.maximum(np.abs(exact), 1e-12 * np.max(np.abs(exact), initial=1.0))
    mismatch = float(np.max(np.abs(fd - exact) / scale, initial=0.0))

    horizon = None
    if profile.touches_horizon:
        h = np.array([1e-4, 1e-8, 1e-12])
        horizon = [float(abs(v)) for v in np.abs(profile.value(h)) * h ** -0.25]
    infinity = None
    if math.isinf(hi):
        r = np.array([1e3, 1e5, 1e7])
        infinity = [float(v) for v in profile.value(r - 1.0) ** 2 * r ** (n - 2)]
    return {"derivative_mismatch": mismatch, "horizon_decay": horizon,
            "infinity_decay": infinity}


# -- integration plumbing ---------------------------------------------------

def _radial_integral(profile, integrand, horizon_exponent, tail, points=(), tol=DEFAULT_TOL,
                     what="integral"):
    lo = profile.support[0] - 1.0
    hi = profile.support[1] - 1.0
    cuts = [p - 1.0 for p in (*profile.breakpoints, *points)]
    singular = None
    if lo <= 0.0:
        lo = 0.0
        if not horizon_exponent > -1.0:
            raise InadmissibleProfileError(f"{what} diverges at the horizon")
        singular = SingularitySpec(min(-0.5, horizon_exponent))
    if math.isinf(hi) and not tail.convergent:
        raise InadmissibleProfileError(f"{what} diverges at infinity")
    result = _integrate_core(integrand, lo, hi, singular, tail if math.isinf(hi) else None,
                             tol, cuts)
    result.require(what)
    return result


def _energy_exponent(alpha):
    # psi - psi(1) = O(sqrt(r - 1)) is assumed when psi does not vanish at the horizon
    return 2 * alpha - 1.5 if alpha > 0 else -0.5


def _energy(n, profile, tol):
    return _radial_integral(
        profile, lambda h: profile.derivative(h) ** 2 * gradient_weight_offset(n, h),
        _energy_exponent(profile.horizon_decay), profile.infinity_decay.shifted(-2),
        tol=tol, what="energy integral")


def _weighted_mass(n, profile, weight, exponent_shift, tail_shift, points, tol, what):
    return _radial_integral(
        profile, lambda h: profile.value(h) ** 2 * weight(h) * measure_weight_offset(n, h),
        2 * profile.horizon_decay - 0.5 + exponent_shift,
        profile.infinity_decay.shifted(tail_shift), points, tol, what)


def hardy_quotient(n, profile: RadialProfile, kind=DistanceKind.CRITICAL_DELTA,
                   tol=DEFAULT_TOL) -> HardyReport:
    """Energy over ``int psi^2 / W^2 dv`` for the weight ``W`` of the given kind."""
    n = check_dimension(n)
    kind = DistanceKind(kind)
    if profile.touches_horizon and not profile.horizon_decay > 0.25:
        raise InadmissibleProfileError(
            f"psi must vanish faster than (r-1)**(1/4); declared exponent {profile.horizon_decay}")
    tail = profile.infinity_decay
    if math.isinf(profile.support[1]) and tail.kind == "power" and not tail.power < 1.0:
        raise InadmissibleProfileError("psi * r**((n-2)/2) must vanish at infinity")
    points = (branch_radius(n),) if kind is DistanceKind.CRITICAL_DELTA else ()
    numerator = _energy(n, profile, tol)
    denominator = _weighted_mass(
        n, profile, lambda h: distance_offset(kind, n, h) ** -2.0, -1.0, -2.0, points, tol,
        "Hardy denominator")
    return HardyReport(n, kind, numerator.value, denominator.value,
                       numerator.value / denominator.value, ((n - 2) / 2.0) ** 2,
                       numerator, denominator)


def heisenberg_report(n, profile: RadialProfile, tol=DEFAULT_TOL) -> HeisenbergReport:
    """Both sides of ``(1/2) int psi^2 <= (int s^2 psi^2)^(1/2) (int |grad psi|^2)^(1/2)``."""
    n = check_dimension(n)
    tail = profile.infinity_decay
    if math.isinf(profile.support[1]) and tail.kind == "power":
        if not tail.power < -1.0:
            raise InadmissibleProfileError("psi**2 * r**n must vanish at infinity")
        if not tail.power < -3.0:
            raise InadmissibleProfileError("the moment integral diverges at infinity")
    if profile.touches_horizon and 0 < profile.horizon_decay <= 0.25:
        raise InadmissibleProfileError("the energy integral diverges at the horizon")
    mass = _weighted_mass(n, profile, lambda h: 1.0, 0.0, 0.0, (), tol, "mass integral")
    moment = _weighted_mass(n, profile, lambda h: induced_distance_offset(n, h) ** 2,
                            1.0, 2.0, (), tol, "moment integral")
    energy = _energy(n, profile, tol)
    lhs = 0.5 * mass.value
    rhs = math.sqrt(moment.value * energy.value)
    return HeisenbergReport(n, lhs, moment.value, energy.value, rhs, rhs - lhs)


def euclidean_reference(n, profile: RadialProfile, tol=DEFAULT_TOL):
    """Flat-space counterparts for a profile living far from the horizon.

    Returns ``(hardy, heisenberg)``: the Euclidean Hardy quotient with
    weight ``r**2``, and the Euclidean uncertainty ratio
    ``sqrt(int r^2 psi^2 * int psi'^2) / ((n/2) int psi^2)``.
    """
    n = check_dimension(n)
    if profile.support[0] < 10.0:
        raise ValueError("Euclidean comparison needs support in (r0, inf) with r0 >= 10")

    def flat(fn, shift, what):
        return _radial_integral(profile, fn, 0.0, profile.infinity_decay.shifted(shift),
                                tol=tol, what=what).value

    energy = flat(lambda h: profile.derivative(h) ** 2 * radial_power(h, n - 1), -2, "energy")
    potential = flat(lambda h: profile.value(h) ** 2 * radial_power(h, n - 3), -2, "potential")
    mass = flat(lambda h: profile.value(h) ** 2 * radial_power(h, n - 1), 0, "mass")
    moment = flat(lambda h: profile.value(h) ** 2 * radial_power(h, n + 1), 2, "moment")
    return energy / potential, math.sqrt(moment * energy) / (0.5 * n * mass)


# -- the minimising sequence of the Hardy inequality ------------------------

def _check_eps(eps):
    if not eps > 0.5:
        raise ValueError(
            f"epsilon must exceed 1/2 (the denominator integral diverges otherwise), got {eps}")


def _inner_rate(n, h):
    # metric_factor / f on r < R, f = delta / (n - 2)
    return (n - 2) / (2.0 * (1.0 + h) * np.expm1((n - 2) * np.log1p(h)))


def _outer_rate(n, h):
    q = np.sqrt(_one_minus_inv_t(n, h))
    return (n - 2) * (1.0 + q) / (2.0 * (1.0 + h) * q)


def _exponent_closed(n, h):
    q2 = _one_minus_inv_t(n, h)
    inner = -0.5 * np.log(4.0 * q2)
    q = np.sqrt(q2)
    # -log(2 (1 - q)) with 1 - q = r^(2-n) / (1 + q)
    outer = -np.log(2.0 / (1.0 + q)) + (n - 2) * np.log1p(h)
    return np.where(h < _branch_offset(n), inner, outer)


def _exponent_quadrature(n, h, tol):
    hk = _branch_offset(n)
    out = np.empty_like(h)
    below = h < hk
    if below.any():
        # int_r^R, taken in -log(h) where the integrand ~ 1/(2 h) is flat
        t = -np.log(h[below])
        order = np.argsort(t)
        t0 = -math.log(hk)
        rate = lambda u: _inner_rate(n, np.exp(-(t0 + u))) * np.exp(-(t0 + u))
        pos = t[order] - t0
        vals = np.zeros_like(pos)
        nz = pos > 0
        if nz.any():
            got, _, ok, _ = _cumulative_core(rate, pos[nz], None, tol)
            if not ok.all():
                raise QuadratureError("sharpness exponent did not converge",
                                      QuadratureResult(got[-1], 0.0, False, 0))
            vals[nz] = got
        res = np.empty_like(pos)
        res[order] = vals
        out[below] = res
    above = ~below
    if above.any():
        # int_R^r, taken in log(r / R) where the integrand ~ (n - 2)
        t = np.log1p(h[above]) - math.log1p(hk)
        order = np.argsort(t)
        rate = lambda u: _outer_rate(n, np.expm1(math.log1p(hk) + u)) * np.exp(math.log1p(hk) + u)
        pos = t[order]
        vals = np.zeros_like(pos)
        nz = pos > 0
        if nz.any():
            got, _, ok, _ = _cumulative_core(rate, pos[nz], None, tol)
            if not ok.all():
                raise QuadratureError("sharpness exponent did not converge",
                                      QuadratureResult(got[-1], 0.0, False, 0))
            vals[nz] = got
        res = np.empty_like(pos)
        res[order] = vals
        out[above] = res
    return out


def sharpness_exponent(n, r, method="closed", tol=DEFAULT_TOL):
    """``|int_R^r metric_factor / f|``, the exponent of the minimising sequence per unit epsilon.

    ``method="quadrature"`` integrates the rate numerically; the default
    uses the antiderivatives ``-log(4 (1 - r^(2-n))) / 2`` inside ``R``
    and ``-log(2 (1 - sqrt(1 - r^(2-n))))`` outside.
    """
    n = check_dimension(n)
    h = np.asarray(r, dtype=float) - 1.0
    if np.any(~(h > 0)):
        raise ValueError("radius must satisfy r > 1")
    flat = np.atleast_1d(h).astype(float)
    if method == "closed":
        out = _exponent_closed(n, flat)
    elif method == "quadrature":
        out = _exponent_quadrature(n, flat, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out.reshape(np.shape(h)) if np.ndim(h) else float(out[0])


def sharpness_profile(n, eps: float) -> RadialProfile:
    """Member ``psi_eps`` of the sequence approaching the sharp Hardy constant.

    ``psi_eps(R) = 1``; it rises like ``(r-1)**(eps/2)`` from the horizon
    and decays like ``r**(-eps (n-2))``, so it is admissible exactly when
    ``eps > 1/2``.
    """
    n = check_dimension(n)
    _check_eps(eps)
    hk = _branch_offset(n)

    def value(h):
        h = np.asarray(h, dtype=float)
        return np.exp(-eps * _exponent_closed(n, h))

    def derivative(h):
        h = np.asarray(h, dtype=float)
        inner = h < hk
        # evaluate each rate only on its own side to avoid spurious overflow
        rate = np.where(inner, _inner_rate(n, np.where(inner, h, hk)),
                        -_outer_rate(n, np.where(inner, hk, h)))
        return eps * value(h) * rate

    p = (n - 1) - 2.0 * eps * (n - 2)
    return RadialProfile(value, derivative, eps / 2.0, TailSpec.power_law(p),
                         breakpoints=(branch_radius(n),), name=f"psi_eps(eps={eps:g})")


def sharpness_denominator(n, eps: float, tol=DEFAULT_TOL) -> QuadratureResult:
    """``D_eps = int psi_eps^2 / f^2 dv`` with ``f = delta / (n - 2)``."""
    n = check_dimension(n)
    profile = sharpness_profile(n, eps)
    weight = lambda h: ((n - 2) / critical_delta_offset(n, h)) ** 2
    return _weighted_mass(n, profile, weight, -1.0, -2.0, (branch_radius(n),), tol,
                          "sharpness denominator")


def sharpness_closed_form_quotient(n, denominator: float) -> float:
    """Quotient of ``psi_eps`` predicted from its denominator ``D_eps``."""
    n = check_dimension(n)
    return ((n - 2) / 2.0) ** 2 * (1.0 + 2.0 * (n - 2) / denominator) ** 2


# -- the extremal family of the uncertainty inequality ----------------------

def heisenberg_minimiser(n, B: float, amplitude: float = 1.0, tol=DEFAULT_TOL) -> RadialProfile:
    """``A exp(-B int_1^r s metric_factor)``, which attains equality for every ``B > 0``."""
    n = check_dimension(n)
    if not B > 0:
        raise ValueError(f"B must be positive for the limit condition at infinity, got {B}")
    rate = lambda h: induced_distance_offset(n, h) * metric_factor_offset(n, h)

    def exponent(h):
        h = np.asarray(h, dtype=float)
        flat = np.ravel(h)
        grid, inverse = np.unique(flat, return_inverse=True)
        vals, _, ok, nev = _cumulative_core(rate, grid, SingularitySpec(-0.5), tol)
        if not ok.all():
            raise QuadratureError("minimiser exponent did not converge",
                                  QuadratureResult(vals[-1], 0.0, False, nev[-1]))
        return vals[inverse].reshape(h.shape)

    def value(h):
        return amplitude * np.exp(-B * exponent(h))

    def derivative(h):
        return -B * value(h) * rate(np.asarray(h, dtype=float))

    return RadialProfile(value, derivative, 0.0, TailSpec.exponential(),
                         name=f"minimiser(B={B:g})")


# -- test profiles -----------------------------------------------------------

def _on_support(lo, hi, fn):
    def wrapped(h):
        h = np.asarray(h, dtype=float)
        r = 1.0 + h
        inside = (r > lo) & (r < hi)
        return np.where(inside, fn(np.clip(r, lo, hi)), 0.0)
    return wrapped


def bump_profile(knots, values, slopes, name="bump") -> RadialProfile:
    """C^1 piecewise cubic through ``values`` at the interior ``knots``.

    The first and last knot bound the support; value and slope vanish there.
    """
    knots = np.asarray(knots, dtype=float)
    if knots.size < 3 or np.any(np.diff(knots) <= 0) or knots[0] <= 1.0:
        raise ValueError("need at least three increasing knots beyond the horizon")
    y = np.concatenate([[0.0], values, [0.0]])
    dy = np.concatenate([[0.0], slopes, [0.0]])
    spline = CubicHermiteSpline(knots, y, dy)
    lo, hi = float(knots[0]), float(knots[-1])
    return RadialProfile(_on_support(lo, hi, spline), _on_support(lo, hi, spline.derivative()),
                         math.inf, TailSpec.compact(hi), (lo, hi),
                         tuple(float(k) for k in knots[1:-1]), name)


def hat_profile(lo, peak, hi, height=1.0) -> RadialProfile:
    """Piecewise-linear tent on ``(lo, hi)``."""
    if not 1.0 < lo < peak < hi:
        raise ValueError("need 1 < lo < peak < hi")
    up, down = height / (peak - lo), -height / (hi - peak)
    value = _on_support(lo, hi, lambda r: np.where(r < peak, up * (r - lo), down * (r - hi)))
    slope = _on_support(lo, hi, lambda r: np.where(r < peak, up, down))
    return RadialProfile(value, slope, math.inf, TailSpec.compact(hi), (lo, hi), (peak,), "hat")


def distance_power_profile(n, beta: float, rate: float) -> RadialProfile:
    """``d**beta * exp(-rate * d)`` with ``d`` the Riemannian distance."""
    n = check_dimension(n)
    if not (beta >= 0 and rate > 0):
        raise ValueError("need beta >= 0 and rate > 0")

    def value(h):
        d = np.asarray(riemannian_distance_offset(n, h))
        return d ** beta * np.exp(-rate * d)

    def derivative(h):
        d = np.asarray(riemannian_distance_offset(n, h))
        return (beta / d - rate) * d ** beta * np.exp(-rate * d) * metric_factor_offset(n, h)

    return RadialProfile(value, derivative, beta / 2.0, TailSpec.exponential(),
                         name=f"d^{beta:.3g} exp(-{rate:.3g} d)")


def modulated(n, profile: RadialProfile, amplitude: float = 0.1) -> RadialProfile:
    """``psi * (1 + amplitude * sin d)``."""
    n = check_dimension(n)

    def value(h):
        d = np.asarray(riemannian_distance_offset(n, h))
        return profile.value(h) * (1.0 + amplitude * np.sin(d))

    def derivative(h):
        d = np.asarray(riemannian_distance_offset(n, h))
        return (profile.derivative(h) * (1.0 + amplitude * np.sin(d))
                + profile.value(h) * amplitude * np.cos(d) * metric_factor_offset(n, h))

    return replace(profile, value=value, derivative=derivative,
                   name=f"{profile.name}*(1+{amplitude:g} sin d)")


_KNOT_RANGE = (1.05, 50.0)


def random_profile(rng: np.random.Generator, n, family: str | None = None) -> RadialProfile:
    """Draw an admissible profile from the bump, hat or distance-power families."""
    n = check_dimension(n)
    family = family or rng.choice(["bump", "hat", "distance_power"])
    lo, hi = np.log(_KNOT_RANGE[0]), np.log(_KNOT_RANGE[1])
    if family == "bump":
        m = int(rng.integers(1, 5))
        knots = np.sort(np.exp(rng.uniform(lo, hi, m + 2)))
        if np.any(np.diff(knots) < 1e-3):
            return random_profile(rng, n, family)
        widths = np.diff(knots)
        values = rng.uniform(-2.0, 2.0, m)
        scale = np.minimum(widths[:-1], widths[1:])
        slopes = rng.normal(0.0, 1.0, m) * np.abs(values) / scale
        return bump_profile(knots, values, slopes)
    if family == "hat":
        a, c, b = np.sort(np.exp(rng.uniform(lo, hi, 3)))
        if c - a < 1e-3 or b - c < 1e-3:
            return random_profile(rng, n, family)
        return hat_profile(a, c, b, rng.uniform(0.5, 2.0))
    if family == "distance_power":
        return distance_power_profile(n, rng.uniform(0.6, 2.0), rng.uniform(0.3, 2.0))
    raise ValueError(f"unknown profile family {family!r}")
