"""Adaptive Gauss-Kronrod integration on (a, b] and (a, inf).

The integrands met in this package blow up like ``(r - a)**alpha`` at the
lower endpoint (``alpha >= -1/2`` for the volume density, closer to ``-1``
for the near-critical Hardy profiles) and decay either algebraically or
like a Gaussian at infinity.  Both ends are handled by changes of variable
that make the transformed integrand bounded:

* lower endpoint: ``x - a = L * v**k`` with ``k = 1 / (1 + alpha)``;
* power-law tail ``f ~ r**p``: ``r = c * w**(-m)`` with
  ``m = max(1, 1 / (-p - 1))``;
* exponential tail: a sequence of doubling panels, stopped once a panel
  contributes less than a tenth of the tolerance.

The transformed problem is integrated with a vectorised adaptive G7/K15
rule that bisects every subinterval whose ``|K15 - G7|`` exceeds its share
of the tolerance.  Many panels are integrated in one batch, which is what
makes ``cumulative`` cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DEFAULT_TOL",
    "QuadratureError",
    "QuadratureResult",
    "SingularitySpec",
    "TailSpec",
    "cumulative",
    "integrate",
]

DEFAULT_TOL = 1e-10

# Kronrod 15-point nodes on [-1, 1] (QUADPACK qk15), with the embedded
# 7-point Gauss weights on the odd-indexed nodes.
_XK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XK_HALF[:-1], _XK_HALF[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK_HALF[:-1], _WK_HALF[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])

_EPS = np.finfo(float).eps
# Smallest offset from a singular endpoint at which integrands are sampled;
# the sliver below it is added analytically.
_OFFSET_FLOOR = 1e-200
# Largest radius sampled on a power-law tail; kept low enough that
# r**(n - 1) stays finite for the dimensions in use.
_TAIL_CEILING = 1e30


class QuadratureError(ArithmeticError):
    """An integral did not reach its tolerance; ``result`` holds the best value."""

    def __init__(self, message: str, result: "QuadratureResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class SingularitySpec:
    """Endpoint behaviour ``(r - a)**exponent`` at the lower limit."""

    exponent: float = -0.5
    location: str = "lower"

    def __post_init__(self):
        if self.location not in ("lower", "none"):
            raise ValueError(f"unknown singularity location {self.location!r}")
        if not self.exponent > -1.0:
            raise ValueError(
                f"endpoint exponent {self.exponent} is not integrable (need > -1)")

    @property
    def active(self) -> bool:
        return self.location == "lower"

    @property
    def power(self) -> float:
        """Power ``k`` of the regularising substitution ``x - a ~ v**k``."""
        return 1.0 / (1.0 + min(self.exponent, 0.0))


@dataclass(frozen=True)
class TailSpec:
    """How an integrand behaves as ``r -> inf``.

    Build with :meth:`power_law`, :meth:`exponential` or :meth:`compact`.
    """

    kind: str
    power: float | None = None
    support_end: float | None = None

    def __post_init__(self):
        if self.kind not in ("power", "exponential", "compact"):
            raise ValueError(f"unknown tail kind {self.kind!r}")
        if self.kind == "power" and self.power is None:
            raise ValueError("power-law tail needs an exponent")
        if self.kind == "compact" and self.support_end is None:
            raise ValueError("compact tail needs a support end")

    @classmethod
    def power_law(cls, p: float) -> "TailSpec":
        return cls("power", power=float(p))

    @classmethod
    def exponential(cls) -> "TailSpec":
        return cls("exponential")

    @classmethod
    def compact(cls, support_end: float) -> "TailSpec":
        return cls("compact", support_end=float(support_end))

    def shifted(self, dp: float) -> "TailSpec":
        """Tail of ``f * r**dp`` given that ``f`` has this tail."""
        if self.kind == "power":
            return TailSpec.power_law(self.power + dp)
        return self

    @property
    def convergent(self) -> bool:
        return self.kind != "power" or self.power < -1.0


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    converged: bool
    evaluations: int

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "abs_error_estimate", float(self.abs_error_estimate))
        object.__setattr__(self, "converged", bool(self.converged))
        object.__setattr__(self, "evaluations", int(self.evaluations))

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.converged and other.converged,
            self.evaluations + other.evaluations,
        )

    def __float__(self) -> float:
        return float(self.value)

    def require(self, what: str = "integral") -> float:
        """Return the value, raising :class:`QuadratureError` if unconverged."""
        if not self.converged:
            raise QuadratureError(
                f"{what} did not converge: value {self.value!r}, "
                f"error estimate {self.abs_error_estimate!r}", self)
        return self.value


def _target(tol: float, value):
    return tol * np.maximum(1.0, np.abs(value))


def _gk15(g, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    y = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (y @ KRONROD_WEIGHTS)
    gauss = half * (y @ GAUSS_WEIGHTS)
    resabs = np.abs(half) * (np.abs(y) @ KRONROD_WEIGHTS)
    err = np.maximum(np.abs(kron - gauss), 50.0 * _EPS * resabs)
    bad = ~np.isfinite(kron)
    err[bad] = np.inf
    return kron, err


def _adaptive(g, lo, hi, tol, limit=4000):
    """Integrate ``g`` over each panel ``[lo[i], hi[i]]`` in one batch.

    Returns per-panel ``(value, error, converged, evaluations)`` arrays.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    npanel = lo.size
    width = hi - lo
    done_val = np.zeros(npanel)
    done_err = np.zeros(npanel)
    nevals = np.zeros(npanel, dtype=np.int64)
    nsub = np.ones(npanel, dtype=np.int64)
    converged = np.ones(npanel, dtype=bool)

    a, b = lo.copy(), hi.copy()
    owner = np.arange(npanel)
    while owner.size:
        val, err = _gk15(g, a, b)
        np.add.at(nevals, owner, 15)
        live_val = np.bincount(owner, val, minlength=npanel)
        live_err = np.bincount(owner, err, minlength=npanel)
        target = _target(tol, done_val + live_val)

        finished = (done_err + live_err <= target)[owner]
        share = err <= target[owner] * np.abs(b - a) / np.where(width[owner] == 0, 1, width[owner])
        mid = 0.5 * (a + b)
        tiny = (np.abs(b - a) <= 8 * _EPS * np.maximum(np.abs(mid), 1e-300)) | ~np.isfinite(err)
        over = nsub[owner] >= limit
        accept = finished | share | tiny | over
        stuck = accept & ~(finished | share)
        converged[owner[stuck]] = False

        np.add.at(done_val, owner[accept], val[accept])
        np.add.at(done_err, owner[accept], err[accept])

        keep = ~accept
        a, b, owner = a[keep], b[keep], owner[keep]
        m = mid[keep]
        np.add.at(nsub, owner, 1)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        owner = np.concatenate([owner, owner])

    converged &= done_err <= _target(tol, done_val)
    return done_val, done_err, converged, nevals


def _power_correction(g, t0, t1, declared):
    """Integral of ``g`` over ``(0, t0)`` assuming ``g ~ C t**declared``.

    ``t1 > t0`` is a second sample used to measure the actual exponent; the
    disagreement between the declared and measured laws is the error.
    """
    g0 = float(g(np.array([t0]))[0])
    if g0 == 0.0 or not np.isfinite(g0):
        return 0.0, (0.0 if g0 == 0.0 else np.inf), 1
    corr = t0 * g0 / (declared + 1.0)
    g1 = float(g(np.array([t1]))[0])
    if g1 / g0 > 0 and np.isfinite(g1):
        measured = math.log(g1 / g0) / math.log(t1 / t0)
        if measured > -1.0:
            return corr, abs(corr - t0 * g0 / (measured + 1.0)), 2
    return corr, abs(corr), 2


def _singular_transform(f, length, power):
    def g(v):
        x = length * v ** power
        return length * power * v ** (power - 1.0) * f(x)
    return g


def _tail_transform(f, start, power):
    def g(w):
        x = start * w ** (-power)
        return start * power * w ** (-power - 1.0) * f(x)
    return g


def _tail_power(p):
    return max(1.0, 1.0 / (-p - 1.0))


def _integrate_singular(f, length, sing, tol, floor=_OFFSET_FLOOR):
    k = sing.power
    v0 = min(floor / length, 0.25) ** (1.0 / k)
    g = _singular_transform(f, length, k)
    val, err, ok, nev = _adaptive(g, [v0], [1.0], tol)
    corr, cerr, cev = _power_correction(g, v0, v0 * 2.0 ** (1.0 / k), 0.0)
    return QuadratureResult(val[0] + corr, err[0] + cerr,
                            bool(ok[0]) and cerr <= _target(tol, val[0]), int(nev[0]) + cev)


def _integrate_power_tail(f, start, p, tol):
    m = _tail_power(p)
    w0 = (start / _TAIL_CEILING) ** (1.0 / m)
    g = _tail_transform(f, start, m)
    val, err, ok, nev = _adaptive(g, [w0], [1.0], tol)
    declared = m * (-p - 1.0) - 1.0
    corr, cerr, cev = _power_correction(g, w0, w0 * 2.0 ** (1.0 / m), declared)
    return QuadratureResult(val[0] + corr, err[0] + cerr,
                            bool(ok[0]) and cerr <= _target(tol, val[0]), int(nev[0]) + cev)


def _integrate_exponential_tail(f, start, tol, max_panels=60):
    width = max(1.0, abs(start))
    lo = start
    total = QuadratureResult(0.0, 0.0, True, 0)
    quiet = 0
    for _ in range(max_panels):
        hi = lo + width
        val, err, ok, nev = _adaptive(f, [lo], [hi], tol)
        total = total + QuadratureResult(val[0], err[0], bool(ok[0]), int(nev[0]))
        lo, width = hi, 2.0 * width
        if abs(val[0]) <= 0.1 * _target(tol, total.value):
            quiet += 1
            if quiet == 2:
                # The last negligible panel bounds the remainder.
                return QuadratureResult(total.value, total.abs_error_estimate + abs(val[0]),
                                        total.converged, total.evaluations)
        else:
            quiet = 0
    return QuadratureResult(total.value, total.abs_error_estimate, False, total.evaluations)


def _integrate_core(f, lo, hi, singularity=None, tail=None, tol=DEFAULT_TOL, points=(),
                    floor=_OFFSET_FLOOR):
    """Integrate ``f(x)`` over ``(lo, hi)``; the singular endpoint, if any, is ``lo``.

    ``f`` sees the integration variable itself, so callers who need
    precision at tiny offsets pass ``lo = 0``.
    """
    if tail is not None and tail.kind == "compact":
        hi = min(hi, tail.support_end)
    if not hi > lo:
        return QuadratureResult(0.0, 0.0, True, 0)
    infinite = math.isinf(hi)
    if infinite:
        if tail is None:
            raise ValueError("an infinite upper limit needs a TailSpec")
        if not tail.convergent:
            raise ValueError(f"power-law tail r**{tail.power} does not converge at infinity")

    cuts = sorted(float(p) for p in points if lo < p < hi)
    singular = singularity is not None and singularity.active
    if singular and not cuts:
        cuts = [lo + (1.0 if infinite else 0.5 * (hi - lo))]
    if infinite and not cuts:
        cuts = [lo + max(1.0, abs(lo))]
    edges = [lo] + cuts + ([] if infinite else [hi])

    total = QuadratureResult(0.0, 0.0, True, 0)
    first = 0
    if singular:
        left = edges[0]
        total = total + _integrate_singular(lambda x: f(left + x), edges[1] - left, singularity, tol,
                                           floor)
        first = 1
    if len(edges) - first >= 2:
        val, err, ok, nev = _adaptive(f, edges[first:-1], edges[first + 1:], tol)
        total = total + QuadratureResult(float(val.sum()), float(err.sum()),
                                         bool(ok.all()), int(nev.sum()))
    if infinite:
        start = edges[-1]
        if tail.kind == "power":
            part = _integrate_power_tail(f, start, tail.power, tol)
        else:
            part = _integrate_exponential_tail(f, start, tol)
        total = total + part
    return total


def _cumulative_core(f, xs, singularity=None, tol=DEFAULT_TOL, floor=_OFFSET_FLOOR):
    """Running integrals of ``f`` from 0 to each of the ascending ``xs``.

    Returns ``(values, errors, converged, evaluations)`` arrays.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        empty = np.zeros(0)
        return empty, empty, np.zeros(0, dtype=bool), np.zeros(0, dtype=np.int64)
    if np.any(np.diff(xs) < 0) or xs[0] <= 0:
        raise ValueError("grid must be ascending and above the lower limit")
    if singularity is not None and singularity.active:
        k = singularity.power
        scale = float(xs[-1])
        vs = (xs / scale) ** (1.0 / k)
        g = _singular_transform(f, scale, k)
        v0 = min(min(floor / scale, 0.25) ** (1.0 / k), 0.5 * vs[0])
        lo = np.concatenate([[v0], vs[:-1]])
        val, err, ok, nev = _adaptive(g, lo, vs, tol)
        corr, cerr, cev = _power_correction(g, v0, v0 * 2.0 ** (1.0 / k), 0.0)
        val[0] += corr
        err[0] += cerr
        nev[0] += cev
    else:
        lo = np.concatenate([[0.0], xs[:-1]])
        val, err, ok, nev = _adaptive(f, lo, xs, tol)
    values = np.cumsum(val)
    errors = np.cumsum(err)
    converged = np.logical_and.accumulate(ok)
    return values, errors, converged, np.cumsum(nev)


def _shifted(f, a, offset):
    """Integrand in the offset variable, plus the smallest offset to sample."""
    if offset:
        return f, _OFFSET_FLOOR
    # Offsets below this are not resolved by a + x.
    return (lambda x: f(a + x)), 2.0 ** -30 * max(1.0, abs(a))


def integrate(f: Callable, a: float, b: float = math.inf, *,
              singularity: SingularitySpec | None = None,
              tail: TailSpec | None = None,
              tol: float = DEFAULT_TOL,
              points: Sequence[float] = (),
              offset: bool = False) -> QuadratureResult:
    """Integrate a vectorised ``f`` over ``(a, b)``.

    ``tol`` is absolute below unit scale and relative above it.  With
    ``offset=True`` the integrand is called with ``r - a`` rather than
    ``r``, which keeps full precision at offsets far below ``eps * a``.
    Endpoints are never sampled.
    """
    if not a >= 1.0:
        raise ValueError(f"lower limit {a} is below the horizon")
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if not b > a:
        raise ValueError("need b > a")
    g, floor = _shifted(f, a, offset)
    return _integrate_core(g, 0.0, b - a, singularity, tail, tol,
                           points=[p - a for p in points], floor=floor)


def cumulative(f: Callable, a: float, grid: Sequence[float], *,
               singularity: SingularitySpec | None = None,
               tol: float = DEFAULT_TOL,
               offset: bool = False) -> list[QuadratureResult]:
    """Integrals of ``f`` from ``a`` to each point of an ascending grid."""
    if not a >= 1.0:
        raise ValueError(f"lower limit {a} is below the horizon")
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return []
    if np.any(grid <= a):
        raise ValueError("grid points must lie above the lower limit")
    g, floor = _shifted(f, a, offset)
    values, errors, ok, nev = _cumulative_core(g, grid - a, singularity, tol, floor)
    return [QuadratureResult(float(v), float(e), bool(c), int(k))
            for v, e, c, k in zip(values, errors, ok, nev)]
