import math

import numpy as np
import pytest

from oracles import mp_sharpness_denominator, scipy_minimiser_sides
from schwarzhardy.distances import branch_radius, critical_delta, riemannian_distance
from schwarzhardy.geometry import metric_factor
from schwarzhardy.functionals import (
    InadmissibleProfileError,
    RadialProfile,
    bump_profile,
    distance_power_profile,
    euclidean_reference,
    hardy_quotient,
    hat_profile,
    heisenberg_minimiser,
    heisenberg_report,
    modulated,
    profile_diagnostics,
    random_profile,
    sharpness_closed_form_quotient,
    sharpness_denominator,
    sharpness_exponent,
    sharpness_profile,
)
from schwarzhardy.quadrature import TailSpec


def _fd_slope(profile, r, step=1e-6):
    return (profile(r + step) - profile(r - step)) / (2 * step)


class TestSharpnessProfile:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_unit_at_branch(self, n):
        assert sharpness_profile(n, 0.7)(branch_radius(n)) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("n", [3, 4, 6])
    @pytest.mark.parametrize("r", [1.01, 1.2, 2.0, 7.0])
    def test_derivative(self, n, r):
        psi = sharpness_profile(n, 0.8)
        if abs(r - branch_radius(n)) < 1e-3:
            pytest.skip("kink")
        assert psi.slope(r) == pytest.approx(_fd_slope(psi, r), rel=1e-6)

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_exponent_closed_vs_quadrature(self, n):
        r = np.concatenate([1 + np.geomspace(1e-12, 0.5, 8), np.geomspace(2, 1e4, 6)])
        closed = sharpness_exponent(n, r)
        quad = sharpness_exponent(n, r, method="quadrature")
        np.testing.assert_allclose(quad, closed, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_derivative_identity(self, n):
        # |psi'| = eps psi metric_factor / f with f = delta / (n - 2)
        eps = 0.65
        psi = sharpness_profile(n, eps)
        for r in (1.1, branch_radius(n), 2.0, 10.0):
            f = critical_delta(n, r) / (n - 2)
            expected = eps * psi(r) * metric_factor(n, r) / f
            assert abs(psi.slope(r)) == pytest.approx(expected, rel=1e-8)

    @pytest.mark.parametrize("n", [3, 6])
    def test_sign_structure(self, n):
        psi = sharpness_profile(n, 0.75)
        R = branch_radius(n)
        assert np.all(psi.slope(1 + (R - 1) * np.geomspace(1e-9, 0.99, 10)) > 0)
        assert np.all(psi.slope(R * np.geomspace(1.01, 1e5, 10)) < 0)

    def test_exponent_vanishes_at_branch(self):
        assert sharpness_exponent(4, branch_radius(4)) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("eps", [0.5, 0.3, 0.0, -1.0])
    def test_rejects_small_eps(self, eps):
        with pytest.raises(ValueError):
            sharpness_profile(3, eps)

    @pytest.mark.parametrize("n, eps", [(3, 0.7), (5, 0.8), (4, 0.55)])
    def test_denominator_against_mpmath(self, n, eps):
        expected = float(mp_sharpness_denominator(n, eps))
        assert sharpness_denominator(n, eps).value == pytest.approx(expected, rel=1e-9)

    @pytest.mark.parametrize("n", [3, 4, 5, 7])
    @pytest.mark.parametrize("eps", [0.52, 0.6, 0.9, 1.5])
    def test_denominator_closed_form(self, n, eps):
        assert sharpness_denominator(n, eps).value == pytest.approx(
            2 * (n - 2) / (2 * eps - 1), rel=1e-8)

    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("eps", [0.52, 0.7, 1.2])
    def test_quotient(self, n, eps):
        rep = hardy_quotient(n, sharpness_profile(n, eps))
        D = sharpness_denominator(n, eps).value
        assert rep.quotient == pytest.approx(sharpness_closed_form_quotient(n, D), rel=1e-8)
        assert rep.quotient == pytest.approx(((n - 2) * eps) ** 2, rel=1e-8)
        assert rep.margin > 0


class TestHardy:
    def test_constant_bound(self):
        rep = hardy_quotient(5, hat_profile(2.0, 3.0, 5.0))
        assert rep.constant_bound == 2.25
        assert rep.quotient > 2.25

    def test_hat_closed_energy(self):
        # psi' = +-1 on the two halves, so the energy is a weighted length
        from schwarzhardy.quadrature import integrate, SingularitySpec
        from schwarzhardy.geometry import gradient_weight
        rep = hardy_quotient(3, hat_profile(2.0, 3.0, 4.0))
        expected = integrate(lambda r: gradient_weight(3, r), 2.0, 4.0,
                             singularity=SingularitySpec(0.0, "none")).value
        assert rep.numerator == pytest.approx(expected, rel=1e-10)

    def test_slow_horizon_rejected(self):
        flat = RadialProfile(lambda h: np.exp(-h), lambda h: -np.exp(-h), 0.0,
                             TailSpec.exponential())
        with pytest.raises(InadmissibleProfileError):
            hardy_quotient(3, flat)

    def test_slow_infinity_rejected(self):
        with pytest.raises(InadmissibleProfileError):
            hardy_quotient(3, replace_tail(sharpness_profile(3, 0.6), 1.5))

    @pytest.mark.parametrize("kind", ["d", "delta", "s"])
    def test_homogeneous(self, kind):
        psi = distance_power_profile(4, 1.2, 0.7)
        a = hardy_quotient(4, psi, kind).quotient
        b = hardy_quotient(4, psi.scaled(-3.5), kind).quotient
        assert a == pytest.approx(b, rel=1e-12)

    def test_d_weight_uses_kappa(self):
        from schwarzhardy.analysis import kappa_lower_bound
        psi = bump_profile([1.2, 1.3, 1.5], [1.0], [0.0])
        assert hardy_quotient(3, psi, "d").quotient >= kappa_lower_bound(3)


def replace_tail(profile, power):
    from dataclasses import replace
    return replace(profile, infinity_decay=TailSpec.power_law(power))


class TestHeisenberg:
    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("B", [0.5, 1.0, 2.0])
    def test_minimiser_equality(self, n, B):
        rep = heisenberg_report(n, heisenberg_minimiser(n, B))
        assert abs(rep.relative_slack) <= 1e-10
        assert rep.moment == pytest.approx(rep.energy / B ** 2, rel=1e-10)

    @pytest.mark.parametrize("n, B", [(3, 1.0), (5, 2.0)])
    def test_minimiser_against_quadpack(self, n, B):
        lhs, moment = scipy_minimiser_sides(n, B)
        rep = heisenberg_report(n, heisenberg_minimiser(n, B))
        assert rep.lhs == pytest.approx(lhs, rel=1e-9)
        assert rep.moment == pytest.approx(moment, rel=1e-9)

    def test_minimiser_derivative(self):
        psi = heisenberg_minimiser(4, 1.5)
        for r in (1.1, 2.0, 3.5):
            assert psi.slope(r) == pytest.approx(_fd_slope(psi, r), rel=1e-6)

    @pytest.mark.parametrize("B", [0.0, -1.0])
    def test_nonpositive_B(self, B):
        with pytest.raises(ValueError):
            heisenberg_minimiser(3, B)

    def test_bump_strict(self):
        psi = bump_profile([2.0, 3.0, 4.0], [1.0], [0.0])
        assert heisenberg_report(3, psi).slack > 0

    def test_perturbed_minimiser_strict(self):
        psi = modulated(3, heisenberg_minimiser(3, 1.0), 0.1)
        assert heisenberg_report(3, psi).slack > 0

    def test_power_tail_rejected(self):
        psi = sharpness_profile(3, 0.9)
        with pytest.raises(InadmissibleProfileError):
            heisenberg_report(3, psi)

    def test_scale_invariant_ratio(self):
        psi = distance_power_profile(3, 1.0, 1.0)
        assert heisenberg_report(3, psi).ratio == pytest.approx(
            heisenberg_report(3, psi.scaled(7.0)).ratio, rel=1e-12)


class TestProfiles:
    def test_bump_support_and_knots(self):
        psi = bump_profile([2.0, 2.5, 3.0, 4.0], [1.0, -0.5], [0.3, 0.0])
        assert psi(2.5) == pytest.approx(1.0)
        assert psi(1.5) == 0.0 and psi(4.5) == 0.0
        assert psi.breakpoints == (2.5, 3.0)

    def test_bump_rejects_bad_knots(self):
        with pytest.raises(ValueError):
            bump_profile([1.0, 2.0, 3.0], [1.0], [0.0])
        with pytest.raises(ValueError):
            bump_profile([2.0, 1.5, 3.0], [1.0], [0.0])

    def test_hat_rejects_order(self):
        with pytest.raises(ValueError):
            hat_profile(3.0, 2.0, 4.0)

    def test_distance_power_derivative(self):
        psi = distance_power_profile(5, 1.3, 0.8)
        for r in (1.05, 2.0, 6.0):
            assert psi.slope(r) == pytest.approx(_fd_slope(psi, r, 1e-7), rel=1e-6)

    def test_modulated_value(self):
        base = distance_power_profile(3, 1.0, 1.0)
        psi = modulated(3, base, 0.1)
        r = 2.0
        assert psi(r) == pytest.approx(base(r) * (1 + 0.1 * math.sin(riemannian_distance(3, r))))
        assert psi.slope(r) == pytest.approx(_fd_slope(psi, r), rel=1e-6)

    @pytest.mark.parametrize("family", ["bump", "hat", "distance_power"])
    def test_random_families(self, family):
        rng = np.random.default_rng(3)
        for _ in range(5):
            psi = random_profile(rng, 4, family)
            assert hardy_quotient(4, psi).margin > 0

    def test_random_unknown_family(self):
        with pytest.raises(ValueError):
            random_profile(np.random.default_rng(0), 3, "spline")

    def test_random_reproducible(self):
        a = random_profile(np.random.default_rng(11), 3)
        b = random_profile(np.random.default_rng(11), 3)
        assert a.name == b.name and a(3.0) == b(3.0)


class TestEuclidean:
    def test_needs_far_support(self):
        with pytest.raises(ValueError):
            euclidean_reference(3, hat_profile(2.0, 3.0, 4.0))

    def test_flat_inequalities(self):
        psi = bump_profile([100.0, 150.0, 200.0], [1.0], [0.0])
        hardy, heis = euclidean_reference(3, psi)
        assert hardy >= 0.25
        assert heis >= 1.0


class TestDiagnostics:
    @pytest.mark.parametrize("make", [
        lambda: sharpness_profile(3, 0.7),
        lambda: heisenberg_minimiser(4, 1.0),
        lambda: distance_power_profile(5, 1.5, 0.5),
        lambda: bump_profile([2.0, 3.0, 5.0], [1.0], [-0.2]),
        lambda: hat_profile(1.5, 2.0, 3.0),
    ])
    def test_declared_behaviour(self, make):
        psi = make()
        diag = profile_diagnostics(3, psi)
        assert diag["derivative_mismatch"] < 1e-6
        horizon, infinity = diag["horizon_decay"], diag["infinity_decay"]
        if horizon is not None and psi.horizon_decay > 0.25:
            assert horizon[0] > horizon[1] > horizon[2]
        if infinity is not None:
            assert infinity[-1] <= infinity[0]

    def test_wrong_derivative_detected(self):
        from dataclasses import replace
        psi = sharpness_profile(3, 0.7)
        bad = replace(psi, derivative=lambda h: 1.1 * psi.derivative(h))
        assert profile_diagnostics(3, bad)["derivative_mismatch"] > 0.05

    def test_slow_decay_visible(self):
        slow = RadialProfile(lambda h: 1.0 / (1.0 + h), lambda h: -1.0 / (1.0 + h) ** 2, 0.0,
                             TailSpec.power_law(0.0))
        diag = profile_diagnostics(4, slow)
        assert diag["horizon_decay"][-1] > diag["horizon_decay"][0]
        assert diag["infinity_decay"][-1] >= 0.99
