import json
import math

import numpy as np
import pytest

from oracles import KAPPA_3, RATIO_AT_4_3
from schwarzhardy.analysis import (
    Check,
    VerificationReport,
    distance_ratio,
    full_verification,
    golden_section,
    kappa_lower_bound,
    limit_suite,
    ratio_infimum,
    sharpness_table,
)
from schwarzhardy.distances import branch_radius


class TestGoldenSection:
    def test_interior_minimum(self):
        x, fx, (a, b) = golden_section(lambda t: (t - 0.3) ** 2, 0.0, 1.0, tol=1e-10)
        assert x == pytest.approx(0.3, abs=1e-9)
        assert a <= x <= b and b - a <= 1e-10

    def test_endpoint_minimum(self):
        x, _, _ = golden_section(lambda t: t, 2.0, 5.0)
        assert x == 2.0


class TestCheck:
    def test_abs_and_rel(self):
        assert Check("a", 1.0005, 1.0, 1e-3).passed
        assert not Check("a", 1.01, 1.0, 1e-3).passed
        assert Check("b", 200.1, 200.0, 1e-3, "rel").passed

    def test_mode_validated(self):
        with pytest.raises(ValueError):
            Check("a", 1.0, 1.0, 0.1, "ulp")

    def test_schema(self):
        report = VerificationReport(3)
        report.add("x", 1.0, 1.0, 0.0)
        payload = json.loads(report.to_json())
        assert payload == {"n": 3, "checks": [{"name": "x", "computed": 1.0, "reference": 1.0,
                                               "tolerance": 0.0, "mode": "abs", "pass": True}]}
        assert report["x"].passed
        with pytest.raises(KeyError):
            report["y"]


class TestRatioInfimum:
    def test_n3(self):
        res = ratio_infimum(3)
        assert res.min_ratio == pytest.approx(RATIO_AT_4_3, rel=1e-12)
        assert res.refined
        assert res.bracket[0] <= res.argmin_r <= res.bracket[1]
        assert res.bracket[1] - res.bracket[0] < 1e-8
        # reported, not required: whether the infimum sits at R
        print(f"n=3 argmin {res.argmin_r!r} at branch radius: {res.at_branch_radius}")

    @pytest.mark.parametrize("n", range(3, 9))
    def test_below_grid_and_limits(self, n):
        res = ratio_infimum(n)
        h = np.geomspace(1e-6, 1e4 - 1, 2000)
        assert res.min_ratio <= np.min(distance_ratio(n, 1 + h)) + 1e-15
        assert res.min_ratio <= min(1 / (n - 2), 1.0) + 1e-6

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_grid_stability(self, n):
        assert abs(ratio_infimum(n, 4000).min_ratio - ratio_infimum(n).min_ratio) <= 1e-8

    def test_n4_value(self):
        # d(R) = sqrt(R^2 - 1) = 1/sqrt(3) and delta(R) = R^3
        R = branch_radius(4)
        assert ratio_infimum(4).min_ratio == pytest.approx(math.sqrt(R * R - 1) / R ** 3, rel=1e-12)


class TestKappa:
    def test_n3(self):
        assert kappa_lower_bound(3) == pytest.approx(KAPPA_3, rel=1e-12)
        assert round(kappa_lower_bound(3), 3) == 0.117

    @pytest.mark.parametrize("n", range(3, 9))
    def test_below_sharp_constant(self, n):
        assert 0 < kappa_lower_bound(n) < ((n - 2) / 2) ** 2


class TestLimitSuite:
    @pytest.mark.parametrize("n", range(3, 9))
    def test_all_pass(self, n):
        report = limit_suite(n)
        assert report.all_passed, [c.name for c in report.failures]

    def test_examples(self):
        assert limit_suite(3)["d_horizon"].computed == pytest.approx(2.0, abs=1e-3)
        assert limit_suite(4)["delta_far"].deviation <= 1e-5
        assert limit_suite(5)["s_far"].deviation <= 1e-4


class TestSharpnessTable:
    def test_monotone_and_above(self):
        report = sharpness_table(3, [0.9, 0.6, 0.52])
        q = [row["quotient_quadrature"] for row in report.data["sharpness"]]
        assert q[0] > q[1] > q[2] > 0.25
        assert report.all_passed

    def test_order_of_input_irrelevant(self):
        assert sharpness_table(4, [0.6, 0.9]).all_passed

    def test_rejects_half(self):
        with pytest.raises(ValueError):
            sharpness_table(3, [0.9, 0.5])


class TestFullVerification:
    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_passes(self, n):
        report = full_verification(n)
        assert report.all_passed, [(c.name, c.computed) for c in report.failures]
        assert report.notes

    def test_kappa_reference(self):
        check = full_verification(3)["kappa_lower_bound"]
        assert check.reference == 0.117
