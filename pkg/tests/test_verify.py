"""Tests for the inequality scanners and the aggregated report."""

import json
import math

import numpy as np
import pytest

from mhdlab import kernel as kr
from mhdlab import verify as vf


class TestKernelBoundScans:
    @pytest.mark.parametrize("which", range(1, 9))
    def test_scan_passes(self, which):
        res = vf.scan_kernel_bounds(which, n_t=8, n_a=16, n_angle=16)
        assert res.verdict == "PASS"
        assert res.fitted_C <= 1e3
        assert res.refine_stable

    def test_ratio_zero_at_t_zero_for_kernel(self):
        # the t = 0 row contributes nothing for the plain kernel estimate
        kv = kr.kernel_values(0.0, 1.3, 0.7)
        assert kv.K == 0.0

    def test_worst_case_reproducible(self):
        res = vf.scan_kernel_bounds(1, n_t=8, n_a=16, n_angle=16)
        again = vf.reevaluate_kernel_bound(1, res.worst)
        assert again == pytest.approx(res.worst["ratio"], abs=1e-10)

    def test_spot_high_frequency(self):
        # A = 1e3, t = 10: dominated by the anisotropic branch, finite ratio
        kv = kr.kernel_values(10.0, 30.0, math.sqrt(1e6 - 900.0))
        rhs = kr.bound_envelope(1, 10.0, 30.0, math.sqrt(1e6 - 900.0))
        assert np.isfinite(kv.K) and np.isfinite(rhs)
        assert abs(kv.K) <= 1e3 * rhs

    def test_bitwise_reproducible(self):
        a = vf.scan_kernel_bounds(2, n_t=6, n_a=8, n_angle=8)
        b = vf.scan_kernel_bounds(2, n_t=6, n_a=8, n_angle=8)
        assert a.fitted_C == b.fitted_C
        assert a.worst == b.worst


class TestElem1:
    def test_pass(self):
        res = vf.check_elem1(samples=8000, seed=0)
        assert res.verdict == "PASS"
        assert res.fitted_C <= 20.0

    def test_small_t_negative_branch(self):
        # b + c < 0 with small t: the cubic alternative dominates
        ratio = vf.elem1_ratio(-2.0, 1.0, 0.01)
        assert 0 < float(ratio) <= 20.0

    def test_c_to_zero_limit_finite(self):
        vals = [float(vf.elem1_ratio(-0.5, 10.0**-j, 1.0)) for j in range(3, 10)]
        assert all(np.isfinite(v) for v in vals)
        assert max(vals) - min(vals) <= 0.1 * max(vals)

    def test_heavily_damped_zero_safe(self):
        # a = 10, t = 10 kills I entirely; the factored ratio stays finite
        assert np.isfinite(float(vf.elem1_ratio(-50.0, 1.0, 10.0)))

    def test_rejects_empty_budget(self):
        with pytest.raises(ValueError, match="invalid-budget"):
            vf.check_elem1(samples=0)


class TestSinRatio:
    def test_pass(self):
        res = vf.check_sin_ratio(samples=30000, seed=0)
        assert res.verdict == "PASS"
        assert res.fitted_C <= 10.0

    def test_equal_arguments_zero(self):
        x = 1.234
        lhs = abs(np.sinc(x / np.pi) - np.sinc(x / np.pi))
        assert lhs == 0.0

    def test_sin_zeros(self):
        lhs = abs(math.sin(math.pi) / math.pi - math.sin(2 * math.pi) / (2 * math.pi))
        assert lhs <= 1e-16

    def test_small_argument_taylor_ratio(self):
        # |sin x/x - sin y/y| ~ |x^2 - y^2|/6 to leading order, so the ratio
        # against ||x|-|y|| (|x|+|y|) approaches 1/6 and stays well under cap
        x, y = 0.1, 0.2
        lhs = abs(math.sin(x) / x - math.sin(y) / y)
        rhs = abs(x - y) * (x + y)
        assert lhs == pytest.approx(abs(x**2 - y**2) / 6.0, rel=0.01)
        assert lhs / rhs == pytest.approx(1.0 / 6.0, rel=0.05)


class TestBasicQuadrature:
    @pytest.mark.parametrize("claim", sorted(vf.BASIC_QUAD_CLAIMS))
    def test_claim_passes(self, claim):
        res = vf.check_basic_quadrature(claim)
        assert res.verdict == "PASS", (claim, res.extra)
        assert abs(res.extra["fitted_slope"] - res.extra["target_slope"]) <= 0.1

    def test_t_zero_plain_area(self):
        # without decay the est_At integrand reduces to the area integral
        val = vf._quad_claim("est_At", 0.0, {"beta": 0.0, "c": 0.25}, 1)
        assert val == pytest.approx(math.pi, rel=1e-3)

    def test_unknown_claim(self):
        with pytest.raises(KeyError):
            vf.check_basic_quadrature("nope")


class TestProjectorDerivative:
    def test_pass(self):
        res = vf.check_projector_derivative(samples=30, seed=0)
        assert res.verdict == "PASS"
        assert res.fitted_C <= 10.0

    def test_beta_zero_cutoff_is_static(self):
        # <s>^0 = 1: the moving cutoff freezes and the difference vanishes
        from mhdlab import grid as gr
        g = gr.make_grid(32, 32, 2 * np.pi, 2 * np.pi)
        s, h = 7.0, 0.7
        n_plus = math.sqrt(1.0 + (s + h) ** 2) ** 0.0
        n_minus = math.sqrt(1.0 + (s - h) ** 2) ** 0.0
        sym = gr.bump_chi(g.A / n_plus) - gr.bump_chi(g.A / n_minus)
        assert np.max(np.abs(sym)) == 0.0

    def test_disjoint_support_zero_safe(self):
        # fields away from the moving band contribute nothing
        from mhdlab import grid as gr
        g = gr.make_grid(32, 32, 2 * np.pi, 2 * np.pi)
        coeffs = np.zeros((32, 32), complex)
        coeffs[1, 0] = coeffs[-1, 0] = 1.0  # A = 1
        s = 100.0  # cutoff ~ <s> = 100, far above A = 1
        h = 0.1 * math.sqrt(1 + s * s)
        n_plus = math.sqrt(1.0 + (s + h) ** 2)
        n_minus = math.sqrt(1.0 + (s - h) ** 2)
        sym = (gr.bump_chi(g.A / n_plus) - gr.bump_chi(g.A / n_minus)) / (2 * h)
        lhs = np.max(np.abs(sym * coeffs))
        assert lhs == 0.0


class TestNash:
    def test_pass(self):
        res = vf.check_nash_anisotropic(samples=60, seed=0)
        assert res.verdict == "PASS"
        assert res.fitted_C <= 100.0

    def test_single_mode_closed_form(self):
        from mhdlab import grid as gr
        g = gr.make_grid(32, 32, 2 * np.pi, 2 * np.pi)
        coeffs = np.zeros((32, 32), complex)
        coeffs[1, 1] = coeffs[-1, -1] = g.area / 2.0  # psi = cos(x + y)
        psi = gr.SpectralField(g, coeffs)
        gamma, gamma_bar = 0.75, 1.0
        A = math.sqrt(2.0)
        lhs = A**gamma_bar * math.sqrt(1.0 + A**2) * 1.0  # sup of weighted cos
        r1 = (1.0 + A**2) ** 2 * A**gamma * gr.l2_norm(psi)
        r2 = A * 1.0 * gr.l2_norm(psi)  # |xi| * A * ||psi||
        got_lhs = gr.sobolev_norm(
            gr.apply_multiplier(psi, gr.homog_weight(g, gamma_bar)), 1, p=np.inf)
        assert got_lhs == pytest.approx(lhs, rel=1e-12)
        ratio = got_lhs / (math.sqrt(r1) * math.sqrt(r2))
        assert 0.0 < ratio < 100.0


class TestRunAll:
    @pytest.mark.slow
    def test_full_report(self, tmp_path):
        report = tmp_path / "report.json"
        results = vf.run_all(report_path=report, seed=0)
        payload = json.loads(report.read_text())
        assert sorted(payload) == sorted(results)
        failed = [cid for cid, r in results.items() if r.verdict == "FAIL"]
        assert failed == []
        assert payload["elem1"]["verdict"] == "PASS"
        # info-only claims are reported but not gated
        assert payload["kn3_open"]["verdict"] == "INFO"
