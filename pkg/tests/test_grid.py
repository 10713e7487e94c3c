"""Tests for the periodic Fourier discretization, projectors, and norms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mhdlab import grid as gr


@pytest.fixture
def grid32():
    return gr.make_grid(32, 32, 2 * np.pi, 4 * np.pi)


def random_field(grid, seed=0, rough=0.2):
    rng = np.random.default_rng(seed)
    f = gr.SpectralField.from_physical(grid, rng.standard_normal((grid.nx, grid.ny)))
    return gr.apply_multiplier(f, np.exp(-rough * grid.A**2))


class TestMakeGrid:
    def test_small_box_wavenumbers(self):
        g = gr.make_grid(4, 4, 2 * np.pi, 2 * np.pi)
        assert g.xi.tolist() == [0.0, 1.0, -2.0, -1.0]
        assert g.eta.tolist() == [0.0, 1.0, -2.0, -1.0]

    def test_mode_radius(self):
        g = gr.make_grid(8, 8, 2 * np.pi, 2 * np.pi)
        assert g.A[1, 1] == pytest.approx(math.sqrt(2.0))
        assert g.A[0, 0] == 0.0

    def test_spacing_scales_with_box(self):
        g = gr.make_grid(4, 4, 4 * np.pi, 4 * np.pi)
        assert g.xi[1] == pytest.approx(0.5)

    @pytest.mark.parametrize("nx,ny", [(3, 4), (4, 5), (2, 4), (0, 4)])
    def test_rejects_bad_sizes(self, nx, ny):
        with pytest.raises(gr.GridError, match="invalid-dimension"):
            gr.make_grid(nx, ny, 1.0, 1.0)

    def test_rejects_bad_lengths(self):
        with pytest.raises(gr.GridError, match="invalid-dimension"):
            gr.make_grid(4, 4, -1.0, 1.0)

    def test_zero_wavenumber_unique(self, grid32):
        assert np.count_nonzero(grid32.xi == 0.0) == 1
        assert np.count_nonzero(grid32.eta == 0.0) == 1

    def test_antisymmetry_off_nyquist(self, grid32):
        n = grid32.nx
        for k in range(1, n):
            if k == n // 2:
                continue
            assert grid32.xi[(-k) % n] == -grid32.xi[k]
        assert grid32.xi_d[n // 2] == 0.0


class TestTransforms:
    def test_roundtrip_random(self, grid32):
        rng = np.random.default_rng(1)
        phys = rng.standard_normal((32, 32))
        f = gr.SpectralField.from_physical(grid32, phys)
        err = np.linalg.norm(f.to_physical() - phys) / np.linalg.norm(phys)
        assert err <= 1e-12

    def test_constant_field_single_mode(self, grid32):
        f = gr.SpectralField.from_physical(grid32, np.ones((32, 32)))
        nz = np.abs(f.coeffs) > 1e-10
        assert nz.sum() == 1 and nz[0, 0]
        assert f.coeffs[0, 0].real == pytest.approx(grid32.area)

    def test_cosine_two_conjugate_modes(self, grid32):
        x = (np.arange(32) * grid32.dx)[:, None] * np.ones((1, 32))
        f = gr.SpectralField.from_physical(grid32, np.cos(x))
        idx = np.argwhere(np.abs(f.coeffs) > 1e-8)
        assert sorted(map(tuple, idx.tolist())) == [(1, 0), (31, 0)]
        assert abs(f.coeffs[1, 0]) == pytest.approx(abs(f.coeffs[31, 0]))

    def test_hermitian_symmetry_of_real_fields(self, grid32):
        f = random_field(grid32, seed=5)
        assert f.is_hermitian(1e-12)

    def test_parseval(self, grid32):
        rng = np.random.default_rng(2)
        phys = rng.standard_normal((32, 32))
        f = gr.SpectralField.from_physical(grid32, phys)
        direct = math.sqrt(grid32.dx * grid32.dy * np.sum(phys**2))
        assert gr.l2_norm(f) == pytest.approx(direct, rel=1e-12)


class TestMultipliers:
    def test_identity(self, grid32):
        f = random_field(grid32)
        out = gr.apply_multiplier(f, lambda XI, ETA: np.ones_like(XI * ETA))
        assert np.allclose(out.coeffs, f.coeffs)

    def test_derivative_of_cosine(self, grid32):
        x = (np.arange(32) * grid32.dx)[:, None] * np.ones((1, 32))
        f = gr.SpectralField.from_physical(grid32, np.cos(x))
        d = gr.deriv_x(f)
        assert np.max(np.abs(d.to_physical() + np.sin(x))) <= 1e-12

    def test_bessel_weight_on_single_mode(self, grid32):
        coeffs = np.zeros((32, 32), complex)
        k = round(1.0 / grid32.xi[1])
        ky = round(1.0 / grid32.eta[1])
        coeffs[k, ky] = 1.0
        coeffs[-k, -ky] = 1.0
        f = gr.SpectralField(grid32, coeffs)
        out = gr.apply_multiplier(f, lambda XI, ETA: 1.0 + XI**2 + ETA**2)
        assert out.coeffs[k, ky] == pytest.approx(3.0)

    def test_rejects_nonfinite_at_populated_mode(self, grid32):
        f = random_field(grid32)
        with np.errstate(divide="ignore"):
            with pytest.raises(gr.GridError, match="non-finite"):
                gr.apply_multiplier(f, lambda XI, ETA: 1.0 / (XI**2 + ETA**2))

    def test_composition_commutes(self, grid32):
        f = random_field(grid32, seed=9)
        m1 = lambda XI, ETA: 1j * XI
        m2 = lambda XI, ETA: 1.0 + XI**2 + ETA**2
        a = gr.apply_multiplier(gr.apply_multiplier(f, m1), m2)
        b = gr.apply_multiplier(gr.apply_multiplier(f, m2), m1)
        both = gr.apply_multiplier(f, lambda XI, ETA: m1(XI, ETA) * m2(XI, ETA))
        scale = np.max(np.abs(a.coeffs))
        assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-14 * scale
        assert np.max(np.abs(a.coeffs - both.coeffs)) <= 1e-14 * scale

    @settings(max_examples=20, deadline=None)
    @given(s=st.floats(min_value=-2.0, max_value=4.0))
    def test_weight_monotone_in_mode(self, s):
        g = gr.make_grid(8, 8, 2 * np.pi, 2 * np.pi)
        w = (1.0 + g.A**2) ** (0.5 * s)
        assert np.all(np.isfinite(w))


class TestProjectors:
    def test_projection_multiplier_idempotent(self, grid32):
        f = random_field(grid32, seed=3)
        once = gr.lp_project(f, 4.0, "le")
        twice = gr.lp_project(once, 4.0, "le")
        sym = gr.lp_projector_symbol(grid32, 4.0, "le")
        flat = np.abs(sym * (1.0 - sym)) < 1e-14
        assert np.allclose(twice.coeffs[flat], once.coeffs[flat], atol=1e-14)

    def test_le_plus_gt_is_identity(self, grid32):
        f = random_field(grid32, seed=4)
        total = gr.lp_project(f, 2.0, "le").coeffs + gr.lp_project(f, 2.0, "ge").coeffs
        assert np.array_equal(total, f.coeffs)

    def test_dyadic_telescoping(self, grid32):
        f = random_field(grid32, seed=6)
        n0 = 0.25
        total = gr.lp_project(f, n0, "le").coeffs.copy()
        n = n0
        while n < 4.0 * grid32.nyquist:
            n *= 2.0
            total = total + gr.lp_project(f, n, "eq").coeffs
        err = np.max(np.abs(total - f.coeffs)) / np.max(np.abs(f.coeffs))
        assert err <= 1e-12

    def test_band_separation(self, grid32):
        # a field supported at A = 4N is annihilated by the N-band projector
        coeffs = np.zeros((32, 32), complex)
        k = 8
        coeffs[k, 0] = 1.0
        coeffs[-k, 0] = 1.0
        f = gr.SpectralField(grid32, coeffs)
        band = gr.lp_project(f, grid32.xi[k] / 4.0, "eq")
        assert np.max(np.abs(band.coeffs)) == 0.0

    def test_bump_profile(self):
        assert gr.bump_chi(np.array([0.5]))[0] == 1.0
        assert gr.bump_chi(np.array([1.0]))[0] == 1.0
        assert gr.bump_chi(np.array([1.0 + 2e-4]))[0] == 0.0
        mid = gr.bump_chi(np.array([1.0 + 5e-5]))[0]
        assert 0.0 < mid < 1.0


class TestNorms:
    def test_constant_norm(self):
        # unit-area-normalized box: ||1||_2 = 1
        g = gr.make_grid(16, 16, 1.0, 1.0)
        one = gr.SpectralField.from_physical(g, np.ones((16, 16)))
        assert gr.sobolev_norm(one, 2.0) == pytest.approx(1.0, rel=1e-12)

    def test_homogeneous_weight_on_unit_frequency(self, grid32):
        x = (np.arange(32) * grid32.dx)[:, None] * np.ones((1, 32))
        f = gr.SpectralField.from_physical(grid32, np.cos(x))
        for gamma in (0.6, 0.75, 1.0):
            assert gr.sobolev_norm(f, gamma, "homogeneous") == pytest.approx(
                gr.l2_norm(f), rel=1e-12)

    def test_sobolev_identity(self, grid32):
        # band-limited below Nyquist so derivative arrays are exact
        f = gr.lp_project(random_field(grid32, seed=8), grid32.nyquist / 2.0, "le")
        lhs = gr.sobolev_norm(f, 2.0) ** 2
        lap = gr.apply_multiplier(f, lambda XI, ETA: -(XI**2 + ETA**2))
        rhs = (gr.l2_norm(f) ** 2
               + 2.0 * (gr.l2_norm(gr.deriv_x(f)) ** 2 + gr.l2_norm(gr.deriv_y(f)) ** 2)
               + gr.l2_norm(lap) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_homogeneous_negative_order_needs_zero_mean(self, grid32):
        one = gr.SpectralField.from_physical(grid32, np.ones((32, 32)))
        with pytest.raises(gr.GridError, match="homogeneous-symbol-singularity"):
            gr.sobolev_norm(one, -0.5, "homogeneous")

    def test_mixed_norm_constant(self, grid32):
        one = gr.SpectralField.from_physical(grid32, np.ones((32, 32)))
        assert gr.mixed_norm_L2x_Linfy(one) == pytest.approx(math.sqrt(grid32.Lx))

    def test_mixed_norm_y_independent(self, grid32):
        x = (np.arange(32) * grid32.dx)[:, None] * np.ones((1, 32))
        f = gr.SpectralField.from_physical(grid32, np.cos(x))
        expect = math.sqrt(grid32.dx * np.sum(np.cos(np.arange(32) * grid32.dx) ** 2))
        assert gr.mixed_norm_L2x_Linfy(f) == pytest.approx(expect, rel=1e-12)

    def test_mixed_norm_separable(self, grid32):
        gx = np.cos(2 * np.arange(32) * grid32.dx) + 0.3
        hy = np.sin(3 * np.arange(32) * grid32.dy) + 2.0
        f = gr.SpectralField.from_physical(grid32, gx[:, None] * hy[None, :])
        expect = math.sqrt(grid32.dx * np.sum(gx**2)) * np.max(np.abs(hy))
        assert gr.mixed_norm_L2x_Linfy(f) == pytest.approx(expect, rel=1e-12)

    def test_bernstein_ratio_bounded(self):
        # band-limited ratios ||P_M f||_q / (M^(d/p-d/q) ||P_M f||_p) stay
        # below a common constant for (p,q) = (1,2) and (2,inf)
        g = gr.make_grid(64, 64, 2 * np.pi, 2 * np.pi)
        rng = np.random.default_rng(123)
        for trial in range(100):
            m_scale = 2.0 ** rng.integers(1, 4)
            f = gr.SpectralField.from_physical(g, rng.standard_normal((64, 64)))
            f = gr.lp_project(f, m_scale, "eq")
            l1 = gr.l1_norm(f)
            l2 = gr.l2_norm(f)
            linf = gr.sobolev_norm(f, 0.0, p=np.inf)
            if l2 == 0.0:
                continue
            assert l2 / (m_scale * l1) < 10.0
            assert linf / (m_scale * l2) < 10.0


class TestXNormSnapshot:
    def test_zero_state(self, grid32):
        snap = gr.x_norm_snapshot(gr.PerturbationState.zeros(grid32), 0.0)
        assert all(v == 0.0 for v in snap.entries.values())

    def test_single_component_localization(self, grid32):
        x = (np.arange(32) * grid32.dx)[:, None] * np.ones((1, 32))
        n = gr.SpectralField.from_physical(grid32, 1e-3 * np.cos(x))
        z = gr.SpectralField.zeros(grid32)
        snap = gr.x_norm_snapshot(gr.PerturbationState(n, z, z, z), 1.0)
        for key, val in snap.entries.items():
            if key.startswith("n:"):
                assert val > 0.0
            else:
                assert val == 0.0

    def test_parameter_validation(self, grid32):
        state = gr.PerturbationState.zeros(grid32)
        with pytest.raises(gr.GridError):
            gr.x_norm_snapshot(state, 0.0, gamma=0.4)
        with pytest.raises(gr.GridError):
            gr.x_norm_snapshot(state, 0.0, gamma_bar=2.0)
        with pytest.raises(gr.GridError):
            gr.x_norm_snapshot(state, 0.0, M=4)

    def test_dual_path_recomputation(self, grid32):
        """Manufactured state: every L^2 entry re-derived through a second,
        physical-space route to 1e-10."""
        rng = np.random.default_rng(77)
        fields = []
        for seed in range(4):
            f = random_field(grid32, seed=seed + 40, rough=0.4)
            fields.append(f * 1e-2)
        state = gr.PerturbationState(*fields)
        snap = gr.x_norm_snapshot(state, 2.0, M=8, gamma=0.75, gamma_bar=1.0)

        def phys_l2(field, weight):
            shaped = gr.apply_multiplier(field, weight)
            phys = shaped.to_physical()
            return math.sqrt(grid32.dx * grid32.dy * np.sum(phys**2))

        n, u, v, psi = state.fields
        bessel = lambda s: (lambda XI, ETA: (1.0 + XI**2 + ETA**2) ** (s / 2.0))
        checks = {
            "n:HM_L2": phys_l2(n, bessel(8)),
            "n:H3_L2": phys_l2(n, bessel(3)),
            "u:L2": math.sqrt(phys_l2(u, bessel(0)) ** 2 + phys_l2(v, bessel(0)) ** 2),
            "psi:dx_L2": phys_l2(psi, lambda XI, ETA: 1j * XI * np.ones_like(ETA + XI)),
        }
        for key, expect in checks.items():
            assert snap.entries[key] == pytest.approx(expect, rel=1e-10), key

    def test_time_weights_reported_separately(self, grid32):
        state = gr.PerturbationState.zeros(grid32)
        snap = gr.x_norm_snapshot(state, 3.0, eps=0.01)
        assert snap.weights["n:H3_L2"] == 0.25
        assert snap.weights["n:HM_L2"] == -0.01
        assert snap.weighted("n:H3_L2") == 0.0


class TestSerialization:
    def test_roundtrip(self, tmp_path, grid32):
        f = random_field(grid32, seed=13)
        gr.save_field(f, tmp_path / "field", name="density", time=2.5)
        back, meta = gr.load_field(tmp_path / "field")
        assert meta["name"] == "density" and meta["time"] == 2.5
        assert meta["nx"] == 32 and meta["Ly"] == pytest.approx(4 * np.pi)
        assert np.max(np.abs(back.to_physical() - f.to_physical())) <= 1e-12

    def test_layout_x_fastest(self, tmp_path, grid32):
        # byte stream iterates x fastest: value at (x_i, y_j) sits at j*nx + i
        phys = np.arange(32 * 32, dtype=float).reshape(32, 32)
        f = gr.SpectralField.from_physical(grid32, phys)
        gr.save_field(f, tmp_path / "f")
        raw = np.frombuffer((tmp_path / "f.bin").read_bytes(), dtype="<f8")
        i, j = 3, 5
        assert raw[j * 32 + i] == pytest.approx(phys[i, j])


class TestPerturbationState:
    def test_shared_grid_enforced(self, grid32):
        other = gr.make_grid(16, 16, 2 * np.pi, 2 * np.pi)
        with pytest.raises(gr.GridError, match="share one grid"):
            gr.PerturbationState(
                gr.SpectralField.zeros(grid32), gr.SpectralField.zeros(grid32),
                gr.SpectralField.zeros(grid32), gr.SpectralField.zeros(other))

    def test_stack_roundtrip(self, grid32):
        state = gr.PerturbationState(*(random_field(grid32, seed=s) for s in range(4)))
        back = gr.PerturbationState.from_stack(grid32, state.stack())
        for a, b in zip(state.fields, back.fields):
            assert np.array_equal(a.coeffs, b.coeffs)
