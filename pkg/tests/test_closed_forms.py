"""Catenoid profile, collar constants and barrier formulas."""

import numpy as np
import pytest

from helix_mse.closed_forms import (BarrierSpec, CatenoidProfile,
                                    PerronSubsolution, barrier_constant,
                                    catenoid_eval, catenoid_height,
                                    collar_barrier, collar_barrier_spec,
                                    collar_psi, collar_psi_slope,
                                    height_cap, perron_subsolution,
                                    profile_integral, solve_varsigma)

# frozen reference values (30-digit independent quadrature / root solves)
H31 = 1.3110287771460599
H41 = 0.7010910526627271
VS1 = 1.8101705806989773
L1 = 0.6627434193491816


class TestCatenoidHeight:
    def test_unit_height_n3(self):
        assert catenoid_height(3, 1.0) == pytest.approx(H31, abs=1e-9)

    def test_unit_height_n4_smaller(self):
        h4 = catenoid_height(4, 1.0)
        assert h4 == pytest.approx(H41, abs=1e-9)
        assert h4 < catenoid_height(3, 1.0)

    def test_scales_linearly_in_radius(self):
        h1 = catenoid_height(3, 1.0)
        for rho in (0.5, 2.0, 7.0):
            assert catenoid_height(3, rho) == pytest.approx(rho * h1,
                                                            abs=1e-12 * rho)

    def test_rejects_n2(self):
        with pytest.raises(ValueError, match="unbounded"):
            catenoid_height(2, 1.0)

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            catenoid_height(3, 0.0)


class TestCatenoidEval:
    def test_vanishes_at_neck(self):
        for n in (2, 3, 5):
            out = catenoid_eval(CatenoidProfile(n, 1.5), 1.5)
            assert out.value == 0.0
            assert out.slope_saturated

    def test_n2_closed_form(self):
        # the planar profile is rho * arccosh(tau / rho)
        cp = CatenoidProfile(2, 1.0)
        for tau in np.geomspace(1.0, 100.0, 17):
            out = catenoid_eval(cp, float(tau))
            assert out.value == pytest.approx(np.arccosh(tau), abs=1e-10)
        assert catenoid_eval(cp, 10.0).value == pytest.approx(
            2.9932228461263808, abs=1e-10)

    def test_n2_slope_at_sqrt2(self):
        out = catenoid_eval(CatenoidProfile(2, 1.0), np.sqrt(2.0))
        assert out.slope == pytest.approx(1.0, rel=1e-12)

    def test_slope_matches_value_derivative(self):
        cp = CatenoidProfile(3, 1.0)
        for tau in (1.3, 2.0, 5.0):
            for h in (1e-3, 5e-4):
                fd = (catenoid_eval(cp, tau + h).value
                      - catenoid_eval(cp, tau - h).value) / (2 * h)
                assert fd == pytest.approx(catenoid_eval(cp, tau).slope,
                                           abs=30 * h ** 2)

    def test_slope_limits(self):
        cp = CatenoidProfile(3, 1.0)
        assert catenoid_eval(cp, 1.0 + 1e-12).slope > 1e5
        assert catenoid_eval(cp, 1e4).slope < 1e-7

    def test_rejects_inside_neck(self):
        with pytest.raises(ValueError, match="below the neck"):
            catenoid_eval(CatenoidProfile(3, 1.0), 0.9)


class TestBarrierConstant:
    def test_translation_case(self):
        assert barrier_constant(2.0, 3, 0.0, 1.0) == pytest.approx(1.0)
        assert barrier_constant(0.5, 4, 0.0, -2.0) == pytest.approx(6.0)

    def test_example_value(self):
        assert barrier_constant(2.0, 3, 1.0, 1.0) == pytest.approx(1.5)

    def test_large_radius_limit(self):
        assert barrier_constant(1e6, 3, 1.0, 1.0) == pytest.approx(
            0.5, abs=1e-5)

    def test_rejections(self):
        with pytest.raises(ValueError):
            barrier_constant(0.0, 3, 1.0, 1.0)
        with pytest.raises(ValueError):
            barrier_constant(1.0, 3, 1.0, 0.0)


class TestVarsigma:
    def test_unit_value(self):
        assert solve_varsigma(1.0) == pytest.approx(VS1, abs=1e-9)

    @pytest.mark.parametrize("C", [0.1, 1.0, 10.0])
    def test_residual_small(self, C):
        vs = solve_varsigma(C)
        resid = np.cosh(vs / np.sqrt(vs ** 2 - C ** 2)) - vs / C
        assert abs(resid) <= 1e-10

    def test_scaling_identity(self):
        base = solve_varsigma(1.0)
        for C in (0.1, 1.5, 10.0):
            assert solve_varsigma(C) / C == pytest.approx(base, abs=1e-9)

    def test_maximizer_value(self):
        # at the optimal rate, the plateau height equals (vs^2 - C^2)^{-1/2}
        for C in (0.7, 2.5):
            vs = solve_varsigma(C)
            assert np.arccosh(vs / C) / vs == pytest.approx(
                1.0 / np.sqrt(vs ** 2 - C ** 2), abs=1e-10)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            solve_varsigma(0.0)


class TestHeightCap:
    def test_translation_branch(self):
        assert height_cap(1.0, 3, 0.0, 1.0) == pytest.approx(H31, abs=1e-9)

    def test_unit_collar_constant(self):
        # r=8, n=3, lam=1.5, a=1 gives C = 1 exactly
        assert barrier_constant(8.0, 3, 1.5, 1.0) == pytest.approx(1.0)
        assert height_cap(8.0, 3, 1.5, 1.0) == pytest.approx(L1, abs=1e-9)

    def test_inverse_scaling_in_C(self):
        vals = []
        for r, lam in ((8.0, 1.5), (1.0, 1.0), (2.0, 1.0)):
            C = barrier_constant(r, 3, lam, 1.0)
            vals.append(height_cap(r, 3, lam, 1.0) * C)
        np.testing.assert_allclose(vals, vals[0], atol=1e-9)

    def test_rejects_n2(self):
        with pytest.raises(ValueError):
            height_cap(1.0, 2, 1.0, 1.0)


class TestCollarBarrier:
    BS = collar_barrier_spec(1.0, 3, 1.0, 1.0)

    def test_constants(self):
        bs = self.BS
        assert bs.C == pytest.approx(2.5)
        assert bs.varsigma == pytest.approx(2.5 * VS1, abs=1e-8)
        assert bs.t0 == pytest.approx((bs.b - bs.C) / (bs.b * bs.C), abs=1e-14)
        assert bs.L == pytest.approx(L1 / 2.5, abs=1e-9)

    def test_zero_at_obstacle(self):
        w, slope, saturated = collar_barrier(self.BS, 0.0)
        assert w == 0.0
        assert saturated
        assert slope > 1e100

    def test_cap_equals_height_cap_at_optimal_rate(self):
        assert self.BS.cap == pytest.approx(self.BS.L, abs=1e-9)

    def test_continuity_at_collar_edge_exact(self):
        w_in, _, _ = collar_barrier(self.BS, self.BS.t0)
        w_out, slope_out, _ = collar_barrier(self.BS, self.BS.t0 * 1.5)
        assert w_in == w_out  # bitwise: the cap is defined as psi(t0)
        assert slope_out == 0.0

    def test_t0_for_doubled_rate(self):
        bs = collar_barrier_spec(1.0, 3, 1.0, 1.0, b=2 * 2.5)
        assert bs.t0 == pytest.approx(1.0 / (2 * 2.5), abs=1e-15)

    def test_profile_increasing_concave(self):
        b = self.BS.b
        t = np.linspace(1e-6, self.BS.t0, 200)
        slope = collar_psi_slope(b, t)
        assert np.all(slope > 0)
        # psi'' = -b (1 + b t) / ((1 + b t)^2 - 1)^{3/2}
        curv = -b * (1 + b * t) / (b * t * (2 + b * t)) ** 1.5
        assert np.all(curv < 0)
        fd = np.diff(collar_psi(b, t))
        assert np.all(fd > 0)
        assert np.all(np.diff(fd) < 0)

    def test_rate_below_constant_rejected(self):
        with pytest.raises(ValueError, match="must exceed"):
            collar_barrier_spec(1.0, 3, 1.0, 1.0, b=1.0)

    def test_requires_rotation(self):
        with pytest.raises(ValueError, match="lam != 0"):
            collar_barrier_spec(1.0, 3, 0.0, 1.0)


class TestPerronSubsolution:
    def test_zero_on_ball_boundary(self):
        ps = PerronSubsolution(alpha=1.0, c=0.3, n=3)
        assert perron_subsolution(ps, 1.0) == 0.0
        assert perron_subsolution(ps, np.array([1.0, 0.0, 0.0])) == 0.0

    def test_limit_at_infinity(self):
        ps = PerronSubsolution(alpha=1.0, c=0.3, n=3)
        far = perron_subsolution(ps, 1e5)
        assert far == pytest.approx(0.3, abs=1e-4)
        assert far <= 0.3

    def test_zero_target_gives_zero(self):
        ps = PerronSubsolution(alpha=1.0, c=0.0, n=3)
        for tau in (1.0, 2.0, 50.0):
            assert perron_subsolution(ps, tau) == 0.0

    def test_bounded_by_target_and_nonnegative(self):
        ps = PerronSubsolution(alpha=2.0, c=1.1, n=3)
        for tau in np.geomspace(2.0, 1e4, 40):
            val = perron_subsolution(ps, float(tau))
            assert 0.0 <= val <= 1.1

    def test_small_ball_rejected(self):
        with pytest.raises(ValueError, match="too small"):
            PerronSubsolution(alpha=0.1, c=0.3, n=3)


class TestProfileIntegral:
    def test_tail_diverges_for_n2(self):
        with pytest.raises(ValueError, match="diverges"):
            profile_integral(np.inf, 2)

    def test_monotone_in_upper_limit(self):
        vals = [profile_integral(x, 3) for x in (1.0, 1.2, 2.0, 10.0, np.inf)]
        assert vals[0] == 0.0
        assert np.all(np.diff(vals) > 0)
