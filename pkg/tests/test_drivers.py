"""Existence-construction drivers and barrier certificates."""

import numpy as np
import pytest

from helix_mse.closed_forms import (catenoid_height, collar_barrier_spec,
                                    profile_integral)
from helix_mse.domains import exterior_ball, figure1_circle
from helix_mse.drivers import (FamilyConfig, HeightCapError, catenoid_barrier,
                               certify_barriers, collar_sign_barrier,
                               gradient_constrained_family,
                               gradient_decay_check,
                               height_prescribed_solution)
from helix_mse.solver import radial_solve

DOM = exterior_ball(1.0)


def small_cfg(n, lam=1.0, a=1.0, **kw):
    kw.setdefault("nx", 384)
    kw.setdefault("bisect_tol", 1e-6)
    return FamilyConfig(n=n, lam=lam, a=a, **kw)


@pytest.fixture(scope="module")
def fam_planar():
    return gradient_constrained_family(1.0, DOM, [10.0, 20.0], small_cfg(2))


@pytest.fixture(scope="module")
def fam_spatial():
    return gradient_constrained_family(1.0, DOM, [10.0, 40.0, 80.0],
                                       small_cfg(3))


class TestFamilyPlanar:
    def test_budget_binds_at_obstacle(self, fam_planar):
        for rung in fam_planar.rungs:
            assert rung.sup_on_inner
            assert rung.boundary_gradient == pytest.approx(1.0, abs=1e-4)
            assert rung.sup_gradient <= 1.0 + 1e-12

    def test_heights_increase_along_ladder(self, fam_planar):
        t = [r.t_k for r in fam_planar.rungs]
        assert t[1] >= t[0] - 1e-8

    def test_inner_slope_parameter_recovered(self, fam_planar):
        # budget 1 pins the family constant at 1/sqrt(2)
        assert fam_planar.recovered_inner_c == pytest.approx(1 / np.sqrt(2), abs=1e-3)

    def test_heights_match_planar_family(self, fam_planar):
        c = 1 / np.sqrt(2.0)
        for rung in fam_planar.rungs:
            exact = c * (np.arccosh(rung.R / c) - np.arccosh(1.0 / c))
            assert rung.t_k == pytest.approx(exact, abs=5e-4)

    def test_growth_fit_reported(self, fam_planar):
        assert fam_planar.dichotomy == "unbounded-n2"
        assert fam_planar.growth_fit is not None
        assert "rms_residual" in fam_planar.growth_fit

    def test_no_anomalies(self, fam_planar):
        assert fam_planar.anomalies == []

    def test_trace_monotone(self, fam_planar):
        for rung in fam_planar.rungs:
            g_of_t = [g for _, g in rung.bisection_trace]
            assert all(b >= a - 1e-8 for a, b in zip(g_of_t, g_of_t[1:]))


class TestFamilyTrivialBudget:
    def test_zero_budget_gives_zero_solutions(self):
        fam = gradient_constrained_family(0.0, DOM, [8.0, 12.0],
                                          small_cfg(3, nx=128))
        for rung in fam.rungs:
            assert rung.t_k == 0.0
            assert rung.sup_interior == 0.0
            assert rung.sup_gradient == pytest.approx(0.0, abs=1e-13)


class TestFamilySpatial:
    def test_heights_below_catenoid_cap(self, fam_spatial):
        h = catenoid_height(3, 1.0)
        for rung in fam_spatial.rungs:
            assert rung.sup_interior <= h + 1e-3

    def test_neck_parameter(self, fam_spatial):
        # inner slope budget 1: beta^4 = s^2/(1+s^2) = 1/2
        assert fam_spatial.recovered_inner_c == pytest.approx(0.5 ** 0.25, abs=1e-3)

    def test_dichotomy_classified(self, fam_spatial):
        assert fam_spatial.dichotomy == "bounded-below-h"
        assert fam_spatial.h_ref == pytest.approx(catenoid_height(3, 1.0), abs=1e-9)

    def test_cauchy_diffs_below_floor(self, fam_spatial):
        for prev, nxt in zip(fam_spatial.cauchy_diffs, fam_spatial.cauchy_diffs[1:]):
            assert nxt <= max(prev, fam_spatial.cauchy_floor)

    def test_decay_trend(self, fam_spatial):
        out = gradient_decay_check(fam_spatial)
        assert out["verdict"] == "consistent with decay"
        vals = out["outer_gradients"]
        assert vals == sorted(vals, reverse=True)

    def test_decay_needs_three_rungs(self):
        fam2 = gradient_constrained_family(0.0, DOM, [8.0, 12.0],
                                           small_cfg(3, nx=96))
        with pytest.raises(ValueError, match="3 ladder rungs"):
            gradient_decay_check(fam2)


class TestFamilyDecayClosedForm:
    def test_translation_case_matches_catenoid_slope(self):
        # lam = 0: outer gradients follow 1/sqrt((tau/beta)^{2(n-1)} - 1)
        cfg = small_cfg(3, lam=0.0, nx=384)
        fam = gradient_constrained_family(1.0, DOM, [8.0, 12.0, 18.0], cfg)
        beta = fam.recovered_inner_c
        for rung in fam.rungs:
            tau_edge = 1.0 + (2.0 / 3.0) * (rung.R - 1.0)
            expect = 1.0 / np.sqrt((tau_edge / beta) ** 4 - 1.0)
            assert rung.outer_gradient == pytest.approx(expect, rel=0.05)


class TestFigure1Family:
    def test_smoke(self):
        dom = figure1_circle()
        cfg = FamilyConfig(n=2, lam=1.0, a=1.0, nx=56, ny=72,
                           bisect_tol=2e-2)
        fam = gradient_constrained_family(1.0, dom, [8.0, 11.0], cfg)
        assert len(fam.rungs) == 2
        for rung in fam.rungs:
            assert rung.t_k > 0.0
            assert rung.min_value >= -1e-10
            assert rung.inner_max_abs == 0.0
            assert rung.sup_gradient <= 1.0 + 1e-12


class TestCertificates:
    def test_collar_supersolution_sign(self):
        bs = collar_barrier_spec(1.0, 3, 1.0, 1.0)
        rep = radial_solve(3, 1.0, 1.0, 1.0, 1.0 + bs.t0, 0.0, 0.0, nx=256)
        certs = certify_barriers(rep, [collar_sign_barrier(bs, 1.0)])
        assert len(certs) == 1
        assert certs[0].verdict == "pass"
        assert certs[0].kind == "supersolution-sign"
        assert "excluded" in certs[0].note

    def test_catenoid_exact_solution_signs(self):
        rep = radial_solve(3, 1.0, 1.0, 1.0, 8.0, 0.0, 0.0, nx=256)
        certs = certify_barriers(rep, [catenoid_barrier(3, 1.0)])
        kinds = {c.kind for c in certs}
        assert kinds == {"supersolution-sign", "subsolution-sign"}
        assert all(c.verdict == "pass" for c in certs)

    def test_constant_barrier_sandwich(self):
        # constants solve the equation; the max of the data bounds the solve
        rep = radial_solve(3, 1.0, 1.0, 1.0, 8.0, 0.0, 0.4, nx=192)
        from helix_mse.drivers import RadialBarrier
        const = RadialBarrier(name="const(0.4)",
                              profile=lambda tau: np.full_like(
                                  np.asarray(tau, dtype=float), 0.4),
                              role="supersolution", compare="upper")
        certs = certify_barriers(rep, [const])
        assert all(c.verdict == "pass" for c in certs)
        sign = [c for c in certs if c.kind == "supersolution-sign"][0]
        assert sign.max_violation == 0.0

    def test_family_solution_under_circumscribed_catenoid(self):
        cfg = small_cfg(3, nx=256)
        fam = gradient_constrained_family(1.0, DOM, [10.0], cfg)
        from helix_mse.solver import SolveReport
        fld = fam.fields[-1]
        rep = SolveReport(field=fld, residual_norm=0.0, newton_iterations=0,
                          converged=True)
        certs = certify_barriers(rep, [catenoid_barrier(3, 1.0,
                                                        compare="upper")])
        sandwich = [c for c in certs if c.kind == "sandwich"][0]
        assert sandwich.verdict == "pass"

    def test_unconverged_report_rejected(self):
        rep = radial_solve(2, 1.0, 1.0, 1.0, 8.0, 0.0,
                           3.0 * profile_integral(8.0, 2), nx=96)
        assert not rep.ok
        rep.converged = False
        with pytest.raises(ValueError, match="converged"):
            certify_barriers(rep, [])


class TestHeightPrescribed:
    def test_zero_target_trivial(self):
        rep = height_prescribed_solution(0.0, DOM, [10.0],
                                         small_cfg(3, lam=0.0, nx=128))
        assert np.abs(rep.final.field.values).max() == 0.0
        assert rep.all_pass

    def test_translation_case_heights_trend(self):
        rep = height_prescribed_solution(0.3, DOM, [20.0, 50.0],
                                         small_cfg(3, lam=0.0, nx=384))
        gaps = [r.gap_to_target for r in rep.rungs]
        assert gaps[1] < gaps[0]
        assert rep.all_pass

    def test_truncated_solution_matches_family_member(self):
        # exact truncated solution: the catenoid member whose value at R is c
        from scipy.optimize import brentq
        c, R = 0.3, 50.0
        rep = height_prescribed_solution(c, DOM, [R],
                                         small_cfg(3, lam=0.0, nx=512))

        def height_at_R(beta):
            return beta * (profile_integral(R / beta, 3)
                           - profile_integral(1.0 / beta, 3)) - c

        beta = brentq(height_at_R, 0.05, 0.9999)
        g = rep.final.field.grid
        exact = np.array([beta * (profile_integral(t / beta, 3)
                                  - profile_integral(1.0 / beta, 3))
                          for t in g.x])
        assert np.abs(rep.final.field.values[:, 0] - exact).max() < 1e-5

    def test_rotational_case_certificates(self):
        rep = height_prescribed_solution(0.2, DOM, [20.0, 40.0],
                                         small_cfg(3, nx=384))
        assert rep.all_pass
        kinds = sorted(c.kind for c in rep.certificates)
        assert kinds == ["sandwich", "sandwich", "subsolution-sign",
                         "supersolution-sign"]

    def test_cap_enforced_rotational(self):
        with pytest.raises(HeightCapError) as exc:
            height_prescribed_solution(0.3, DOM, [20.0], small_cfg(3))
        assert exc.value.cap == pytest.approx(0.2650973677, abs=1e-8)

    def test_cap_enforced_translation(self):
        with pytest.raises(HeightCapError):
            height_prescribed_solution(1.4, DOM, [20.0],
                                       small_cfg(3, lam=0.0))

    def test_cap_boundary_value_accepted(self):
        cfg = small_cfg(3, nx=192)
        cap = 0.26509736773967263
        rep = height_prescribed_solution(cap, DOM, [20.0], cfg)
        assert rep.final.ok

    def test_requires_spatial_dimension(self):
        with pytest.raises(ValueError, match="n >= 3"):
            height_prescribed_solution(0.1, DOM, [10.0], small_cfg(2))
