import math

import numpy as np
import pytest

from bufferhawkes import (
    DomainError,
    ModelParams,
    cluster_mean,
    cluster_var,
    cumulant_v,
    derived_constants,
    first_moments,
    log_mgf_n,
    second_moments,
    stationary_stats,
    v_infinity,
    var_n_cluster,
)
from bufferhawkes.moments import write_curves_csv


class TestFirstMoments:
    def test_initial_values(self, desk):
        ell, g, m = first_moments(desk, 0.0)
        assert ell == pytest.approx(desk.lambda0)
        assert g == pytest.approx(0.0, abs=1e-14)
        assert m == pytest.approx(0.0, abs=1e-14)

    def test_limits_at_large_t(self, desk):
        dc = derived_constants(desk)
        ell, g, m = first_moments(desk, 50.0)
        assert ell == pytest.approx(dc.ell_inf, abs=1e-6)
        assert g == pytest.approx(dc.g_inf, abs=1e-6)
        # m grows linearly with slope c * g_inf
        ell2, g2, m2 = first_moments(desk, 49.0)
        assert m - m2 == pytest.approx(desk.c * dc.g_inf, abs=1e-6)

    def test_no_feedback_closed_form(self, no_feedback):
        # a = 0: the book is M/M/infinity, E Gamma_t = (lambda0/(c+d))(1 - e^{-(c+d)t})
        p = no_feedback
        cd = p.c + p.d
        for t in (0.3, 1.0, 4.0):
            ell, g, m = first_moments(p, t)
            assert ell == pytest.approx(p.lambda0, rel=1e-12)
            assert g == pytest.approx(p.lambda0 / cd * (1 - math.exp(-cd * t)), rel=1e-10)

    def test_degenerate_double_root(self):
        # a = 0 with b = c + d hits the repeated-root branch of the formulas
        p = ModelParams(lambda0=2.0, a=0.0, b=2.0, c=1.5, d=0.5)
        cd = p.c + p.d
        for t in (0.5, 2.0, 10.0):
            ell, g, m = first_moments(p, t)
            assert ell == pytest.approx(p.lambda0, rel=1e-12)
            assert g == pytest.approx(p.lambda0 / cd * (1 - math.exp(-cd * t)), rel=1e-8)

    def test_vectorized(self, desk):
        t = np.array([0.0, 1.0, 2.0])
        ell, g, m = first_moments(desk, t)
        assert ell.shape == (3,)
        e1, g1, m1 = first_moments(desk, 1.0)
        assert ell[1] == pytest.approx(float(e1))

    def test_ode_oracle(self, desk):
        # independent check: integrate the raw first-moment ODEs
        from scipy.integrate import solve_ivp

        p = desk
        cd = p.c + p.d

        def rhs(t, y):
            ell, g, m = y
            return (-p.b * (ell - p.lambda0) + p.a * p.c * g, ell - cd * g, p.c * g)

        sol = solve_ivp(rhs, (0, 10), (p.lambda0, 0, 0), rtol=1e-11, atol=1e-13, t_eval=[10.0])
        ell, g, m = first_moments(p, 10.0)
        assert float(ell) == pytest.approx(sol.y[0, -1], rel=1e-8)
        assert float(g) == pytest.approx(sol.y[1, -1], rel=1e-8)
        assert float(m) == pytest.approx(sol.y[2, -1], rel=1e-8)


class TestClusterMoments:
    def test_boundaries(self, desk):
        dc = derived_constants(desk)
        assert float(cluster_mean(desk, 0.0)) == pytest.approx(1.0)
        assert float(cluster_var(desk, 0.0)) == pytest.approx(0.0, abs=1e-14)
        assert float(cluster_mean(desk, 60.0)) == pytest.approx(dc.x_inf, abs=1e-9)
        assert float(cluster_var(desk, 60.0)) == pytest.approx(dc.y_inf, abs=1e-9)

    def test_richardson_derivative(self, desk):
        # x'(t) should match the defining integral equation's derivative
        # estimated by step-halving extrapolation
        t0, h = 1.5, 1e-3
        x = lambda t: float(cluster_mean(desk, t))
        d1 = (x(t0 + h) - x(t0 - h)) / (2 * h)
        d2 = (x(t0 + h / 2) - x(t0 - h / 2)) / h
        richardson = (4 * d2 - d1) / 3.0
        # derivative from the exponential-sum coefficients
        from bufferhawkes.moments import _x_coeffs

        A, B, C, q1, q2 = _x_coeffs(desk)
        exact = -q1 * B * math.exp(-q1 * t0) - q2 * C * math.exp(-q2 * t0)
        assert richardson == pytest.approx(exact, rel=1e-8)

    def test_var_against_cumulant(self, desk):
        # theta-derivatives of the cumulant at 0 give mean and variance of Z_t
        h = 1e-3
        for t in (0.8, 2.5):
            vp = float(cumulant_v(desk, h, [t])[-1])
            vm = float(cumulant_v(desk, -h, [t])[-1])
            mean_fd = (vp - vm) / (2 * h)
            var_fd = (vp + vm) / h**2
            assert mean_fd == pytest.approx(float(cluster_mean(desk, t)), rel=1e-5)
            assert var_fd == pytest.approx(float(cluster_var(desk, t)), rel=1e-3)


class TestSecondMoments:
    def test_limits(self, desk):
        curves = second_moments(desk, np.linspace(0.0, 50.0, 201))
        a = curves.asymptotes
        assert a.pbar_inf == pytest.approx(1.0 / 9.0, rel=1e-12)
        assert a.qbar_inf == pytest.approx(7.0 / 18.0, rel=1e-12)
        assert a.rbar_inf == pytest.approx(25.0 / 18.0, rel=1e-12)
        assert a.ubar_inf == pytest.approx(53.0 / 54.0, rel=1e-12)
        assert a.vbar_inf == pytest.approx(14.0 / 27.0, rel=1e-12)
        assert curves.pbar[-1] == pytest.approx(a.pbar_inf, abs=1e-6)
        assert curves.qbar[-1] == pytest.approx(a.qbar_inf, abs=1e-6)
        assert curves.rbar[-1] == pytest.approx(a.rbar_inf, abs=1e-6)
        assert curves.ubar[-1] == pytest.approx(a.ubar_inf, abs=1e-6)
        assert curves.vbar[-1] == pytest.approx(a.vbar_inf, abs=1e-6)

    def test_variance_growth_rate(self, desk):
        dc = derived_constants(desk)
        curves = second_moments(desk, np.array([0.0, 45.0, 50.0]))
        slope = (curves.wbar[2] - curves.wbar[1]) / 5.0
        assert slope == pytest.approx(dc.sigma2, rel=1e-6)

    def test_var_n_two_routes_agree(self, desk):
        grid = np.array([0.0, 1.0, 5.0, 20.0])
        curves = second_moments(desk, grid)
        for i, t in enumerate(grid[1:], start=1):
            w_quad = var_n_cluster(desk, float(t))
            assert curves.wbar[i] == pytest.approx(w_quad, rel=1e-6)

    def test_no_feedback_gamma_variance(self, no_feedback):
        # M/M/infinity: Gamma_t is Poisson, so Var = mean
        curves = second_moments(no_feedback, np.array([0.0, 3.0, 30.0]))
        np.testing.assert_allclose(curves.rbar, curves.g, atol=1e-8)
        assert curves.asymptotes.rbar_inf == pytest.approx(curves.asymptotes.g_inf, rel=1e-12)

    def test_bad_grid_rejected(self, desk):
        with pytest.raises(ValueError):
            second_moments(desk, np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            second_moments(desk, np.array([0.0, 2.0, 1.0]))


class TestCumulant:
    def test_theta_zero_is_zero(self, desk):
        v = cumulant_v(desk, 0.0, np.linspace(0, 5, 11))
        np.testing.assert_allclose(v, 0.0, atol=1e-9)

    def test_initial_value(self, desk):
        v = cumulant_v(desk, -1.0, np.array([0.0, 1.0]))
        assert v[0] == pytest.approx(-1.0)

    def test_converges_to_lambert_limit(self, desk):
        dc = derived_constants(desk)
        t_end = 60.0 / dc.q_minus
        v = float(cumulant_v(desk, -1.0, [t_end])[-1])
        assert abs(v - v_infinity(-1.0, dc.nu)) < 1e-6

    def test_domain_guard(self, desk):
        dc = derived_constants(desk)
        with pytest.raises(DomainError):
            cumulant_v(desk, dc.theta0 + 0.1, [1.0])

    def test_log_mgf_derivatives(self, desk):
        # d/dtheta log E e^{theta N_t} at 0 gives E N_t; second derivative Var N_t
        t = 3.0
        h = 1e-3
        gp = log_mgf_n(desk, h, t)
        gm = log_mgf_n(desk, -h, t)
        mean_fd = (gp - gm) / (2 * h)
        var_fd = (gp + gm) / h**2
        _, _, m = first_moments(desk, t)
        assert mean_fd == pytest.approx(float(m), rel=1e-4)
        assert var_fd == pytest.approx(var_n_cluster(desk, t), rel=1e-3)


class TestStationary:
    def test_mean_slope(self, desk):
        assert stationary_stats(desk).mean_slope == pytest.approx(4.0 / 3.0, rel=1e-14)

    def test_w_integral_bounded(self, desk):
        ss = stationary_stats(desk)
        vals = [ss.w_integral(t) for t in (1.0, 10.0, 100.0, 1000.0)]
        assert all(v >= 0 for v in vals)
        assert np.all(np.diff(vals) >= -1e-9)
        # uniformly bounded in t: the tail values have converged
        assert vals[-1] == pytest.approx(vals[-2], rel=1e-6)

    def test_var_approaches_sigma2(self, desk):
        dc = derived_constants(desk)
        ss = stationary_stats(desk)
        assert ss.var(200.0) / 200.0 == pytest.approx(dc.sigma2, rel=0.01)

    def test_var_superadditive_at_positive_cov(self, desk):
        # increments are positively correlated, so cov >= 0
        ss = stationary_stats(desk)
        assert ss.cov(2.0, 5.0) > 0.0

    def test_cov_consistency(self, desk):
        ss = stationary_stats(desk)
        # Var over [0,5] = Var[0,2] + Var[2,5] + 2 Cov by construction
        lhs = ss.var(5.0)
        rhs = ss.var(2.0) + ss.var(3.0) + 2.0 * ss.cov(2.0, 5.0)
        assert lhs == pytest.approx(rhs, rel=1e-10)


class TestCurvesCsv:
    def test_write(self, desk, tmp_path):
        grid = np.linspace(0.0, 2.0, 5)
        curves = second_moments(desk, grid)
        out = tmp_path / "curves.csv"
        write_curves_csv(curves, desk, out)
        lines = out.read_text().splitlines()
        assert lines[1] == "t,ell,g,m,pbar,qbar,rbar,ubar,vbar,wbar,x,y"
        assert len(lines) == 2 + grid.size
