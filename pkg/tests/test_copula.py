import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from riscopula import copula, marginals as mg
from riscopula.copula import FgmTheta, fgm_cdf, fgm_density, fit_theta, sample_fgm
from riscopula.moments import GammaFit, gamma_fit
from riscopula.montecarlo import SystemConfig, draw_xy, ks_distance

unit = st.floats(0, 1)
theta = st.floats(-1, 1)


class TestFgm:
    def test_theta_range(self):
        with pytest.raises(ValueError):
            FgmTheta(1.01)
        with pytest.raises(ValueError):
            fgm_density(0.5, 0.5, -1.5)

    def test_unit_square_domain(self):
        with pytest.raises(ValueError):
            fgm_cdf(1.2, 0.5, 0.1)

    @settings(max_examples=50, deadline=None)
    @given(unit, unit)
    def test_independence(self, u, v):
        assert fgm_density(u, v, 0.0) == 1.0

    @settings(max_examples=50, deadline=None)
    @given(unit, theta)
    def test_half_row(self, v, th):
        assert fgm_density(0.5, v, th) == 1.0

    @pytest.mark.parametrize("th", [-1.0, 0.3, 1.0])
    def test_corner(self, th):
        assert fgm_density(0.0, 0.0, th) == pytest.approx(1 + th)

    @settings(max_examples=50, deadline=None)
    @given(unit, theta)
    def test_margins(self, u, th):
        assert fgm_cdf(u, 1.0, th) == pytest.approx(u)
        assert fgm_cdf(1.0, u, th) == pytest.approx(u)
        assert fgm_cdf(u, 0.0, th) == 0.0

    def test_arithmetic(self):
        assert fgm_cdf(0.3, 0.7, 0.55) == pytest.approx(0.234255, abs=1e-15)

    @settings(max_examples=80, deadline=None)
    @given(unit, unit, theta)
    def test_density_nonnegative(self, u, v, th):
        assert fgm_density(u, v, th) >= 0

    @settings(max_examples=80, deadline=None)
    @given(unit, unit, unit, unit, theta)
    def test_two_increasing(self, a, b, c, d, th):
        u1, u2 = sorted((a, b))
        v1, v2 = sorted((c, d))
        vol = fgm_cdf(u2, v2, th) - fgm_cdf(u1, v2, th) - fgm_cdf(u2, v1, th) + fgm_cdf(u1, v1, th)
        assert vol >= -1e-15

    def test_mixed_derivative(self):
        rng = np.random.default_rng(0)
        h = 1e-4
        for _ in range(100):
            u, v = rng.uniform(h, 1 - h, 2)
            th = rng.uniform(-1, 1)
            d = (fgm_cdf(u + h, v + h, th) - fgm_cdf(u + h, v - h, th)
                 - fgm_cdf(u - h, v + h, th) + fgm_cdf(u - h, v - h, th)) / (4 * h * h)
            assert abs(d - fgm_density(u, v, th)) < 1e-4

    def test_unit_mass(self):
        m, _ = integrate.dblquad(lambda v, u: fgm_density(u, v, 0.8), 0, 1, 0, 1)
        assert m == pytest.approx(1.0, abs=1e-10)

    def test_sampler_margins_uniform(self):
        u, v = sample_fgm(200_000, 0.9, np.random.default_rng(1))
        assert ks_distance(np.sort(u), lambda t: t) < 0.005
        assert ks_distance(np.sort(v), lambda t: t) < 0.005


class TestJointDensities:
    def test_factorizes_at_zero(self):
        rng = np.random.default_rng(5)
        x = rng.gamma(2.0, 1.0, 1000)
        y = rng.laplace(size=1000) * 2
        got = copula.joint_pdf_xy_onebit(x, y, 3, 0.0)
        assert np.array_equal(got, mg.pdf_x(3, x) * mg.pdf_y(3, y))

    def test_origin_value(self):
        assert copula.joint_pdf_xy_onebit(0.0, 0.0, 1, 1.0) == pytest.approx(0.5)

    def test_domain(self):
        with pytest.raises(ValueError):
            copula.joint_pdf_xy_onebit(-1.0, 0.0, 2, 0.1)
        fx, fy = gamma_fit(4, 2, "x"), gamma_fit(4, 2, "y")
        with pytest.raises(ValueError):
            copula.joint_pdf_x2y2_gamma(1.0, -1.0, fx, fy, 0.1)

    def test_onebit_unit_mass(self):
        f = lambda y, x: copula.joint_pdf_xy_onebit(x, y, 2, 0.55)  # noqa: E731
        lo, _ = integrate.dblquad(f, 0, 60, -60, 0, epsabs=1e-12, epsrel=1e-10)
        hi, _ = integrate.dblquad(f, 0, 60, 0, 60, epsabs=1e-12, epsrel=1e-10)
        assert lo + hi == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("th", [-0.7, 0.0, 0.9])
    def test_onebit_marginal_recovers_x(self, th):
        for x in np.linspace(0.2, 6, 10):
            f = lambda y: copula.joint_pdf_xy_onebit(x, y, 3, th)  # noqa: E731
            m = integrate.quad(f, -np.inf, 0)[0] + integrate.quad(f, 0, np.inf)[0]
            assert abs(m - mg.pdf_x(3, x)) < 1e-4

    def test_gamma_joint_unit_mass(self):
        fx, fy = gamma_fit(4, 2, "x"), gamma_fit(4, 2, "y")
        f = lambda y, x: copula.joint_pdf_x2y2_gamma(x, y, fx, fy, 0.5)  # noqa: E731
        # the Y^2 shape is below one, so split off the integrable spike at y = 0
        a, _ = integrate.dblquad(f, 0, np.inf, 0, 1, epsabs=1e-12, epsrel=1e-10)
        b, _ = integrate.dblquad(f, 0, np.inf, 1, np.inf, epsabs=1e-12, epsrel=1e-10)
        assert a + b == pytest.approx(1.0, abs=1e-6)

    def test_gamma_joint_factorizes(self):
        fx, fy = gamma_fit(8, 3, "x"), gamma_fit(8, 3, "y")
        x = np.linspace(1, 200, 50)
        y = np.linspace(0.01, 3, 50)
        np.testing.assert_array_equal(copula.joint_pdf_x2y2_gamma(x, y, fx, fy, 0.0), fx.pdf(x) * fy.pdf(y))

    def test_gamma_joint_vanishes_at_origin(self):
        f = GammaFit(2.0, 1.0, "x", 1, 1)
        g = GammaFit(3.5, 0.2, "y", 1, 1)
        assert copula.joint_pdf_x2y2_gamma(0.0, 0.0, f, g, 0.7) == 0.0


class TestFit:
    def test_independent_pairs(self):
        rng = np.random.default_rng(2)
        x, y = draw_xy(SystemConfig(4, 1), 100_000, 3)
        y = rng.permutation(y)
        fit = fit_theta(np.column_stack([x, y]))
        assert abs(float(fit.theta)) < 0.05

    @pytest.mark.parametrize("margins", ["analytic", "rank"])
    def test_recovers_synthetic_theta(self, margins):
        u, v = sample_fgm(100_000, 0.5, np.random.default_rng(4))
        cdfs = (lambda t: t, lambda t: t) if margins == "analytic" else None
        fit = fit_theta(np.column_stack([u, v]), cdfs)
        assert float(fit.theta) == pytest.approx(0.5, abs=0.05)
        assert fit.margins == margins

    def test_monotone_transform_invariance(self):
        u, v = sample_fgm(20_000, -0.4, np.random.default_rng(6))
        x = -np.log1p(-u)  # Exp(1)
        y = np.tan(np.pi * (v - 0.5))  # Cauchy
        base = fit_theta(np.column_stack([x, y]), (lambda t: 1 - np.exp(-t), lambda t: 0.5 + np.arctan(t) / np.pi))
        sq = fit_theta(np.column_stack([x**2, y**3]),
                       (lambda t: 1 - np.exp(-np.sqrt(t)), lambda t: 0.5 + np.arctan(np.cbrt(t)) / np.pi))
        assert float(sq.theta) == pytest.approx(float(base.theta), abs=1e-9)
        ranks = fit_theta(np.column_stack([x, y]))
        ranks_sq = fit_theta(np.column_stack([x**2, y**3]))
        assert float(ranks.theta) == float(ranks_sq.theta)

    def test_score_root_maximizes(self):
        u, v = sample_fgm(5_000, 0.3, np.random.default_rng(8))
        fit = fit_theta(np.column_stack([u, v]), (lambda t: t, lambda t: t))
        grid = np.linspace(-0.999, 0.999, 801)
        best = max(copula.fgm_log_likelihood(t, u, v) for t in grid)
        assert fit.log_likelihood >= best - 1e-9

    def test_boundary(self):
        u = np.linspace(0.01, 0.99, 500)
        fit = fit_theta(np.column_stack([u, u]), (lambda t: t, lambda t: t))
        assert float(fit.theta) == 1.0

    def test_degenerate(self):
        u = np.full(100, 0.5)
        with pytest.raises(ValueError):
            fit_theta(np.column_stack([u, u]), (lambda t: t, lambda t: t))

    def test_shape_check(self):
        with pytest.raises(ValueError):
            fit_theta(np.zeros((10, 3)))

    def test_physical_one_bit(self):
        fit = copula.fit_theta_simulated(SystemConfig(16, 1), 100_000, 3)
        assert -1 <= float(fit.theta) <= 1
        assert np.isfinite(fit.log_likelihood) and fit.n == 100_000

    def test_squared_gamma_margins(self):
        fit = copula.fit_theta_simulated(SystemConfig(16, 2), 100_000, 3)
        assert 0 < float(fit.theta) <= 1
        with pytest.raises(ValueError):
            copula.fit_theta_simulated(SystemConfig(4, 2), 20_000, 1, squared=False)
