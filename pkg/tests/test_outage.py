import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from riscopula import outage
from riscopula.copula import fit_theta_simulated
from riscopula.montecarlo import SystemConfig, estimate_outage, estimate_outage_curve
from riscopula.outage import (
    Method,
    asymptote,
    outage_asymptotic,
    outage_bbit,
    outage_closed_form_onebit,
    outage_quadrature_onebit,
    path_loss,
)


def at(M, rho_t, bits=1):
    return SystemConfig(M, bits, threshold=rho_t)


class TestOneBitQuadrature:
    def test_zero_threshold(self):
        r = outage_quadrature_onebit(at(3, 0.0), 0.4)
        assert r.value == 0.0 and r.method is Method.QUADRATURE_1BIT

    def test_needs_one_bit(self):
        with pytest.raises(ValueError):
            outage_quadrature_onebit(at(3, 1.0, bits=2))

    @pytest.mark.parametrize("rho_t", [0.5, 2.0, 8.0])
    def test_single_element_against_channel(self, rho_t):
        est = estimate_outage(at(1, rho_t), 10_000_000, 40)
        val = outage_quadrature_onebit(at(1, rho_t)).value
        assert abs(val - est.value) <= max(3 * est.std_error, 0.01 * est.value)

    @pytest.mark.parametrize("M", [2, 4])
    def test_matches_product_law_with_channel_at_high_outage(self, M):
        # away from the tail the independence model is within a few percent
        est = estimate_outage(at(M, 8.0), 2_000_000, 41)
        assert outage_quadrature_onebit(at(M, 8.0)).value == pytest.approx(est.value, rel=0.05)

    def test_fitted_theta_against_channel(self):
        # M = 4, gamma_th = 5 dB, 0-20 dB: within 10% wherever the outage is at least 1e-3
        th = float(fit_theta_simulated(SystemConfig(4, 1), 200_000, 13).theta)
        bad = []
        for snr_db in range(0, 21, 2):
            cfg = SystemConfig(4, 1, 10 ** (snr_db / 10), 1.0, 10**0.5)
            est = estimate_outage(cfg, 2_000_000, 14 + snr_db)
            if est.value >= 1e-3:
                v = outage_quadrature_onebit(cfg, th).value
                if abs(v / est.value - 1) > 0.10:
                    bad.append((snr_db, est.value, v))
        assert not bad, f"model vs channel outside 10%: {bad}"

    @pytest.mark.parametrize("M", [1, 4])
    def test_monotone_in_threshold(self, M):
        vals = [outage_quadrature_onebit(at(M, r), 0.3).value for r in np.geomspace(1e-3, 50, 20)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 16), st.floats(1e-6, 500), st.floats(-1, 1))
    def test_probability_range(self, M, rho_t, th):
        r = outage_quadrature_onebit(at(M, rho_t), th)
        assert 0.0 <= r.value <= 1.0 and r.err_estimate >= 0

    @pytest.mark.parametrize("M", [1, 3])
    def test_theta_free_on_symmetric_region(self, M):
        vals = [outage_quadrature_onebit(at(M, 1.5), th).value for th in (-1.0, 0.0, 0.55, 1.0)]
        assert max(vals) - min(vals) < 1e-12


class TestOneBitClosedForm:
    @pytest.mark.parametrize("th", [0.0, 0.55])
    def test_against_quadrature(self, th):
        cf = outage_closed_form_onebit(at(2, 1.0), th)
        q = outage_quadrature_onebit(at(2, 1.0), th)
        assert cf.value == pytest.approx(q.value, rel=1e-2)
        assert cf.method is Method.CLOSED_FORM_1BIT

    def test_theta_affine(self):
        c = at(3, 2.0)
        v0, v1, vh = (outage_closed_form_onebit(c, t).value for t in (0.0, 1.0, 0.37))
        assert vh == pytest.approx(v0 + 0.37 * (v1 - v0), rel=1e-12)

    def test_monotone_in_threshold(self):
        vals = [outage_closed_form_onebit(at(2, r)).value for r in np.geomspace(1e-2, 20, 20)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_zero_threshold(self):
        assert outage_closed_form_onebit(at(2, 1e-31)).value == 0.0


class TestBBit:
    @pytest.mark.parametrize("M, b, rho_t", [(4, 2, 3.0), (16, 2, 60.0), (2, 3, 0.7)])
    def test_independent_reduction(self, M, b, rho_t):
        c = at(M, rho_t, b)
        fx, fy = outage._fits(c, None)
        ref, _ = integrate.quad(lambda x: fx.pdf(x) * fy.cdf(rho_t - x), 0, rho_t, epsabs=0, epsrel=1e-12)
        assert outage_bbit(c, 0.0).value == pytest.approx(ref, rel=1e-9)
        assert outage_bbit(c, 0.0).value == pytest.approx(outage.outage_bbit_grid(c), rel=1e-6)

    def test_theta_affine(self):
        c = at(4, 2.0, 2)
        for method in ("quadrature", "closed_form"):
            v0, v1, vh = (outage_bbit(c, t, method=method).value for t in (0.0, 1.0, -0.5))
            assert vh == pytest.approx(v0 - 0.5 * (v1 - v0), rel=1e-10)

    def test_routes_agree(self):
        c = at(2, 1.0, 2)
        q = outage_bbit(c, 0.5)
        cf = outage_bbit(c, 0.5, method="closed_form")
        assert cf.value == pytest.approx(q.value, rel=1e-6)
        assert cf.method is Method.CLOSED_FORM_BBIT

    def test_explicit_fits(self):
        c = at(4, 2.0, 2)
        fits = outage._fits(c, None)
        assert outage_bbit(c, 0.2, fits=fits).value == outage_bbit(c, 0.2).value

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            outage_bbit(at(2, 1.0, 2), method="series")

    @pytest.mark.parametrize("method, points", [("quadrature", 20), ("closed_form", 8)])
    def test_monotone_in_threshold(self, method, points):
        vals = [outage_bbit(at(2, r, 2), 0.5, method=method).value for r in np.geomspace(0.05, 30, points)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
        assert all(0 <= v <= 1 for v in vals)

    def test_gamma_route_against_exact_one_bit(self):
        # b = 1 through the moment-matched Gamma model vs the exact one-bit law, M = 8
        gaps = [abs(outage_bbit(at(8, r)).value / outage_quadrature_onebit(at(8, r)).value - 1)
                for r in (4.0, 10.0)]
        assert max(gaps) < 0.15, f"relative gaps {gaps}"

    def test_fitted_model_matches_channel(self):
        # M = 16, b = 2 with MPLE theta: within 10% wherever the outage is at least 1e-3
        cfg = SystemConfig(16, 2)
        th = float(fit_theta_simulated(cfg, 200_000, 11).theta)
        rts = np.geomspace(20, 120, 8)
        mc = estimate_outage_curve(cfg, rts, 2_000_000, 12)
        bad = []
        for r, est in zip(rts, mc):
            if est.value >= 1e-3:
                v = outage_bbit(at(16, r, 2), th).value
                if abs(v / est.value - 1) > 0.10:
                    bad.append((round(float(r), 2), est.value, v))
        assert not bad, f"model vs channel outside 10%: {bad}"


class TestAsymptote:
    def test_two_elements(self):
        a = asymptote(2)
        assert a.coding_gain == pytest.approx(1 / 8, rel=1e-14)
        assert a.diversity_order == 1.0

    @pytest.mark.parametrize("M", [2, 4, 8])
    def test_power_law_slope(self, M):
        lo = outage_asymptotic(at(M, 1e-4)).value
        hi = outage_asymptotic(at(M, 1e-5)).value
        assert (math.log(lo) - math.log(hi)) / math.log(10) == pytest.approx(M / 2, rel=1e-12)

    def test_positive_and_vanishing(self):
        vals = [outage_asymptotic(at(4, 10 ** -k)).value for k in range(2, 8)]
        assert all(v > 0 for v in vals) and vals == sorted(vals, reverse=True)

    def test_high_snr_regime(self):
        cfg = SystemConfig(4, 1, 1e4)
        a = outage_asymptotic(cfg).value
        q = outage_quadrature_onebit(cfg).value
        assert abs(a / q - 1) <= 0.25, f"asymptote {a:.4g} vs quadrature {q:.4g}"

    def test_capped_at_one(self):
        assert outage_asymptotic(at(4, 100.0)).value == 1.0


class TestPathLoss:
    def test_unit(self):
        assert path_loss(1, 1, 3.3) == 1.0

    def test_arithmetic(self):
        assert path_loss(2, 5, 2.8) == pytest.approx(10**-2.8, rel=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(1, 5), st.floats(0.01, 5))
    def test_symmetric_and_decreasing(self, a, b, nu, d):
        assert path_loss(a, b, nu) == path_loss(b, a, nu)
        assert path_loss(a + d, b, nu) < path_loss(a, b, nu)

    @pytest.mark.parametrize("args", [(0, 1, 2), (1, -1, 2), (1, 1, 0)])
    def test_domain(self, args):
        with pytest.raises(ValueError):
            path_loss(*args)

    def test_placement_profile(self):
        D, tx, g = 10.0, 10**1.5, 10**0.5
        vals = []
        for d in np.linspace(0.5, 9.5, 19):
            c = SystemConfig(8, 1, tx, path_loss(d, D - d, 2.8), g)
            vals.append(outage_quadrature_onebit(c).value)
        assert np.argmax(vals) not in (0, len(vals) - 1)
        assert min(vals) in (vals[0], vals[-1])
