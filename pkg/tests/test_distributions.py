"""Density and quadrature checks against independent references.

Frozen constants were computed with the mpmath oracles in oracles.py
(explicit high-precision series); spot values additionally cross-check
against scipy.stats, a third independent implementation.
"""

import math

import numpy as np
import pytest
from scipy import stats

import repbf.distributions as dist
from oracles import mp_log_ncf_pdf, mp_log_nct_pdf
from repbf import (
    QuadratureError,
    ValidationError,
    integrate_adaptive,
    log_central_f_pdf,
    log_central_t_pdf,
    log_noncentral_f_pdf,
    log_noncentral_t_pdf,
)
from repbf.distributions import log_integrate

SERIES_RTOL = 1e-11   # own series vs mpmath
HH_RTOL = 1e-10       # opposed-sign branch vs mpmath (module contract)
NORM_ATOL = 1e-6      # pdf normalization via adaptive quadrature


class TestCentralF:
    def test_f11_closed_form(self):
        # by hand: F(1,1) density is 1/(pi sqrt(x) (1+x)); at 0.5 -> 0.3001054...
        want = math.log(1.0 / (math.pi * math.sqrt(0.5) * 1.5))
        assert log_central_f_pdf(0.5, 1, 1) == pytest.approx(want, rel=1e-14)

    def test_f22_closed_form(self):
        # F(2,2) density is (1+x)^-2, quadrature-checked to normalize to 1
        assert log_central_f_pdf(1.0, 2, 2) == pytest.approx(math.log(0.25), rel=1e-14)

    def test_scipy_cross_check(self):
        for x, d1, d2 in [(0.107, 1, 99), (2.532, 2, 99), (7.6, 2, 87), (3.3, 5.5, 11.25)]:
            assert log_central_f_pdf(x, d1, d2) == pytest.approx(
                stats.f.logpdf(x, d1, d2), rel=1e-12
            )

    def test_at_zero_by_df(self):
        assert log_central_f_pdf(0.0, 1, 30) == math.inf
        assert log_central_f_pdf(0.0, 2, 30) == 0.0
        assert log_central_f_pdf(0.0, 3, 30) == -math.inf

    @pytest.mark.parametrize("bad", [(-0.1, 2, 2), (1.0, 0, 2), (1.0, 2, -3)])
    def test_domain_errors(self, bad):
        with pytest.raises(ValidationError):
            log_central_f_pdf(*bad)


class TestNoncentralF:
    def test_zero_lambda_is_central_code_path(self):
        for x, d1, d2 in [(0.5, 1, 1), (4.36, 2, 92), (7.6, 2, 87)]:
            assert log_noncentral_f_pdf(x, d1, d2, 0.0) == log_central_f_pdf(x, d1, d2)

    # mpmath oracle (oracles.mp_log_ncf_pdf, dps=60), frozen:
    FROZEN = [
        (5.0, 1.0, 8.0, 12.5, -3.168866346194496),
        (5.0, 1.0, 8.0, 50.0, -11.026024030655883),
        (4.36, 2.0, 92.0, 9.31, -2.0317600949365633),
        (0.24, 2.0, 122.0, 17.0, -7.251997488745631),
        (2.0, 3.0, 50.0, 450.0, -167.80200403828806),
        (123.0, 5.0, 5.0, 10000.0, -36.21563971448951),
        (0.5, 1.5, 7.5, 3.25, -1.5736025258795856),
        (9.31, 1.0, 98.0, 9.31, -2.7533533128412575),
    ]

    @pytest.mark.parametrize("x,d1,d2,lam,want", FROZEN)
    def test_frozen_reference_values(self, x, d1, d2, lam, want):
        assert log_noncentral_f_pdf(x, d1, d2, lam) == pytest.approx(want, rel=SERIES_RTOL)

    def test_larger_lambda_lowers_right_density(self):
        # at the density's left flank, pushing the mass right lowers the value
        at_obs = log_noncentral_f_pdf(5.0, 1, 8, 0.625 * 20)
        at_shifted = log_noncentral_f_pdf(5.0, 1, 8, 50.0)
        assert at_obs > at_shifted

    def test_normalizes_for_observed_scenario(self):
        lam = 0.377 * 45
        total = integrate_adaptive(
            lambda x: math.exp(log_noncentral_f_pdf(x, 2, 42, lam)), 0.0, math.inf
        )
        assert total.value == pytest.approx(1.0, abs=NORM_ATOL)

    def test_vector_lambda_matches_scalar(self):
        lams = np.array([0.0, 0.3, 9.31, 80.0, 1234.5])
        vec = log_noncentral_f_pdf(4.36, 2, 92, lams)
        sca = [log_noncentral_f_pdf(4.36, 2, 92, l) for l in lams]
        np.testing.assert_allclose(vec, sca, rtol=1e-13)

    def test_heterogeneous_lambda_vector(self):
        # spans the exact-series and continuous-integral regimes in one call
        lams = np.array([0.0, 1.0, 2e3, 5e8, 40.0, 3e7])
        vec = log_noncentral_f_pdf(2.5, 2, 100, lams)
        sca = [log_noncentral_f_pdf(2.5, 2, 100, l) for l in lams]
        np.testing.assert_allclose(vec, sca, rtol=1e-12)
        assert np.all(np.isfinite(vec))

    def test_huge_lambda_no_overflow(self):
        val = log_noncentral_f_pdf(5.0, 1, 8, 1e4)
        assert math.isfinite(val) and val < -1000
        assert math.isfinite(log_noncentral_f_pdf(1.0, 2, 50, 1e12))

    def test_at_zero(self):
        assert log_noncentral_f_pdf(0.0, 2, 30, 6.0) == pytest.approx(
            -3.0 + log_central_f_pdf(0.0, 2, 30), rel=1e-14
        )
        assert log_noncentral_f_pdf(0.0, 3, 30, 6.0) == -math.inf

    def test_truncation_insensitive(self, monkeypatch):
        base = log_noncentral_f_pdf(4.36, 2, 92, 9.31)
        monkeypatch.setattr(dist, "_TAIL_NATS", 80.0)
        widened = log_noncentral_f_pdf(4.36, 2, 92, 9.31)
        assert widened == pytest.approx(base, abs=1e-12)

    def test_scipy_cross_sweep(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            x = float(rng.uniform(0.05, 30))
            d1 = float(rng.uniform(1, 12))
            d2 = float(rng.uniform(2, 200))
            lam = float(rng.uniform(0, 500))
            assert log_noncentral_f_pdf(x, d1, d2, lam) == pytest.approx(
                stats.ncf.logpdf(x, d1, d2, lam) if lam > 0 else stats.f.logpdf(x, d1, d2),
                rel=1e-9,
            )

    def test_lambda_validation(self):
        with pytest.raises(ValidationError):
            log_noncentral_f_pdf(1.0, 2, 10, -0.5)


class TestCentralT:
    def test_cauchy_at_mode(self):
        assert log_central_t_pdf(0.0, 1.0) == pytest.approx(-math.log(math.pi), rel=1e-15)

    def test_frozen_reference_value(self):
        # mpmath oracle, dps=60
        assert log_central_t_pdf(2.0, 10.0) == pytest.approx(
            -2.7944946535676234, rel=1e-13
        )

    def test_symmetry(self):
        for x, df in [(2.0, 10.0), (0.37, 3.3), (11.0, 56.765)]:
            assert log_central_t_pdf(-x, df) == log_central_t_pdf(x, df)

    def test_domain_error(self):
        with pytest.raises(ValidationError):
            log_central_t_pdf(1.0, 0.0)


class TestNoncentralT:
    def test_zero_delta_is_central_code_path(self):
        for x, df in [(1.5, 28.0), (-3.953, 20.809), (0.0, 5.0)]:
            assert log_noncentral_t_pdf(x, df, 0.0) == log_central_t_pdf(x, df)

    # mpmath oracle (oracles.mp_log_nct_pdf), frozen; covers the aligned
    # series branch, the opposed-sign integral branch, and x = 0
    FROZEN = [
        (1.5, 28.0, 2.5, -1.4157284368501104),
        (-3.953, 20.809, 3.0, -19.72355820389396),
        (-3.953, 20.809, -3.0, -1.4468237930415317),
        (3.6412, 56.765, -5.59, -39.6234408792515),
        (0.0, 7.0, 2.0, -2.954534150571376),
        (2.0, 5.0, 30.0, -238.8890371526438),
        (-2.0, 5.0, 30.0, -468.0498697871935),
        (-10.0, 1.0, 22.0, -253.9382002007407),
        (5.0, 200.0, 4.0, -1.426754365852193),
        (-1.0, 2.5, 0.3, -1.9242079790275834),
        (8.0, 60.0, 8.5, -1.210612602770637),
        (14.0, 198.0, 14.0, -1.1210931015112833),
        (1.9, 12.7, -0.4, -3.4076587214805314),
        (-0.3, 33.3, 6.6, -24.71611389472128),
    ]

    @pytest.mark.parametrize("x,df,delta,want", FROZEN)
    def test_frozen_reference_values(self, x, df, delta, want):
        rtol = SERIES_RTOL if x * delta >= 0 else HH_RTOL
        assert log_noncentral_t_pdf(x, df, delta) == pytest.approx(want, rel=rtol)

    def test_opposite_noncentrality_orders_tail(self):
        left = log_noncentral_t_pdf(-3.953, 20.809, 3.0)
        right = log_noncentral_t_pdf(-3.953, 20.809, -3.0)
        assert left < right

    def test_normalizes(self):
        total = integrate_adaptive(
            lambda x: math.exp(log_noncentral_t_pdf(x, 28.0, 2.5)),
            -math.inf, math.inf,
        )
        assert total.value == pytest.approx(1.0, abs=NORM_ATOL)

    def test_vector_delta_matches_scalar(self):
        deltas = np.array([-6.0, -1.0, 0.0, 0.4, 3.0, 40.0])
        vec = log_noncentral_t_pdf(2.1, 17.0, deltas)
        sca = [log_noncentral_t_pdf(2.1, 17.0, d) for d in deltas]
        np.testing.assert_allclose(vec, sca, rtol=1e-13)

    def test_huge_delta_no_overflow(self):
        assert math.isfinite(log_noncentral_t_pdf(3.64, 56.765, 1e8))
        assert math.isfinite(log_noncentral_t_pdf(-3.64, 56.765, 1e8))

    def test_reflection_identity(self):
        for x, df, d in [(1.7, 9.0, -2.2), (-0.8, 30.0, 1.1)]:
            assert log_noncentral_t_pdf(x, df, d) == pytest.approx(
                log_noncentral_t_pdf(-x, df, -d), rel=1e-12
            )

    def test_scipy_cross_sweep(self):
        # scipy.stats.nct cancels catastrophically (even to NaN) for strongly
        # opposed x and delta; fall back to the mpmath oracle there
        rng = np.random.default_rng(11)
        for _ in range(25):
            x = float(rng.uniform(-8, 8))
            df = float(rng.uniform(1, 200))
            d = float(rng.uniform(-10, 10))
            mine = log_noncentral_t_pdf(x, df, d)
            ref = stats.nct.logpdf(x, df, d) if d != 0 else stats.t.logpdf(x, df)
            if math.isfinite(ref) and mine == pytest.approx(ref, rel=1e-6):
                continue
            assert mine == pytest.approx(mp_log_nct_pdf(x, df, d), rel=1e-10)

    def test_domain_error(self):
        with pytest.raises(ValidationError):
            log_noncentral_t_pdf(1.0, -2.0, 1.0)


class TestFTIdentity:
    """F(1, df) at t^2 against the folded t density, central and noncentral."""

    @pytest.mark.parametrize("t,df", [(2.0, 10.0), (0.5, 33.3), (-3.6, 87.0)])
    def test_central(self, t, df):
        lhs = log_central_f_pdf(t * t, 1.0, df)
        folded = np.logaddexp(log_central_t_pdf(t, df), log_central_t_pdf(-t, df))
        rhs = folded - math.log(2.0 * abs(t))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    @pytest.mark.parametrize("t,df,delta", [(2.0, 28.0, 1.5), (-1.2, 42.0, 2.0)])
    def test_noncentral(self, t, df, delta):
        lhs = log_noncentral_f_pdf(t * t, 1.0, df, delta * delta)
        folded = np.logaddexp(
            log_noncentral_t_pdf(t, df, delta), log_noncentral_t_pdf(-t, df, delta)
        )
        rhs = folded - math.log(2.0 * abs(t))
        assert lhs == pytest.approx(rhs, rel=1e-10)


class TestNormalizationSweep:
    """Randomized parameter sweep: every noncentral pdf integrates to 1."""

    def test_noncentral_f_sweep(self):
        rng = np.random.default_rng(123)
        for _ in range(6):
            d1 = float(rng.uniform(1, 12))
            d2 = float(rng.uniform(1, 200))
            lam = float(rng.uniform(0, 500))
            total = integrate_adaptive(
                lambda x: math.exp(log_noncentral_f_pdf(x, d1, d2, lam)),
                0.0, math.inf,
            )
            assert total.value == pytest.approx(1.0, abs=NORM_ATOL), (d1, d2, lam)

    def test_noncentral_t_sweep(self):
        rng = np.random.default_rng(321)
        for _ in range(6):
            df = float(rng.uniform(1, 200))
            delta = float(rng.uniform(-22, 22))
            total = integrate_adaptive(
                lambda x: math.exp(log_noncentral_t_pdf(x, df, delta)),
                -math.inf, math.inf,
            )
            assert total.value == pytest.approx(1.0, abs=NORM_ATOL), (df, delta)


class TestIntegrateAdaptive:
    def test_pdf_normalization_long_interval(self):
        res = integrate_adaptive(lambda x: math.exp(log_central_f_pdf(x, 2, 2)), 0, 1e6)
        assert res.value == pytest.approx(1.0, abs=1e-6)

    def test_exponential_tail_substitution(self):
        res = integrate_adaptive(math.exp, -math.inf, 0.0, rel_tol=1e-10)
        assert res.value == pytest.approx(1.0, abs=1e-8)
        res = integrate_adaptive(lambda x: math.exp(-x), 0.0, math.inf, rel_tol=1e-10)
        assert res.value == pytest.approx(1.0, abs=1e-8)

    def test_oracle_self_check_noncentral(self):
        res = integrate_adaptive(
            lambda x: math.exp(log_noncentral_f_pdf(x, 1, 8, 9.5)), 0.0, math.inf
        )
        assert res.value == pytest.approx(1.0, abs=1e-6)

    def test_reports_achieved_tolerance(self):
        res = integrate_adaptive(lambda x: math.exp(-x * x / 2), -math.inf, math.inf)
        assert res.rel_error <= 1e-9

    def test_nonconvergence_raises(self):
        with pytest.raises(QuadratureError):
            integrate_adaptive(lambda x: math.sin(1.0 / (x + 1e-12)), 0.0, 1.0,
                               rel_tol=1e-13)

    def test_rel_tol_validation(self):
        with pytest.raises(ValidationError):
            integrate_adaptive(math.exp, 0, 1, rel_tol=0.0)


class TestLogIntegrate:
    def test_handles_extreme_scale(self):
        # integrand peaks near exp(-5000); plain quadrature would underflow
        got = log_integrate(lambda x: -((x - 3.0) ** 2) / 2.0 - 5000.0,
                            -math.inf, math.inf)
        assert got == pytest.approx(0.5 * math.log(2 * math.pi) - 5000.0, rel=1e-10)

    def test_half_line(self):
        got = log_integrate(lambda x: -x, 0.0, math.inf)
        assert got == pytest.approx(0.0, abs=1e-9)

    def test_narrow_peak_located(self):
        # width 1e-5 peak far from the probe grid's natural resolution
        got = log_integrate(lambda x: -((x - 0.2) ** 2) / (2 * 1e-10), 0.0, math.inf)
        want = 0.5 * math.log(2 * math.pi * 1e-10)
        assert got == pytest.approx(want, rel=1e-6)
