import math

import pytest
from scipy.special import exp1 as scipy_exp1

from star_coverage import (
    GammaApprox,
    LinkGeometry,
    Protocol,
    QuadratureError,
    QuadratureSpec,
    RateMethod,
    Role,
    Side,
    effective_gain,
    ergodic_log_gamma,
    exp_integral_e1,
    exp_integral_oracle,
    gamma_params,
    noma_rate_reflect,
    noma_rate_transmit,
    oma_rate,
    rate_for,
)
from star_coverage.config import default_system_params

# Published values (Abramowitz & Stegun table 5.1 / 40-digit recomputation)
E1_AT_1 = 0.21938393439552027
E1_AT_01 = 1.8229239584193907
# exp(1/(c*tau)) * E1(1/(c*tau)) / ln2 at (c=1, tau=1) and (c=10, tau=1),
# frozen from a 40-digit evaluation
F_C1_K1_T1 = 0.8603473822708860
F_C10_K1_T1 = 2.9065148084148050

KAPPA1_GRID_C = [0.01, 0.1, 1.0, 10.0, 100.0]
KAPPA1_GRID_TAU = [0.1, 0.487839, 1.0]


class TestExpIntegral:
    def test_reference_values(self):
        assert exp_integral_e1(1.0) == pytest.approx(E1_AT_1, abs=1e-14)
        assert exp_integral_e1(0.1) == pytest.approx(E1_AT_01, abs=1e-13)

    @pytest.mark.parametrize("x", [1e-3, 0.03, 0.3, 1.0, 1.5, 4.0, 20.0, 120.0, 650.0])
    def test_matches_scipy_everywhere(self, x):
        # cross-library guard on the hand-rolled series/continued fraction
        assert exp_integral_e1(x) == pytest.approx(float(scipy_exp1(x)), rel=1e-12)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            exp_integral_e1(0.0)
        with pytest.raises(ValueError):
            exp_integral_e1(-1.0)

    def test_oracle_reference_values(self):
        assert exp_integral_oracle(1.0, 1.0) == pytest.approx(F_C1_K1_T1, abs=1e-12)
        assert exp_integral_oracle(10.0, 1.0) == pytest.approx(F_C10_K1_T1, abs=1e-12)

    def test_oracle_vanishes_as_c_to_zero(self):
        # scaled continued fraction keeps exp(1/(c*tau)) from overflowing
        values = [exp_integral_oracle(c, 0.5) for c in (1e-3, 1e-6, 1e-9, 1e-12)]
        assert all(a > b > 0 for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-11

    def test_oracle_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            exp_integral_oracle(0.0, 1.0)
        with pytest.raises(ValueError):
            exp_integral_oracle(1.0, 0.0)


class TestErgodicLogGamma:
    def test_zero_gain_short_circuits(self, g15):
        r = ergodic_log_gamma(0.0, g15)
        assert r.rate_bps_hz == 0.0
        assert r.est_abs_error == 0.0
        assert r.method == RateMethod.QUADRATURE

    def test_reference_value_shape_one(self):
        r = ergodic_log_gamma(1.0, GammaApprox(1.0, 1.0))
        assert r.rate_bps_hz == pytest.approx(F_C1_K1_T1, abs=1e-10)
        assert r.est_abs_error < 1e-10

    @pytest.mark.parametrize("c", KAPPA1_GRID_C)
    @pytest.mark.parametrize("tau", KAPPA1_GRID_TAU)
    def test_shape_one_quadrature_matches_analytic_oracle(self, c, tau):
        quad_rate = ergodic_log_gamma(c, GammaApprox(1.0, tau)).rate_bps_hz
        assert quad_rate == pytest.approx(exp_integral_oracle(c, tau), abs=1e-8)

    def test_strictly_increasing_in_gain(self, g15):
        rates = [ergodic_log_gamma(c, g15).rate_bps_hz for c in (1e-4, 1e-2, 1.0, 1e2, 1e4)]
        assert all(a < b for a, b in zip(rates, rates[1:]))

    def test_strictly_increasing_in_shape(self):
        tau = 0.5
        rates = [
            ergodic_log_gamma(2.0, GammaApprox(k, tau)).rate_bps_hz
            for k in (0.5, 1.0, 2.0, 8.0, 32.0)
        ]
        assert all(a < b for a, b in zip(rates, rates[1:]))

    def test_strictly_increasing_in_scale(self):
        rates = [
            ergodic_log_gamma(2.0, GammaApprox(3.0, t)).rate_bps_hz
            for t in (0.1, 0.3, 1.0, 3.0)
        ]
        assert all(a < b for a, b in zip(rates, rates[1:]))

    @pytest.mark.parametrize("c", [0.01, 1.0, 100.0])
    @pytest.mark.parametrize("n", [1, 15, 30])
    def test_jensen_upper_bound(self, c, n):
        g = gamma_params(n)
        rate = ergodic_log_gamma(c, g).rate_bps_hz
        assert rate < math.log2(1.0 + c * g.shape * g.scale)

    def test_rejects_negative_gain(self, g15):
        with pytest.raises(ValueError):
            ergodic_log_gamma(-1.0, g15)

    def test_failure_carries_best_estimate(self):
        # one allowed subinterval at very tight tolerance cannot converge
        spec = QuadratureSpec(rel_tolerance=1e-13, abs_tolerance=1e-14, max_subdivisions=1)
        with pytest.raises(QuadratureError) as err:
            ergodic_log_gamma(1e8, gamma_params(30), spec)
        assert math.isfinite(err.value.best_estimate)
        assert err.value.est_abs_error > 0


class TestNomaRates:
    def test_reflect_zero_power_share(self):
        p = default_system_params(power_split_reflect=0.0, power_split_transmit=1.0)
        assert noma_rate_reflect(p, 10.0, gamma_params(15)).rate_bps_hz == 0.0

    def test_reflect_composes_gain_and_kernel(self, params, g15, quad):
        geo = LinkGeometry(10.0, Side.REFLECT)
        c = effective_gain(params, geo, Protocol.NOMA, Role.SIGNAL)
        direct = ergodic_log_gamma(c, g15, quad).rate_bps_hz
        assert noma_rate_reflect(params, 10.0, g15, quad).rate_bps_hz == pytest.approx(
            direct, abs=1e-10
        )

    def test_reflect_increases_with_transmit_power(self, params, g15):
        louder = default_system_params(total_power_dbm=params.total_power_dbm + 3.0103)
        assert (
            noma_rate_reflect(louder, 10.0, g15).rate_bps_hz
            > noma_rate_reflect(params, 10.0, g15).rate_bps_hz
        )

    def test_reflect_strictly_decreasing_in_distance(self, params, g15):
        rates = [noma_rate_reflect(params, d, g15).rate_bps_hz for d in (5.0, 10.0, 20.0, 80.0)]
        assert all(a > b for a, b in zip(rates, rates[1:]))

    def test_transmit_nonnegative_on_grid(self, g15):
        for p_r in (0.0, 0.2, 0.4, 0.5):
            p = default_system_params(
                power_split_reflect=p_r, power_split_transmit=1.0 - p_r
            )
            for d in (1.0, 10.0, 100.0, 1000.0):
                assert noma_rate_transmit(p, d, g15).rate_bps_hz >= 0.0

    def test_transmit_without_interference_is_single_user(self, g15, quad):
        p = default_system_params(power_split_reflect=0.0, power_split_transmit=1.0)
        geo = LinkGeometry(10.0, Side.TRANSMIT)
        c_full = effective_gain(p, geo, Protocol.NOMA, Role.FULL)
        expected = ergodic_log_gamma(c_full, g15, quad).rate_bps_hz
        assert noma_rate_transmit(p, 10.0, g15, quad).rate_bps_hz == pytest.approx(
            expected, abs=1e-12
        )

    def test_identical_kernel_arguments_cancel_exactly(self, g15):
        # degenerate two-term difference: both terms share the argument
        a = ergodic_log_gamma(3.7, g15)
        b = ergodic_log_gamma(3.7, g15)
        assert a.rate_bps_hz - b.rate_bps_hz == 0.0

    def test_transmit_interference_ceiling(self, params, g15):
        # rate is capped at log2(1 + p_t/p_r) no matter how close the user is
        ceiling = math.log2(1.0 + params.power_split_transmit / params.power_split_reflect)
        assert noma_rate_transmit(params, 0.05, g15).rate_bps_hz < ceiling


class TestOmaRate:
    def test_dedicated_channel_equals_full_rate(self, g15, quad):
        p = default_system_params(
            oma_power_reflect=1.0, oma_resource_share_reflect=1.0
        )
        geo = LinkGeometry(10.0, Side.REFLECT)
        c_full = effective_gain(p, geo, Protocol.NOMA, Role.FULL)
        expected = ergodic_log_gamma(c_full, g15, quad).rate_bps_hz
        assert oma_rate(p, geo, g15, quad).rate_bps_hz == pytest.approx(expected, rel=1e-12)

    def test_reference_configuration(self, params, g15, quad):
        geo = LinkGeometry(10.0, Side.REFLECT)
        c = effective_gain(params, geo, Protocol.OMA, Role.SIGNAL)
        expected = 0.5 * ergodic_log_gamma(c, g15, quad).rate_bps_hz
        assert oma_rate(params, geo, g15, quad).rate_bps_hz == pytest.approx(expected, rel=1e-12)

    def test_halving_share_loses_less_than_half(self, g15):
        # delta * log2(1 + x/delta) increases with delta but sublinearly
        geo = LinkGeometry(10.0, Side.REFLECT)
        full = default_system_params(oma_resource_share_reflect=1.0)
        half = default_system_params(oma_resource_share_reflect=0.5)
        r_full = oma_rate(full, geo, g15).rate_bps_hz
        r_half = oma_rate(half, geo, g15).rate_bps_hz
        assert 0.5 * r_full < r_half < r_full


class TestCrossProtocol:
    @pytest.mark.parametrize("n", [5, 15, 30])
    @pytest.mark.parametrize("d", [10.0, 40.0])
    def test_noma_sum_rate_dominates_oma(self, n, d, params, quad):
        g = gamma_params(n)
        noma_sum = (
            noma_rate_reflect(params, d, g, quad).rate_bps_hz
            + noma_rate_transmit(params, d, g, quad).rate_bps_hz
        )
        oma_sum = (
            oma_rate(params, LinkGeometry(d, Side.REFLECT), g, quad).rate_bps_hz
            + oma_rate(params, LinkGeometry(d, Side.TRANSMIT), g, quad).rate_bps_hz
        )
        assert noma_sum >= oma_sum

    def test_rate_for_dispatch(self, params, g15, quad):
        assert rate_for(params, Protocol.NOMA, Side.REFLECT, 10.0, g15, quad) == noma_rate_reflect(
            params, 10.0, g15, quad
        )
        assert rate_for(params, Protocol.OMA, Side.TRANSMIT, 10.0, g15, quad) == oma_rate(
            params, LinkGeometry(10.0, Side.TRANSMIT), g15, quad
        )


class TestQuadratureSpec:
    def test_rejects_bad_tolerances(self):
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tolerance=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tolerance=-1e-9)
        with pytest.raises(ValueError):
            QuadratureSpec(max_subdivisions=0)
