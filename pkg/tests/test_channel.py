import dataclasses
import math

import pytest
from scipy import integrate

from star_coverage import (
    GammaApprox,
    LinkGeometry,
    Protocol,
    ProtocolMismatchError,
    Role,
    Side,
    effective_gain,
    gamma_params,
    gamma_pdf,
    transmit_snr,
)
from star_coverage.config import default_system_params

# Frozen from a 40-digit evaluation of the defining constants:
#   shape(N=1) = pi^2/(16-pi^2), scale = (16-pi^2)/(4*pi)
KAPPA_1 = 1.6099457599185225
KAPPA_15 = 24.149186398777838
TAU = 0.48784138133771438


class TestTransmitSnr:
    def test_default_powers_give_1e6(self, params):
        assert transmit_snr(params) == pytest.approx(1e6, rel=1e-12)

    def test_equal_powers_give_unity(self):
        p = default_system_params(total_power_dbm=0.0, noise_power_dbm=0.0)
        assert transmit_snr(p) == 1.0

    def test_30db_gap(self):
        p = default_system_params(total_power_dbm=20.0, noise_power_dbm=-10.0)
        assert transmit_snr(p) == pytest.approx(1e3, rel=1e-12)


class TestGammaParams:
    def test_single_element_values(self):
        g = gamma_params(1)
        assert g.shape == pytest.approx(KAPPA_1, rel=1e-12)
        assert g.scale == pytest.approx(TAU, rel=1e-12)

    def test_fifteen_elements(self):
        g = gamma_params(15)
        assert g.shape == pytest.approx(KAPPA_15, rel=1e-12)
        assert g.scale == pytest.approx(TAU, rel=1e-12)

    def test_shape_linear_in_n(self):
        assert gamma_params(2).shape == 2.0 * gamma_params(1).shape

    def test_scale_independent_of_n(self):
        scales = {gamma_params(n).scale for n in (1, 4, 15, 30, 100)}
        assert len(scales) == 1

    def test_shape_strictly_increasing_in_n(self):
        shapes = [gamma_params(n).shape for n in range(1, 12)]
        assert all(a < b for a, b in zip(shapes, shapes[1:]))

    def test_mean_is_n_pi_over_4(self):
        for n in (1, 7, 30):
            g = gamma_params(n)
            assert g.shape * g.scale == pytest.approx(n * math.pi / 4.0, rel=1e-12)

    def test_rejects_zero_elements(self):
        with pytest.raises(ValueError):
            gamma_params(0)


class TestGammaPdf:
    def test_exponential_at_origin(self):
        assert gamma_pdf(0.0, GammaApprox(1.0, 1.0)) == 1.0

    def test_shape_two_at_one(self):
        assert gamma_pdf(1.0, GammaApprox(2.0, 1.0)) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_rejects_negative_argument(self):
        with pytest.raises(ValueError):
            gamma_pdf(-0.1, GammaApprox(2.0, 1.0))

    @pytest.mark.parametrize(
        "g",
        [
            GammaApprox(0.5, 2.0),
            GammaApprox(1.0, 1.0),
            GammaApprox(2.0, 3.0),
            gamma_params(1),
            gamma_params(15),
            gamma_params(30),
        ],
        ids=lambda g: f"shape={g.shape:.3g},scale={g.scale:.3g}",
    )
    def test_unit_mass(self, g):
        w_hi = g.shape * g.scale + 40.0 * math.sqrt(g.shape) * g.scale
        mass, _ = integrate.quad(lambda w: gamma_pdf(w, g), 0.0, w_hi, limit=200)
        assert mass == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("g", [gamma_params(1), gamma_params(15), GammaApprox(2.5, 0.7)])
    def test_mean_matches_shape_times_scale(self, g):
        w_hi = g.shape * g.scale + 40.0 * math.sqrt(g.shape) * g.scale
        mean, _ = integrate.quad(lambda w: w * gamma_pdf(w, g), 0.0, w_hi, limit=200)
        assert mean == pytest.approx(g.shape * g.scale, rel=1e-8)

    def test_nonnegative_everywhere(self):
        g = gamma_params(5)
        assert all(gamma_pdf(w, g) >= 0.0 for w in [0.0, 1e-9, 0.3, 3.9, 50.0, 400.0])

    def test_large_shape_does_not_overflow(self):
        g = gamma_params(30)  # shape ~ 48: naive Gamma(shape)*scale**shape arithmetic blows up
        w_mode = (g.shape - 1.0) * g.scale
        assert math.isfinite(gamma_pdf(w_mode, g)) and gamma_pdf(w_mode, g) > 0


class TestEffectiveGain:
    def test_reference_reflect_signal_gain(self, params):
        geo = LinkGeometry(10.0, Side.REFLECT)
        c = effective_gain(params, geo, Protocol.NOMA, Role.SIGNAL)
        # 1e6 * 0.4 * 0.64 * 10^-2.5 * 10^-2.5, recomputed by hand
        assert c == pytest.approx(2.56, rel=1e-12)

    def test_zero_power_share_gives_zero(self):
        p = default_system_params(power_split_reflect=0.0, power_split_transmit=1.0)
        c = effective_gain(p, LinkGeometry(10.0, Side.REFLECT), Protocol.NOMA, Role.SIGNAL)
        assert c == 0.0

    def test_doubling_distance_scales_by_power_law(self, params):
        alpha = params.path_loss_exponent
        c1 = effective_gain(params, LinkGeometry(7.0, Side.TRANSMIT), Protocol.NOMA, Role.FULL)
        c2 = effective_gain(params, LinkGeometry(14.0, Side.TRANSMIT), Protocol.NOMA, Role.FULL)
        assert c2 == pytest.approx(c1 * 2.0 ** (-alpha), rel=1e-12)

    def test_interference_is_reflect_share_of_full(self, params):
        geo = LinkGeometry(25.0, Side.TRANSMIT)
        full = effective_gain(params, geo, Protocol.NOMA, Role.FULL)
        interf = effective_gain(params, geo, Protocol.NOMA, Role.INTERFERENCE)
        assert interf == pytest.approx(params.power_split_reflect * full, rel=1e-14)

    def test_oma_gain_composition(self, params):
        geo = LinkGeometry(10.0, Side.REFLECT)
        c = effective_gain(params, geo, Protocol.OMA, Role.SIGNAL)
        # 1e6 * 0.5 * 0.64 / (0.5 * 10^2.5 * 10^2.5) recomputed by hand
        assert c == pytest.approx(6.4, rel=1e-12)

    def test_oma_rejects_interference_role(self, params):
        geo = LinkGeometry(10.0, Side.REFLECT)
        with pytest.raises(ProtocolMismatchError):
            effective_gain(params, geo, Protocol.OMA, Role.INTERFERENCE)

    def test_strictly_decreasing_in_distance(self, params):
        gains = [
            effective_gain(params, LinkGeometry(d, Side.REFLECT), Protocol.NOMA, Role.SIGNAL)
            for d in (1.0, 5.0, 25.0, 125.0)
        ]
        assert all(a > b for a, b in zip(gains, gains[1:]))

    def test_strictly_increasing_in_snr_amp_and_power(self, params):
        geo = LinkGeometry(10.0, Side.TRANSMIT)
        base = effective_gain(params, geo, Protocol.NOMA, Role.SIGNAL)
        louder = default_system_params(total_power_dbm=33.0)
        assert effective_gain(louder, geo, Protocol.NOMA, Role.SIGNAL) > base
        brighter = default_system_params(amp_transmit=0.7, amp_reflect=0.7)
        assert effective_gain(brighter, geo, Protocol.NOMA, Role.SIGNAL) > base
        hungrier = default_system_params(power_split_reflect=0.3, power_split_transmit=0.7)
        assert effective_gain(hungrier, geo, Protocol.NOMA, Role.SIGNAL) > base


class TestValidation:
    def test_default_parameters_are_valid(self, params):
        # 0.8^2 + 0.6^2 lands 2 ulp above 1.0 in binary; must still pass
        assert params.amp_reflect == 0.8 and params.amp_transmit == 0.6

    def test_power_split_must_sum_to_one(self):
        with pytest.raises(ValueError, match="must equal 1"):
            default_system_params(power_split_reflect=0.3, power_split_transmit=0.6)

    def test_decoding_order_enforced(self):
        with pytest.raises(ValueError, match="decoding order"):
            default_system_params(power_split_reflect=0.7, power_split_transmit=0.3)

    def test_passive_surface_constraint(self):
        with pytest.raises(ValueError, match="<= 1"):
            default_system_params(amp_reflect=0.9, amp_transmit=0.6)

    def test_resource_share_zero_rejected(self):
        with pytest.raises(ValueError, match="oma_resource_share_reflect"):
            default_system_params(oma_resource_share_reflect=0.0)

    def test_bad_element_count_rejected(self):
        with pytest.raises(ValueError):
            default_system_params(n_elements=0)

    def test_nonpositive_geometry_rejected(self):
        with pytest.raises(ValueError):
            default_system_params(bs_ris_distance_m=0.0)
        with pytest.raises(ValueError):
            LinkGeometry(0.0, Side.REFLECT)

    def test_gamma_approx_requires_positive_parameters(self):
        with pytest.raises(ValueError):
            GammaApprox(0.0, 1.0)
        with pytest.raises(ValueError):
            GammaApprox(1.0, -2.0)

    def test_params_immutable(self, params):
        with pytest.raises(dataclasses.FrozenInstanceError):
            params.n_elements = 99
