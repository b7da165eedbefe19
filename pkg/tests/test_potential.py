import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomchain.errors import DomainError, EllipticRegionError
from atomchain.potential import (
    SONIC_STRAIN,
    PotentialParams,
    critical_constants,
    pair_force,
    pair_potential,
    sigma,
    sigma_prime,
    theta,
    wave_speed,
)

# expected values below were computed independently with mpmath at 40 digits


class TestPairPotential:
    def test_minimum_at_rest_length(self, params):
        assert pair_potential(1.0, 1.0, params) == pytest.approx(-params.A / 4, rel=1e-15)

    def test_decay_at_long_range(self, params):
        assert abs(pair_potential(10.0, 1.0, params)) < 1e-6  # 4.1667e-8

    def test_closed_form_at_double_length(self, params):
        assert pair_potential(2.0, 1.0, params) == pytest.approx(
            -0.00064595540364583333, rel=1e-14
        )

    def test_rejects_nonpositive_length(self, params):
        with pytest.raises(DomainError):
            pair_potential(0.0, 1.0, params)
        with pytest.raises(DomainError):
            pair_potential(-1.0, 1.0, params)

    @given(
        r=st.floats(0.3, 5.0),
        r0=st.floats(0.3, 3.0),
        lam=st.floats(0.05, 20.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_scale_equivariance(self, r, r0, lam):
        p = PotentialParams()
        assert pair_potential(lam * r, lam * r0, p) == pytest.approx(
            pair_potential(r, r0, p), rel=1e-12, abs=1e-300
        )


class TestEnergyDensity:
    def test_value_at_rest(self, params):
        assert theta(1.0, params) == pytest.approx(-1.0 / 48.0, rel=1e-15)

    def test_cutoff_value_is_small(self, params, consts):
        assert abs(theta(consts.z_cut, params)) < 0.1 * abs(consts.theta_min)

    def test_repulsive_core_blows_up(self, params, consts):
        assert theta(0.5, params) > 10.0 * abs(consts.theta_min)

    def test_rejects_nonpositive_stretch(self, params):
        with pytest.raises(DomainError):
            theta(-0.2, params)


class TestStress:
    def test_zero_at_rest(self, params):
        assert sigma(1.0, params) == 0.0

    def test_closed_form(self, params):
        assert sigma(2.0, params) == pytest.approx(0.001922607421875, rel=1e-15)
        assert sigma(1.05, params) == pytest.approx(0.045089994871206697, rel=1e-13)

    def test_peak_value(self, params, consts):
        assert sigma(consts.r, params) == pytest.approx(0.056039602025098324, rel=1e-13)

    def test_signs(self, params, consts):
        F = np.linspace(0.3, consts.z_cut, 1000)
        s = sigma(F, params)
        assert np.all(s[F < 1.0 - 1e-12] < 0)
        assert np.all(s[(F > 1.0 + 1e-12) & (F <= consts.z_cut)] > 0)


class TestStressDerivative:
    def test_closed_form(self, params):
        assert sigma_prime(1.0, params) == pytest.approx(1.5, rel=1e-15)
        assert sigma_prime(1.2, params) == pytest.approx(-0.15386272995880078, rel=1e-13)

    def test_vanishes_at_sonic_stretch(self, params, consts):
        assert abs(sigma_prime(consts.r, params)) < 1e-14

    def test_sign_pattern_on_grid(self, params, consts):
        F = np.linspace(0.3, 3.0, 1000)
        sp = sigma_prime(F, params)
        assert np.all(sp[F < consts.r - 1e-9] > 0)
        assert np.all(sp[F > consts.r + 1e-9] < 0)


class TestWaveSpeed:
    def test_value_at_rest(self, params):
        assert wave_speed(1.0, params) == pytest.approx(math.sqrt(1.5), rel=1e-14)

    def test_zero_at_sonic_stretch(self, params, consts):
        assert wave_speed(consts.r, params) == pytest.approx(0.0, abs=1e-7)

    def test_elliptic_region_raises(self, params):
        with pytest.raises(EllipticRegionError):
            wave_speed(1.2, params)


class TestCriticalConstants:
    def test_sonic_stretch_analytic(self, consts):
        assert consts.r == pytest.approx(1.1086834179687216, rel=1e-13)
        assert consts.r == pytest.approx(SONIC_STRAIN, rel=0, abs=0)

    def test_peak_stress(self, consts):
        assert consts.c_max == pytest.approx(0.056039602025098324, rel=1e-13)

    def test_cutoff_definition(self, params, consts):
        # defining equation sigma(z_cut) = eta_cut * c_max, to bisection tolerance
        assert sigma(consts.z_cut, params) / consts.c_max == pytest.approx(
            params.eta_cut, abs=1e-12
        )
        assert consts.z_cut == pytest.approx(2.388675958880916, rel=1e-12)
        assert consts.r < consts.z_cut

    def test_energy_minimum(self, params, consts):
        assert consts.theta_min == -params.A / 4.0

    def test_cutoff_scales_with_threshold_not_amplitude(self):
        loose = critical_constants(PotentialParams(A=1.0))
        tight = critical_constants(PotentialParams(A=0.01))
        assert loose.z_cut == pytest.approx(tight.z_cut, rel=1e-12)
        assert loose.r == tight.r

    def test_invalid_params_rejected(self):
        with pytest.raises(DomainError):
            PotentialParams(A=-1.0)
        with pytest.raises(DomainError):
            PotentialParams(eta_cut=1.5)


class TestDerivativeConsistency:
    def test_stress_is_energy_derivative(self, params, consts):
        F = np.linspace(0.8, consts.z_cut, 400)
        h = 1e-5
        fd = (theta(F + h, params) - theta(F - h, params)) / (2 * h)
        rel = np.abs(fd - sigma(F, params)) / np.maximum(np.abs(sigma(F, params)), 1e-3)
        assert np.max(rel) < 1e-6

    def test_stress_derivative_matches(self, params, consts):
        F = np.linspace(0.8, consts.z_cut, 400)
        h = 1e-5
        fd = (sigma(F + h, params) - sigma(F - h, params)) / (2 * h)
        rel = np.abs(fd - sigma_prime(F, params)) / np.maximum(
            np.abs(sigma_prime(F, params)), 1e-3
        )
        assert np.max(rel) < 1e-6


class TestForceStressIdentity:
    @given(
        rho=st.floats(0.05, 5.0),
        eps=st.floats(0.01, 2.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_mesh_stress_equals_bond_force(self, rho, eps):
        # (1/eps) * sigma(rho/eps) == d(pair energy)/d(bond length) at (rho, eps).
        # Exact identity; the float tolerance scales with the summed term
        # magnitudes since the difference itself may cancel to zero.
        p = PotentialParams.from_stress_scale(0.25)
        lhs = sigma(rho / eps, p) / eps
        rhs = pair_force(rho, eps, p)
        scale = p.stress_scale * (eps**6 / rho**7 + eps**12 / rho**13)
        assert abs(lhs - rhs) <= 1e-13 * scale
