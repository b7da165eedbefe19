import numpy as np
import pytest

from atomchain.errors import ConstraintError, DomainError, NoSolutionError
from atomchain.numerics import bisect_root
from atomchain.potential import sigma, theta
from atomchain.statics import (
    TwoPhaseSolution,
    UniformSolution,
    canonical_profile,
    classify_stability,
    equilibrium,
    solve_stress_level,
    weierstrass_excess,
)


class TestStressLevelRoots:
    def test_zero_level(self, params, consts):
        roots = solve_stress_level(0.0, params)
        assert roots == pytest.approx((1.0, consts.z_cut), rel=1e-10)

    def test_peak_level_degenerates(self, params, consts):
        b_minus, b_plus = solve_stress_level(consts.c_max, params)
        assert b_minus == pytest.approx(consts.r, abs=1e-9)
        assert b_plus == pytest.approx(consts.r, abs=1e-9)

    def test_two_roots_bracket_sonic_stretch(self, params, consts):
        b_minus, b_plus = solve_stress_level(0.001, params)
        assert b_minus < consts.r < b_plus
        assert sigma(b_minus, params) == pytest.approx(0.001, abs=1e-10)
        assert sigma(b_plus, params) == pytest.approx(0.001, abs=1e-10)

    def test_negative_level_single_root(self, params):
        (b,) = solve_stress_level(-0.1, params)
        assert b < 1.0
        assert sigma(b, params) == pytest.approx(-0.1, abs=1e-10)

    def test_above_peak_rejected(self, params, consts):
        with pytest.raises(NoSolutionError):
            solve_stress_level(consts.c_max * 1.01, params)


class TestEquilibrium:
    def test_compressed_bar_is_uniform(self, params):
        sol = equilibrium(0.9, params=params)
        assert isinstance(sol, UniformSolution)
        assert sol.a == 0.9

    def test_boundary_case_unit_displacement(self, params):
        sol = equilibrium(1.0, params=params)
        assert isinstance(sol, TwoPhaseSolution)
        assert sol.c == pytest.approx(0.0, abs=1e-12)
        assert sol.b_minus == pytest.approx(1.0, abs=1e-10)
        assert sol.l_minus == pytest.approx(1.0, abs=1e-10)
        assert sol.l_plus == pytest.approx(0.0, abs=1e-10)

    def test_relaxed_mixture_closed_form(self, params, consts):
        sol = equilibrium(1.2, 0.0, params)
        z = consts.z_cut
        assert sol.b_minus == pytest.approx(1.0, abs=1e-10)
        assert sol.b_plus == pytest.approx(z, rel=1e-12)
        assert sol.l_minus == pytest.approx((z - 1.2) / (z - 1.0), rel=1e-10)

    def test_mixture_constraints_hold(self, params):
        for a in (1.0, 1.05, 1.2, 1.5, 2.0):
            for c in (0.0, 0.3 * sigma(a, params), sigma(a, params)):
                sol = equilibrium(a, c, params)
                assert sol.l_minus + sol.l_plus == pytest.approx(1.0, abs=1e-10)
                assert sol.a == pytest.approx(a, abs=1e-10)
                assert 0.0 <= sol.l_minus <= 1.0 and 0.0 <= sol.l_plus <= 1.0
                assert 1.0 - 1e-9 <= sol.b_minus <= a + 1e-9 <= sol.b_plus + 2e-9
                assert sigma(sol.b_minus, params) == pytest.approx(c, abs=1e-9)

    def test_stress_level_out_of_range(self, params):
        with pytest.raises(ConstraintError):
            equilibrium(1.2, sigma(1.2, params) * 1.5, params)
        with pytest.raises(ConstraintError):
            equilibrium(1.2, -0.01, params)

    def test_invalid_displacement(self, params, consts):
        with pytest.raises(DomainError):
            equilibrium(-0.5, params=params)
        with pytest.raises(ConstraintError):
            equilibrium(consts.z_cut + 0.5, params=params)

    def test_default_stress_level_gives_uniform_member(self, params):
        sol = equilibrium(1.05, params=params)
        assert sol.l_plus == pytest.approx(0.0, abs=1e-9)
        assert sol.b_minus == pytest.approx(1.05, abs=1e-9)

    def test_canonical_profile_endpoints(self, params):
        sol = equilibrium(1.2, 0.0, params)
        X = np.linspace(0.0, 1.0, 7)
        phi = canonical_profile(sol, X)
        assert phi[0] == 0.0
        assert phi[-1] == pytest.approx(1.2, abs=1e-9)
        assert np.all(np.diff(phi) > 0)


class TestExcessFunction:
    def test_identity_case(self, params):
        assert weierstrass_excess(1.07, 1.07, params) == 0.0

    def test_convex_region_positive(self, params):
        # mpmath: 9.1269505805e-4
        assert weierstrass_excess(1.0, 1.05, params) == pytest.approx(
            0.00091269505805400, rel=1e-12
        )

    def test_concave_region_witness(self, params):
        # mpmath: -3.6189936769798e-3
        assert weierstrass_excess(1.0, 1.3, params) == pytest.approx(
            -0.0036189936769798, rel=1e-12
        )

    def test_nonnegative_up_to_equal_stress_stretch(self, params, consts):
        # chord-area geometry: for u below the sonic stretch the excess is
        # nonnegative for every v up to the stretch carrying the same stress
        # beyond the peak (all of (0, z_cut] when u <= 1); past that point
        # the stress deficit accumulates and the excess turns negative.
        from atomchain.riemann import fbar

        for u in (0.5, 0.8, 0.95, 1.0, 1.05, consts.r * 0.999):
            vs = np.linspace(0.2, fbar(u, params), 500)
            w = theta(vs, params) - theta(u, params) - (vs - u) * sigma(u, params)
            assert w.min() >= -1e-12

    def test_negative_beyond_equal_stress_stretch(self, params, consts):
        from atomchain.riemann import fbar

        u = 1.05
        v = 0.5 * (fbar(u, params) + consts.z_cut)
        assert weierstrass_excess(v, u, params) < 0


class TestStabilityClassification:
    def test_uniform_compressed_stable(self, params):
        assert classify_stability(0.9, params).classification == "locally_stable"

    def test_uniform_beyond_sonic_unstable_with_witness(self, params):
        verdict = classify_stability(1.3, params)
        assert verdict.classification == "unstable"
        v, u = verdict.witness
        assert weierstrass_excess(v, u, params) < 0

    def test_two_phase_with_high_phase_unstable(self, params):
        sol = equilibrium(1.2, 0.0, params)
        assert sol.l_plus > 0
        verdict = classify_stability(sol, params)
        assert verdict.classification == "unstable"
        v, u = verdict.witness
        assert weierstrass_excess(v, u, params) < 0

    def test_two_phase_without_high_phase_stable(self, params):
        sol = equilibrium(1.05, params=params)
        assert sol.l_plus == pytest.approx(0.0, abs=1e-9)
        assert classify_stability(sol, params).classification == "locally_stable"

    def test_transition_exactly_at_sonic_stretch(self, params, consts):
        flip = bisect_root(
            lambda F: 1.0
            if classify_stability(F, params).classification == "unstable"
            else -1.0,
            1.0,
            1.3,
            xtol=1e-12,
        )
        assert flip == pytest.approx(consts.r, abs=1e-8)

    def test_uniform_energy_beats_same_mean_mixtures(self, params, consts):
        rng = np.random.default_rng(7)
        a = 0.9
        for _ in range(200):
            l = rng.uniform(0.05, 0.95)
            b1 = rng.uniform(0.3, consts.z_cut)
            b2 = (a - l * b1) / (1.0 - l)
            if not 0.05 < b2 <= consts.z_cut:
                continue
            mix = l * theta(b1, params) + (1.0 - l) * theta(b2, params)
            assert theta(a, params) <= mix + 1e-12
