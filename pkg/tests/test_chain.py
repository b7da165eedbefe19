import numpy as np
import pytest

from atomchain.chain import (
    BoundaryCondition,
    ChainState,
    DefectSpec,
    build_initial_state,
    detect_fracture,
    discrete_energy,
    fracture_from_snapshot,
    md_rhs,
    rhs_conservative,
    rhs_viscous,
    snapshot,
    velocity_bound,
    velocity_norm,
)
from atomchain.errors import ChainCrossingError, DomainError
from atomchain.potential import sigma, theta


def make_state(positions, M, rho0=1.0, velocities=None, bc=None):
    positions = np.asarray(positions, dtype=float)
    if velocities is None:
        velocities = np.zeros_like(positions)
    if bc is None:
        bc = BoundaryCondition.fixed(positions[-1])
    return ChainState(positions, np.asarray(velocities, dtype=float), M, rho0, bc)


class TestDefectSpec:
    def test_mean_strain_and_probe_points(self):
        d = DefectSpec(1.0, 1.1, 0.1)
        assert d.mean_strain == pytest.approx(1.02, rel=1e-15)
        assert d.initial_position(0.4) == pytest.approx(0.40, rel=1e-15)
        assert d.initial_position(0.5) == pytest.approx(0.51, rel=1e-15)
        assert d.initial_position(0.6) == pytest.approx(0.62, rel=1e-15)

    def test_validation(self):
        with pytest.raises(DomainError):
            DefectSpec(1.0, 1.1, 0.6)
        with pytest.raises(DomainError):
            DefectSpec(-1.0, 1.1, 0.1)


class TestBuildInitialState:
    def test_no_defect_gives_rest_positions(self):
        st = build_initial_state(DefectSpec(1.0, 1.0, 0.2), 32)
        assert np.allclose(st.positions, np.arange(33) / 32, atol=1e-15)
        assert np.all(st.velocities == 0.0)

    def test_interior_cells_carry_defect_strain_exactly(self):
        # cell edges at 0.4 and 0.6 are not mesh-aligned for M=128
        st = build_initial_state(DefectSpec(1.0, 1.3, 0.1), 128)
        strains = st.strains()
        inside = slice(52, 76)  # cells fully inside (0.4, 0.6)
        assert np.allclose(strains[inside], 1.3, atol=1e-12)
        # straddling cell 51 gets the proportional split 0.2/0.8
        assert strains[51] == pytest.approx(0.2 * 1.0 + 0.8 * 1.3, abs=1e-12)

    def test_right_end_independent_of_mesh(self):
        d = DefectSpec(1.0, 1.1, 0.07)
        ends = [build_initial_state(d, M).positions[-1] for M in (16, 32, 128, 177)]
        assert np.allclose(ends, d.mean_strain, atol=1e-14)

    def test_end_load_bc(self):
        st = build_initial_state(DefectSpec(), 16, bc_kind="end_load", v0=-0.05)
        assert st.bc.kind == "end_load"
        assert st.bc.left_position(2.0) == pytest.approx(-0.1)
        assert st.bc.left_velocity(0.5) == -0.05


class TestConservativeRhs:
    def test_rest_chain_has_zero_forces(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.0, 0.1), 64)
        assert np.all(rhs_conservative(st, params) == 0.0)

    def test_uniform_stretch_telescopes(self, params):
        st = make_state(0.9 * np.arange(17) / 16, 16)
        assert np.max(np.abs(rhs_conservative(st, params))) < 1e-10

    def test_hand_evaluated_accelerations(self, params):
        # M=4, interior node 2 displaced by +0.01; mpmath reference
        st = make_state([0.0, 0.25, 0.51, 0.75, 1.0], 4)
        acc = rhs_conservative(st, params)
        assert acc[0] == acc[4] == 0.0
        assert acc[1] == pytest.approx(0.15934372706738503, rel=1e-12)
        assert acc[2] == pytest.approx(-0.52867678625167459, rel=1e-12)
        assert acc[3] == pytest.approx(0.36933305918428956, rel=1e-12)

    def test_density_scaling(self, params):
        st1 = make_state([0.0, 0.25, 0.51, 0.75, 1.0], 4, rho0=1.0)
        st2 = make_state([0.0, 0.25, 0.51, 0.75, 1.0], 4, rho0=2.5)
        assert np.allclose(rhs_conservative(st2, params) * 2.5,
                           rhs_conservative(st1, params), rtol=1e-14)

    def test_translation_invariance(self, params):
        base = build_initial_state(DefectSpec(1.0, 1.2, 0.15), 32)
        shifted = base.copy()
        shifted.positions = shifted.positions + 0.37
        assert np.allclose(
            rhs_conservative(base, params), rhs_conservative(shifted, params), atol=1e-13
        )

    def test_crossed_state_is_refused_then_poisoned(self, params):
        st = make_state([0.0, 0.3, 0.2, 0.75, 1.0], 4)
        with pytest.raises(ChainCrossingError):
            rhs_conservative(st, params)
        assert st.crossed
        st.positions = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        with pytest.raises(ChainCrossingError):  # still poisoned
            rhs_conservative(st, params)


class TestViscousRhs:
    def test_zero_viscosity_reduces_to_conservative(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.1, 0.1), 32)
        assert np.array_equal(rhs_viscous(st, 0.0, params), rhs_conservative(st, params))

    def test_constant_velocity_adds_nothing(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.1, 0.1), 32)
        st.velocities = np.full(33, 0.3)
        assert np.allclose(
            rhs_viscous(st, 0.5, params), rhs_conservative(st, params), atol=1e-11
        )

    def test_linear_velocity_field_annihilated(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.1, 0.1), 32)
        st.velocities = 0.2 + 1.7 * np.arange(33) / 32
        assert np.allclose(
            rhs_viscous(st, 0.5, params), rhs_conservative(st, params), atol=1e-9
        )

    def test_negative_viscosity_rejected(self, params):
        st = build_initial_state(DefectSpec(), 16)
        with pytest.raises(DomainError):
            rhs_viscous(st, -0.1, params)


class TestMdRhs:
    def test_equispaced_chain_is_at_rest(self, params):
        eps = 1.0 / 16.0  # binary-exact spacing so the gaps equal eps exactly
        pos = eps * np.arange(12)
        assert np.all(md_rhs(pos, np.zeros(12), 1.0, eps, params) == 0.0)

    def test_double_stretched_bond_closed_form(self, params):
        eps, m = 0.1, 0.7
        pos = np.array([0.0, eps, 3 * eps])  # gaps eps and 2*eps
        acc = md_rhs(pos, np.zeros(3), m, eps, params)
        assert acc[1] == pytest.approx(sigma(2.0, params) / eps / m, rel=1e-13)

    def test_matches_mesh_law_on_random_states(self, params):
        rng = np.random.default_rng(42)
        for _ in range(20):
            M = int(rng.integers(4, 40))
            rho0 = float(rng.uniform(0.5, 3.0))
            pos = np.concatenate([[0.0], np.cumsum(rng.uniform(0.6, 2.0, M) / M)])
            st = make_state(pos, M, rho0=rho0)
            a_mesh = rhs_conservative(st, params)
            a_md = md_rhs(pos, np.zeros(M + 1), m=rho0, eps=1.0 / M, params=params)
            scale = np.max(np.abs(a_mesh)) + 1e-30
            assert np.max(np.abs(a_mesh - a_md)) <= 1e-12 * scale

    def test_crossing_rejected(self, params):
        with pytest.raises(ChainCrossingError):
            md_rhs(np.array([0.0, 0.2, 0.1]), np.zeros(3), 1.0, 0.1, params)


class TestEnergy:
    def test_rest_chain_energy(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.0, 0.1), 64)
        assert discrete_energy(st, params) == pytest.approx(-params.A / 4, rel=1e-12)

    def test_uniform_stretch_energy(self, params):
        st = make_state(0.95 * np.arange(33) / 32, 32)
        assert discrete_energy(st, params) == pytest.approx(theta(0.95, params), rel=1e-12)

    def test_energy_bounded_below(self, params, consts):
        rng = np.random.default_rng(3)
        for _ in range(50):
            M = int(rng.integers(4, 32))
            pos = np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 2.2, M) / M)])
            st = make_state(pos, M, velocities=rng.normal(0, 0.3, M + 1))
            assert discrete_energy(st, params) >= consts.theta_min - 1e-12

    def test_velocity_norm_and_bound(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.1, 0.1), 16)
        st.velocities = np.full(17, 0.1)
        expected = np.sqrt(15 * 0.01 / 16)
        assert velocity_norm(st) == pytest.approx(expected, rel=1e-13)
        bound = velocity_bound(discrete_energy(st, params), st.rho0, params)
        assert velocity_norm(st) <= bound


class TestFracture:
    def test_intact_chain(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.1, 0.1), 32)
        assert detect_fracture(st, params) is None

    def test_first_broken_cell_reported(self, params, consts):
        M = 32
        pos = np.arange(M + 1, dtype=float) / M
        j = 20
        pos[j + 1 :] += consts.z_cut * 1.01 / M - 1.0 / M  # stretch cell j past cutoff
        st = make_state(pos, M)
        report = detect_fracture(st, params)
        assert report is not None
        assert report.index == j
        assert report.location == pytest.approx(j / M)
        assert report.strain >= consts.z_cut

    def test_snapshot_scan_matches(self, params, consts):
        M = 32
        pos = np.arange(M + 1, dtype=float) / M
        pos[11:] += (consts.z_cut * 1.05 - 1.0) / M
        st = make_state(pos, M)
        snap = snapshot(st)
        report = fracture_from_snapshot(snap, params)
        assert report.index == detect_fracture(st, params).index
        assert report.location == pytest.approx(10 / M, abs=1e-12)


class TestSnapshotExport:
    def test_midpoint_sampling(self, params):
        st = build_initial_state(DefectSpec(1.0, 1.1, 0.1), 16)
        st.velocities = np.arange(17, dtype=float)
        snap = snapshot(st)
        assert len(snap.x) == 16
        assert snap.x[0] == pytest.approx(1 / 32)
        assert np.allclose(snap.F, st.strains())
        assert np.allclose(snap.v, np.arange(16) + 0.5)
        assert snap.provenance == "raw"
        assert snap.meta["M"] == 16
