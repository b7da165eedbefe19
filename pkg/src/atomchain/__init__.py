"""Dynamical Lennard-Jones chain, its coarse-grained mesh approximations,
and the semi-analytic Riemann solutions of the associated mixed-type wave
system. See the README for the CLI and the HTTP service."""

from .potential import (
    SONIC_STRAIN,
    CriticalConstants,
    PotentialParams,
    critical_constants,
    pair_potential,
    sigma,
    sigma_prime,
    theta,
    wave_speed,
)
from .chain import (
    BoundaryCondition,
    ChainState,
    DefectSpec,
    build_initial_state,
    detect_fracture,
    discrete_energy,
    md_rhs,
    rhs_conservative,
    rhs_viscous,
)
from .fields import FieldSnapshot
from .integrator import IntegratorConfig, convergence_order, integrate
from .riemann import (
    RiemannSolution,
    RiemannState,
    Wave,
    end_load_fan,
    solve_defect,
    solve_middle_state,
)
from .statics import (
    StabilityVerdict,
    TwoPhaseSolution,
    UniformSolution,
    classify_stability,
    equilibrium,
    solve_stress_level,
    weierstrass_excess,
)
from .averaging import Mollifier, choose_eps, mollify
from .analysis import (
    ConsistencyReport,
    GrowthSpectrum,
    consistency_table,
    growth_spectrum,
    measure_growth_rate,
    measure_shock_speed,
    oscillation_wavelength,
    static_convergence,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
