"""Semi-discrete coarse-grained chain: states, right-hand sides, energy, fracture.

The chain carries M+1 node positions on the unit interval with mesh size
1/M. Interior nodes obey the conservative flux-difference law (optionally
with a velocity-Laplacian viscosity); boundary nodes follow the active
boundary condition. The same flux kernel evaluated at the atomic scale
reproduces the molecular-dynamics force law exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ChainCrossingError, DomainError
from .fields import FieldSnapshot
from .potential import PotentialParams, critical_constants, pair_force, sigma, theta


@dataclass(frozen=True)
class BoundaryCondition:
    """Endpoint constraint: clamped ends or a prescribed left-end motion.

    kind "fixed": phi_0 = 0, phi_M = a for all t.
    kind "end_load": phi_0(t) = v0 * t (v0 < 0 stretches), phi_M = a.
    """

    kind: str
    a: float
    v0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "end_load"):
            raise DomainError(f"unknown boundary condition kind {self.kind!r}")

    @classmethod
    def fixed(cls, a: float) -> "BoundaryCondition":
        return cls(kind="fixed", a=a)

    @classmethod
    def end_load(cls, v0: float, a: float) -> "BoundaryCondition":
        return cls(kind="end_load", a=a, v0=v0)

    def left_position(self, t: float) -> float:
        return self.v0 * t if self.kind == "end_load" else 0.0

    def left_velocity(self, t: float) -> float:
        return self.v0 if self.kind == "end_load" else 0.0


@dataclass(frozen=True)
class DefectSpec:
    """Piecewise-constant initial strain: s1 outside, s2 on (1/2-delta, 1/2+delta)."""

    s1: float = 1.0
    s2: float = 1.1
    delta: float = 0.1

    def __post_init__(self):
        if not 0 < self.delta < 0.5:
            raise DomainError(f"defect half-width must lie in (0, 1/2), got {self.delta!r}")
        if self.s1 <= 0 or self.s2 <= 0:
            raise DomainError("defect strains must be positive")

    @property
    def mean_strain(self) -> float:
        """Total elongation = right-end position of the initial profile."""
        return self.s1 * (1.0 - 2.0 * self.delta) + self.s2 * 2.0 * self.delta

    def initial_position(self, X):
        """Exact integral of the strain profile from 0 to X."""
        X = np.asarray(X, dtype=float)
        lo, hi = 0.5 - self.delta, 0.5 + self.delta
        inside = np.clip(X, lo, hi) - lo  # measure of the defect below X
        out = self.s1 * (X - inside) + self.s2 * inside
        return float(out) if np.ndim(out) == 0 else out

    def strain_at(self, X):
        X = np.asarray(X, dtype=float)
        inside = (X > 0.5 - self.delta) & (X < 0.5 + self.delta)
        out = np.where(inside, self.s2, self.s1)
        return float(out) if np.ndim(out) == 0 else out


@dataclass
class ChainState:
    """Node positions/velocities of the M-cell chain at time t.

    ``crossed`` marks a state whose particles have crossed; once set, any
    right-hand-side evaluation is refused (the discrete energy blows up at
    a crossing, so continuing silently would be unphysical).
    """

    positions: np.ndarray
    velocities: np.ndarray
    M: int
    rho0: float
    bc: BoundaryCondition
    t: float = 0.0
    crossed: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        if len(self.positions) != self.M + 1 or len(self.velocities) != self.M + 1:
            raise DomainError("state arrays must have M+1 entries")
        if self.M < 2:
            raise DomainError(f"need at least two cells, got M={self.M}")
        if self.rho0 <= 0:
            raise DomainError(f"density must be positive, got {self.rho0!r}")

    @property
    def dx(self) -> float:
        return 1.0 / self.M

    def strains(self) -> np.ndarray:
        return np.diff(self.positions) * self.M

    def copy(self) -> "ChainState":
        return replace(
            self,
            positions=self.positions.copy(),
            velocities=self.velocities.copy(),
            meta=dict(self.meta),
        )


def build_initial_state(
    defect: DefectSpec,
    M: int,
    rho0: float = 1.0,
    bc_kind: str = "fixed",
    v0: float = 0.0,
) -> ChainState:
    """Chain at rest whose positions are the exact integral of the defect strain.

    Cells straddling a defect edge receive the proportional split of the two
    strains, so the right-end position (and hence the boundary value a) is
    independent of the mesh.
    """
    nodes = np.arange(M + 1) / M
    positions = defect.initial_position(nodes)
    a = defect.mean_strain
    if bc_kind == "fixed":
        bc = BoundaryCondition.fixed(a)
    elif bc_kind == "end_load":
        bc = BoundaryCondition.end_load(v0, a)
    else:
        raise DomainError(f"unknown boundary condition kind {bc_kind!r}")
    return ChainState(
        positions=positions,
        velocities=np.zeros(M + 1),
        M=M,
        rho0=rho0,
        bc=bc,
    )


def _checked_strains(state: ChainState) -> np.ndarray:
    if state.crossed:
        raise ChainCrossingError(
            f"state at t={state.t!r} is poisoned by a particle crossing"
        )
    strains = state.strains()
    if np.any(strains <= 0.0):
        state.crossed = True
        j = int(np.argmax(strains <= 0.0))
        raise ChainCrossingError(
            f"non-positive strain {strains[j]!r} in cell {j} at t={state.t!r}"
        )
    return strains


def rhs_conservative(state: ChainState, params: PotentialParams = PotentialParams()) -> np.ndarray:
    """Nodal accelerations of the flux-difference law.

    Interior node j (1..M-1) feels the stress difference of its two cells
    divided by rho0 * dx. Boundary nodes are constrained (acceleration 0:
    clamped, or moving at constant prescribed speed).
    """
    strains = _checked_strains(state)
    flux = sigma(strains, params)
    acc = np.zeros(state.M + 1)
    acc[1:-1] = (flux[1:] - flux[:-1]) * state.M / state.rho0
    return acc


def rhs_viscous(
    state: ChainState, mu: float, params: PotentialParams = PotentialParams()
) -> np.ndarray:
    """Conservative accelerations plus the viscous velocity-Laplacian term.

    The dissipative term is mu * (v_{j+1} - 2 v_j + v_{j-1}) / dx^2; the
    boundary velocities of the active boundary condition enter the stencil
    at j = 1 and j = M-1.
    """
    if mu < 0:
        raise DomainError(f"viscosity must be nonnegative, got {mu!r}")
    acc = rhs_conservative(state, params)
    v = state.velocities
    acc[1:-1] += mu * (v[2:] - 2.0 * v[1:-1] + v[:-2]) * state.M**2 / state.rho0
    return acc


def md_rhs(
    positions,
    velocities,
    m: float,
    eps: float,
    params: PotentialParams = PotentialParams(),
) -> np.ndarray:
    """Accelerations of the nearest-neighbor atomistic chain with lattice scale eps.

    m * x_i'' = Phi'(x_{i+1} - x_i) - Phi'(x_i - x_{i-1}); end atoms are
    held fixed. Velocities do not enter the force law; the argument is kept
    for signature parity with the mesh-based right-hand sides.
    """
    positions = np.asarray(positions, dtype=float)
    gaps = np.diff(positions)
    if np.any(gaps <= 0.0):
        raise ChainCrossingError("atoms must be strictly ordered")
    force = pair_force(gaps, eps, params)
    acc = np.zeros(len(positions))
    acc[1:-1] = (force[1:] - force[:-1]) / m
    return acc


def discrete_energy(state: ChainState, params: PotentialParams = PotentialParams()) -> float:
    """Mesh-weighted kinetic-plus-potential energy of the chain.

    (rho0 / 2M) * sum of interior velocity squares plus (1/M) * sum of the
    per-cell energy density. Conserved by the conservative law, dissipated
    by the viscous one.
    """
    strains = state.strains()
    if np.any(strains <= 0.0):
        raise DomainError("energy undefined at a particle crossing")
    kinetic = 0.5 * state.rho0 * float(np.sum(state.velocities[1:-1] ** 2)) / state.M
    potential = float(np.sum(theta(strains, params))) / state.M
    return kinetic + potential


def velocity_norm(state: ChainState) -> float:
    """Interior-velocity norm sqrt((1/M) sum v_j^2) used in the energy bounds."""
    return float(np.sqrt(np.sum(state.velocities[1:-1] ** 2) / state.M))


def velocity_bound(initial_energy: float, rho0: float, params: PotentialParams = PotentialParams()) -> float:
    """A-priori bound on :func:`velocity_norm` from energy conservation.

    The kinetic part satisfies (rho0/2) * norm^2 <= E(0) + |theta_min|, so
    the norm is bounded by sqrt of (2/rho0) * (E(0) + |theta_min|).
    """
    theta_min = -params.A / 4.0
    return float(np.sqrt(max(0.0, (2.0 / rho0) * (initial_energy + abs(theta_min)))))


@dataclass(frozen=True)
class FractureReport:
    """First bond at or beyond the cutoff stretch."""

    time: float
    index: int
    location: float  # left node coordinate X_j of the broken cell
    strain: float


def detect_fracture(
    state: ChainState, params: PotentialParams = PotentialParams()
) -> FractureReport | None:
    """First cell whose strain reaches the cutoff, or None."""
    z_cut = critical_constants(params).z_cut
    strains = state.strains()
    over = np.nonzero(strains >= z_cut)[0]
    if len(over) == 0:
        return None
    j = int(over[0])
    return FractureReport(time=state.t, index=j, location=j * state.dx, strain=float(strains[j]))


def fracture_from_snapshot(
    snapshot: FieldSnapshot, params: PotentialParams = PotentialParams()
) -> FractureReport | None:
    """Fracture scan on an exported snapshot (midpoint grid)."""
    z_cut = critical_constants(params).z_cut
    over = np.nonzero(snapshot.F >= z_cut)[0]
    if len(over) == 0:
        return None
    j = int(over[0])
    return FractureReport(
        time=snapshot.t,
        index=j,
        location=float(snapshot.x[j] - 0.5 * snapshot.dx),
        strain=float(snapshot.F[j]),
    )


def snapshot(state: ChainState, provenance: str = "raw") -> FieldSnapshot:
    """Export the state to midpoint-sampled fields."""
    phi = state.positions
    v = state.velocities
    return FieldSnapshot(
        t=state.t,
        x=(np.arange(state.M) + 0.5) * state.dx,
        F=state.strains(),
        v=0.5 * (v[1:] + v[:-1]),
        phi=0.5 * (phi[1:] + phi[:-1]),
        provenance=provenance,
        meta={"M": state.M, **state.meta},
    )
