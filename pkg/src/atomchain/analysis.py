"""Quantitative diagnostics: spectra, front tracking, consistency, convergence.

All routines are pure post-processing over immutable snapshot series.
Field norms on [0, 1] are mesh-weighted: ||e||_2 = sqrt(dx * sum e^2), so
||e||_2 <= ||e||_inf always holds on the unit domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .averaging import choose_eps, mollify
from .errors import ConstraintError, DiagnosticError, DomainError
from .fields import FieldSnapshot
from .potential import PotentialParams, critical_constants, sigma_prime


def l2_norm(values, dx: float) -> float:
    return float(np.sqrt(dx * np.sum(np.asarray(values) ** 2)))


def linf_norm(values) -> float:
    return float(np.max(np.abs(values))) if len(values) else 0.0


@dataclass(frozen=True)
class GrowthSpectrum:
    """Linearized growth exponents about a uniform strain.

    alpha_i = sigma'(a) * lambda_i / (rho0 * dx^2) with lambda_i the
    eigenvalues of the (M-1)-point second-difference matrix. Positive
    entries mean exponential growth at rate sqrt(alpha_i).
    """

    a: float
    M: int
    alpha: np.ndarray
    rates: np.ndarray
    regime: str  # "stable_oscillatory" | "unstable"


def tridiagonal_eigenvalues(M: int) -> np.ndarray:
    """Closed-form eigenvalues -4 sin^2(i pi / 2M), i = 1..M-1, of diag(1,-2,1)."""
    i = np.arange(1, M)
    return -4.0 * np.sin(i * np.pi / (2.0 * M)) ** 2


def growth_spectrum(
    a: float, M: int, rho0: float = 1.0, params: PotentialParams = PotentialParams()
) -> GrowthSpectrum:
    """Spectrum of the chain linearized about the uniform profile F = a."""
    cc = critical_constants(params)
    if not 0 < a < cc.z_cut:
        raise DomainError(f"uniform strain must lie in (0, z_cut), got {a!r}")
    lam = tridiagonal_eigenvalues(M)
    alpha = sigma_prime(a, params) * lam * M * M / rho0
    rates = np.sqrt(alpha[alpha > 0])
    regime = "unstable" if np.any(alpha > 0) else "stable_oscillatory"
    return GrowthSpectrum(a=a, M=M, alpha=alpha, rates=rates, regime=regime)


def measure_growth_rate(times, norms) -> float:
    """Least-squares slope of log||psi|| over the late-time half of the series.

    The perturbation must actually grow; a flat or decaying series raises,
    since fitting an exponent to oscillation would be meaningless.
    """
    times = np.asarray(times, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if len(times) < 4:
        raise DiagnosticError("need at least four samples to fit a growth rate")
    if norms[-1] <= 10.0 * norms[0]:
        raise DiagnosticError(
            "series is not growing; growth-rate fit only applies to the unstable regime"
        )
    half = len(times) // 2
    slope = np.polyfit(times[half:], np.log(norms[half:]), 1)[0]
    return float(slope)


def _refine_peak(x: np.ndarray, g: np.ndarray) -> float:
    """Sub-cell location of the max of |g| by a parabola through the peak."""
    i = int(np.argmax(np.abs(g)))
    if i == 0 or i == len(g) - 1:
        return float(x[i])
    y0, y1, y2 = np.abs(g[i - 1]), np.abs(g[i]), np.abs(g[i + 1])
    denom = y0 - 2.0 * y1 + y2
    if denom == 0:
        return float(x[i])
    shift = 0.5 * (y0 - y2) / denom
    return float(x[i] + np.clip(shift, -0.5, 0.5) * (x[1] - x[0]))


def front_location(snapshot: FieldSnapshot, window=(0.0, 0.5), eps: float | None = None) -> float:
    """Steepest-gradient position of the (mollified) strain field inside a window."""
    snap = snapshot
    if snap.provenance != "mollified":
        snap = mollify(snap, eps if eps is not None else choose_eps(len(snap.x)))
    grad = np.gradient(snap.F, snap.x)
    mask = (snap.x >= window[0]) & (snap.x <= window[1])
    if not np.any(mask):
        raise DiagnosticError(f"window {window!r} contains no grid points")
    if np.max(np.abs(grad[mask])) <= 1e-8:
        raise DiagnosticError("no front detected: field is flat inside the window")
    return _refine_peak(snap.x[mask], grad[mask])


def measure_shock_speed(snapshots, window=(0.0, 0.5), eps: float | None = None) -> float:
    """Linear-fit speed of the steepest front across a snapshot series."""
    if len(snapshots) < 2:
        raise DiagnosticError("need at least two snapshots to measure a speed")
    ts = np.array([s.t for s in snapshots])
    xs = np.array([front_location(s, window, eps) for s in snapshots])
    return float(np.polyfit(ts, xs, 1)[0])


@dataclass(frozen=True)
class ConsistencyReport:
    """Per-mesh errors against a reference, on the common coarsest grid."""

    meshes: list
    times: list
    reference: str  # "exact_riemann" | "finest_mesh"
    l2: dict  # M -> list of per-time errors
    linf: dict
    grid: np.ndarray
    monotone_l2: bool
    meta: dict = field(default_factory=dict)


def consistency_table(
    runs: dict, reference, times, slack: float = 0.05
) -> ConsistencyReport:
    """Compare per-mesh strain fields against a reference across times.

    ``runs`` maps M to the list of snapshots at ``times`` (same order).
    ``reference`` is either a RiemannSolution (compared pointwise on the
    coarsest midpoint grid) or the string "finest_mesh" (the largest M in
    ``runs`` becomes the reference and is dropped from the table). Finer
    fields are restricted to the coarsest grid piecewise-linearly. The
    monotonicity verdict allows errors to rise by the ``slack`` fraction.
    """
    meshes = sorted(runs)
    if not meshes:
        raise ConstraintError("no meshes supplied")
    for M in meshes:
        if len(runs[M]) != len(times):
            raise ConstraintError(f"mesh {M} does not cover all requested times")
    if isinstance(reference, str):
        if reference != "finest_mesh":
            raise ConstraintError(f"unknown reference {reference!r}")
        ref_snaps = runs[meshes[-1]]
        table_meshes = meshes[:-1]
        ref_kind = "finest_mesh"
    else:
        ref_snaps = None
        table_meshes = meshes
        ref_kind = "exact_riemann"
    coarse_x = runs[table_meshes[0]][0].x
    dx = float(coarse_x[1] - coarse_x[0])

    l2: dict = {M: [] for M in table_meshes}
    linf: dict = {M: [] for M in table_meshes}
    for k, t in enumerate(times):
        if ref_snaps is not None:
            ref_F = ref_snaps[k].restricted_to(coarse_x).F
        else:
            ref_F = reference.sample_fields(coarse_x, t).F
        for M in table_meshes:
            err = runs[M][k].restricted_to(coarse_x).F - ref_F
            l2[M].append(l2_norm(err, dx))
            linf[M].append(linf_norm(err))
    monotone = all(
        l2[m2][k] <= l2[m1][k] * (1.0 + slack)
        for k in range(len(times))
        for m1, m2 in zip(table_meshes, table_meshes[1:])
    )
    return ConsistencyReport(
        meshes=table_meshes,
        times=list(times),
        reference=ref_kind,
        l2=l2,
        linf=linf,
        grid=coarse_x,
        monotone_l2=monotone,
        meta={"norm": "dx-weighted l2 on the coarsest midpoint grid", "slack": slack},
    )


def oscillation_wavelength(
    snapshot: FieldSnapshot,
    window=(0.25, 0.75),
    baseline_eps: float | None = None,
    min_samples: int = 8,
) -> float | None:
    """Dominant wavelength of the grid-scale oscillation inside a window.

    The smooth trend is removed by subtracting a tight mollified baseline
    (four cells wide by default: its raised-cosine weights null the 2*dx
    sawtooth exactly while following the shock profile closely); the
    wavelength is read off the peak of the discrete power spectrum of the
    remainder. Returns None when no mode dominates (flat spectrum).
    """
    if snapshot.provenance != "raw":
        raise DomainError("oscillation analysis needs the raw (non-mollified) field")
    eps = baseline_eps if baseline_eps is not None else 4.0 * snapshot.dx
    baseline = mollify(snapshot, eps)
    mask = (snapshot.x >= window[0]) & (snapshot.x <= window[1])
    y = (snapshot.F - baseline.F)[mask]
    n = len(y)
    if n < min_samples:
        raise DiagnosticError(
            f"window {window!r} holds only {n} samples (need {min_samples})"
        )
    if float(np.max(np.abs(y))) < 1e-12:
        return None
    power = np.abs(np.fft.rfft(y - np.mean(y))) ** 2
    power[0] = 0.0
    k = int(np.argmax(power))
    if k == 0:
        return None
    others = np.delete(power, k)
    if power[k] < 2.0 * (np.mean(others) + 1e-300):
        return None  # no dominant mode
    span = n * snapshot.dx
    return float(span / k)


@dataclass(frozen=True)
class ConvergenceSeries:
    """Distance of a dynamic run to a static profile over time."""

    times: np.ndarray
    norms: np.ndarray
    converged: bool
    meta: dict = field(default_factory=dict)


def static_convergence(snapshots, static_phi, threshold: float = 1e-3) -> ConvergenceSeries:
    """Mesh-weighted l2 distance ||phi_static - phi_dynamic|| over a run.

    ``static_phi`` is a callable X -> phi evaluated on each snapshot's grid
    (use statics.canonical_profile for two-phase references; the distance
    then depends on the chosen arrangement, which is recorded in the
    metadata). Converged means the final distance fell below ``threshold``
    times the initial one.
    """
    times = np.array([s.t for s in snapshots])
    norms = np.array(
        [l2_norm(s.phi - static_phi(s.x), s.dx) for s in snapshots]
    )
    converged = bool(norms[-1] < threshold * norms[0])
    return ConvergenceSeries(
        times=times,
        norms=norms,
        converged=converged,
        meta={"norm": "dx-weighted l2", "threshold": threshold,
              "arrangement": "canonical (low-strain phase left)"},
    )
