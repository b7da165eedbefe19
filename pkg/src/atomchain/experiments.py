"""Experiment orchestration shared by the HTTP service and the CLI.

Each runner consumes validated config models and returns plain dataclasses
holding arrays; serialization (CSV files, JSON responses) happens in the
callers. Mesh-sweep members are independent and are run concurrently.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis, averaging, chain, integrator, riemann, statics
from .config import ExperimentConfig
from .errors import AtomChainError, IntegrationAbort
from .fields import FieldSnapshot, midpoint_grid
from .potential import PotentialParams, critical_constants


def derived_constants(params: PotentialParams) -> dict:
    cc = critical_constants(params)
    return {"r": cc.r, "c_max": cc.c_max, "z_cut": cc.z_cut, "theta_min": cc.theta_min}


@dataclass
class SnapshotRecord:
    M: int
    t: float
    family: str  # "conservative" | "viscous"
    snapshot: FieldSnapshot
    mollified: FieldSnapshot | None = None


@dataclass
class SimulationResult:
    config: ExperimentConfig
    constants: dict
    records: list = field(default_factory=list)
    events: list = field(default_factory=list)  # dicts: fracture / abort entries
    aborted: bool = False


def _run_family(cfg: ExperimentConfig, M: int, family: str, params: PotentialParams):
    defect = cfg.defect.spec()
    state = chain.build_initial_state(
        defect, M, rho0=cfg.rho0, bc_kind=cfg.bc, v0=cfg.v0
    )
    if family == "viscous":
        rhs = lambda s: chain.rhs_viscous(s, cfg.mu, params)  # noqa: E731
    else:
        rhs = lambda s: chain.rhs_conservative(s, params)  # noqa: E731
    icfg = integrator.IntegratorConfig(
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_step=cfg.max_step,
        sample_times=tuple(cfg.times),
    )
    records, events = [], []
    try:
        states = integrator.integrate_states(rhs, state, icfg)
    except IntegrationAbort as exc:
        events.append(
            {"kind": "abort", "M": M, "family": family, "t": exc.t, "reason": str(exc)}
        )
        return records, events, True
    fractured = False
    for st in states:
        snap = chain.snapshot(st)
        snap.meta["family"] = family
        rec = SnapshotRecord(M=M, t=st.t, family=family, snapshot=snap)
        if family == "conservative" and cfg.mollified:
            eps = cfg.eps if cfg.eps is not None else averaging.choose_eps(M)
            rec.mollified = averaging.mollify(snap, eps)
        records.append(rec)
        if not fractured:
            report = chain.detect_fracture(st, params)
            if report is not None:
                fractured = True
                events.append(
                    {
                        "kind": "fracture",
                        "M": M,
                        "family": family,
                        "t": report.time,
                        "index": report.index,
                        "location": report.location,
                        "strain": report.strain,
                    }
                )
    return records, events, False


def run_simulation(cfg: ExperimentConfig) -> SimulationResult:
    """Conservative and/or viscous dynamics for every configured mesh."""
    params = cfg.potential.params()
    result = SimulationResult(config=cfg, constants=derived_constants(params))
    families = []
    if cfg.raw or cfg.mollified:
        families.append("conservative")
    if cfg.viscous:
        families.append("viscous")
    jobs = [(M, family) for M in cfg.meshes for family in families]
    with ThreadPoolExecutor(max_workers=min(8, len(jobs))) as pool:
        outcomes = list(
            pool.map(lambda job: _run_family(cfg, job[0], job[1], params), jobs)
        )
    for records, events, aborted in outcomes:
        result.records.extend(records)
        result.events.extend(events)
        result.aborted = result.aborted or aborted
    result.records.sort(key=lambda r: (r.M, r.family, r.t))
    return result


@dataclass
class RiemannResult:
    constants: dict
    waves: list  # dicts: kind, left/right states, speeds
    middle: dict | None
    t0: float
    t_boundary: float | None
    snapshots: list


def run_riemann(
    s1: float,
    s2: float,
    delta: float,
    times,
    points: int = 256,
    params: PotentialParams = PotentialParams(),
) -> RiemannResult:
    """Exact defect solution sampled on a midpoint grid at the requested times."""
    sol = riemann.solve_defect(s1, s2, delta, params)
    grid = midpoint_grid(points)
    snapshots = [sol.sample_fields(grid, float(t)) for t in times]
    middle = sol.meta.get("middle")
    return RiemannResult(
        constants=derived_constants(params),
        waves=[
            {
                "kind": w.kind,
                "center": w.center,
                "left": {"F": w.left.F, "v": w.left.v},
                "right": {"F": w.right.F, "v": w.right.v},
                "speed_lo": w.speed_lo,
                "speed_hi": w.speed_hi,
            }
            for w in sol.waves
        ],
        middle=None if middle is None else {"F": middle.F, "v": middle.v},
        t0=sol.t0,
        t_boundary=sol.meta.get("t_boundary"),
        snapshots=snapshots,
    )


@dataclass
class StaticResult:
    constants: dict
    kind: str  # "uniform" | "two_phase"
    solution: dict
    stability: dict


def run_static(
    a: float, c: float | None = None, params: PotentialParams = PotentialParams()
) -> StaticResult:
    sol = statics.equilibrium(a, c, params)
    verdict = statics.classify_stability(sol, params)
    if isinstance(sol, statics.UniformSolution):
        kind = "uniform"
        payload = {"a": sol.a, "c": sol.c}
    else:
        kind = "two_phase"
        payload = {
            "c": sol.c,
            "b_minus": sol.b_minus,
            "b_plus": sol.b_plus,
            "l_minus": sol.l_minus,
            "l_plus": sol.l_plus,
        }
    return StaticResult(
        constants=derived_constants(params),
        kind=kind,
        solution=payload,
        stability={
            "classification": verdict.classification,
            "witness": list(verdict.witness) if verdict.witness else None,
        },
    )


@dataclass
class StabilityResult:
    constants: dict
    a: float
    M: int
    alpha: list
    rates: list
    regime: str
    measured_rate: float | None = None


def run_stability(
    a: float,
    M: int,
    rho0: float = 1.0,
    measure_rate: bool = False,
    t_end: float = 8.0,
    params: PotentialParams = PotentialParams(),
) -> StabilityResult:
    """Closed-form growth spectrum, optionally cross-checked by a linearized run."""
    spectrum = analysis.growth_spectrum(a, M, rho0, params)
    measured = None
    if measure_rate:
        if spectrum.regime != "unstable":
            raise AtomChainError(
                "rate measurement needs the unstable regime (a beyond the sonic stretch)"
            )
        from .analysis import measure_growth_rate, tridiagonal_eigenvalues
        from .integrator import adaptive_solve
        from .potential import sigma_prime

        lam = tridiagonal_eigenvalues(M)
        coeff = sigma_prime(a, params) * M * M / rho0
        n = M - 1

        def lin_rhs(t, y):
            u = y[:n]
            lap = np.zeros(n)
            lap[:] = -2.0 * u
            lap[:-1] += u[1:]
            lap[1:] += u[:-1]
            return np.concatenate([y[n:], coeff * lap])

        seed = 1e-8 * np.ones(2 * n)
        sample_times = tuple(np.linspace(t_end / 16.0, t_end, 16))
        samples, _ = adaptive_solve(
            lin_rhs, 0.0, seed, t_end, rtol=1e-10, atol=1e-14, sample_times=sample_times
        )
        norms = [float(np.sqrt(np.sum(y[:n] ** 2) / M)) for _, y in samples]
        measured = measure_growth_rate([t for t, _ in samples], norms)
    return StabilityResult(
        constants=derived_constants(params),
        a=a,
        M=M,
        alpha=[float(x) for x in spectrum.alpha],
        rates=[float(x) for x in spectrum.rates],
        regime=spectrum.regime,
        measured_rate=measured,
    )


def run_consistency(
    cfg: ExperimentConfig, measure: str = "mollified", reference: str = "exact"
) -> analysis.ConsistencyReport:
    """Mesh sweep compared against the exact solution or the finest mesh.

    measure "mollified": conservative runs, averaged fields; "viscous":
    viscous runs, raw fields.
    """
    params = cfg.potential.params()
    if measure not in ("mollified", "viscous"):
        raise AtomChainError(f"unknown consistency measure {measure!r}")
    family = "viscous" if measure == "viscous" else "conservative"
    runs: dict = {}

    def one_mesh(M: int):
        records, events, aborted = _run_family(
            cfg.model_copy(
                update={
                    "raw": family == "conservative",
                    "mollified": measure == "mollified",
                    "viscous": family == "viscous",
                }
            ),
            M,
            family,
            params,
        )
        if aborted or len(records) != len(cfg.times):
            raise IntegrationAbort(f"mesh {M} did not reach all sample times", float("nan"))
        if measure == "mollified":
            return [r.mollified for r in records]
        return [r.snapshot for r in records]

    meshes = sorted(cfg.meshes)
    with ThreadPoolExecutor(max_workers=min(8, len(meshes))) as pool:
        for M, snaps in zip(meshes, pool.map(one_mesh, meshes)):
            runs[M] = snaps
    if reference == "exact":
        ref = riemann.solve_defect(
            cfg.defect.s1, cfg.defect.s2, cfg.defect.delta, params
        )
    elif reference == "finest":
        ref = "finest_mesh"
    else:
        raise AtomChainError(f"unknown reference {reference!r}")
    return analysis.consistency_table(runs, ref, list(cfg.times))
