"""HTTP service wrapping the core package.

Thin handlers: validate the request model, call the experiment runner,
shape the response model. Domain errors map to 422 (bad physics inputs),
horizon/structure errors to 409, numerical aborts to 500 with diagnostics.
The CLI calls these handlers in-process by default.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import experiments
from ..errors import AtomChainError, ConfigError, DomainError, HorizonError, IntegrationAbort
from . import models


def _constants(d: dict) -> models.ConstantsResponse:
    return models.ConstantsResponse(**d)


def _snapshot_payload(snap, M=None, family=None, mollified=None) -> models.SnapshotPayload:
    return models.SnapshotPayload(
        M=M if M is not None else snap.meta.get("M"),
        t=snap.t,
        family=family,
        provenance=snap.provenance,
        x=snap.x.tolist(),
        F=snap.F.tolist(),
        v=snap.v.tolist(),
        phi=snap.phi.tolist(),
        F_avg=None if mollified is None else mollified.F.tolist(),
        v_avg=None if mollified is None else mollified.v.tolist(),
        eps=None if mollified is None else mollified.meta.get("eps"),
    )


def handle_constants(req: models.ConstantsRequest) -> models.ConstantsResponse:
    return _constants(experiments.derived_constants(req.potential.params()))


def handle_static(req: models.StaticRequest) -> models.StaticResponse:
    res = experiments.run_static(req.a, req.c, req.potential.params())
    return models.StaticResponse(
        constants=_constants(res.constants),
        kind=res.kind,
        solution=res.solution,
        stability=models.StabilityVerdictPayload(**res.stability),
    )


def handle_stability(req: models.StabilityRequest) -> models.StabilityResponse:
    res = experiments.run_stability(
        req.a, req.M, req.rho0, req.measure_rate, req.t_end, req.potential.params()
    )
    return models.StabilityResponse(
        constants=_constants(res.constants),
        a=res.a,
        M=res.M,
        alpha=res.alpha,
        rates=res.rates,
        regime=res.regime,
        measured_rate=res.measured_rate,
    )


def handle_riemann(req: models.RiemannRequest) -> models.RiemannResponse:
    res = experiments.run_riemann(
        req.defect.s1,
        req.defect.s2,
        req.defect.delta,
        req.times,
        req.points,
        req.potential.params(),
    )
    return models.RiemannResponse(
        constants=_constants(res.constants),
        waves=[models.WavePayload(**w) for w in res.waves],
        middle=res.middle,
        t0=res.t0,
        t_boundary=res.t_boundary,
        snapshots=[_snapshot_payload(s) for s in res.snapshots],
    )


def handle_simulate(cfg: models.ExperimentConfig) -> models.SimulateResponse:
    res = experiments.run_simulation(cfg)
    return models.SimulateResponse(
        config=res.config,
        constants=_constants(res.constants),
        snapshots=[
            _snapshot_payload(r.snapshot, M=r.M, family=r.family, mollified=r.mollified)
            for r in res.records
        ],
        events=[models.EventPayload(**e) for e in res.events],
        aborted=res.aborted,
    )


def handle_consistency(req: models.ConsistencyRequest) -> models.ConsistencyResponse:
    rep = experiments.run_consistency(req.config, req.measure, req.reference)
    return models.ConsistencyResponse(
        meshes=list(rep.meshes),
        times=list(rep.times),
        reference=rep.reference,
        l2={str(M): rep.l2[M] for M in rep.meshes},
        linf={str(M): rep.linf[M] for M in rep.meshes},
        grid=rep.grid.tolist(),
        monotone_l2=rep.monotone_l2,
        meta=rep.meta,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="atomchain",
        description="Lennard-Jones chain dynamics, coarse-grained runs and exact wave fans",
        version="0.1.0",
    )

    @app.exception_handler(AtomChainError)
    async def _domain_error(request, exc: AtomChainError):
        if isinstance(exc, (ConfigError,)):
            status = 422
        elif isinstance(exc, (HorizonError,)):
            status = 409
        elif isinstance(exc, IntegrationAbort):
            status = 500
        elif isinstance(exc, (DomainError, ValueError)):
            status = 422
        else:
            status = 500
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": "0.1.0"}

    app.post("/constants", response_model=models.ConstantsResponse)(handle_constants)
    app.post("/static", response_model=models.StaticResponse)(handle_static)
    app.post("/stability", response_model=models.StabilityResponse)(handle_stability)
    app.post("/riemann", response_model=models.RiemannResponse)(handle_riemann)
    app.post("/simulate", response_model=models.SimulateResponse)(handle_simulate)
    app.post("/consistency", response_model=models.ConsistencyResponse)(handle_consistency)
    return app


app = create_app()
