"""Request/response models of the HTTP service.

Requests reuse the core config models; responses carry arrays as JSON
lists. Floats round-trip exactly through JSON (repr serialization), so a
client re-running a served config reproduces byte-identical files.
"""

from __future__ import annotations

from pydantic import BaseModel

from ..config import DefectConfig, ExperimentConfig, PotentialConfig

__all__ = [
    "ConstantsRequest",
    "ConstantsResponse",
    "StaticRequest",
    "StaticResponse",
    "StabilityRequest",
    "StabilityResponse",
    "RiemannRequest",
    "RiemannResponse",
    "SimulateResponse",
    "ConsistencyRequest",
    "ConsistencyResponse",
    "SnapshotPayload",
    "WavePayload",
    "ExperimentConfig",
]


class ConstantsRequest(BaseModel):
    potential: PotentialConfig = PotentialConfig()


class ConstantsResponse(BaseModel):
    r: float
    c_max: float
    z_cut: float
    theta_min: float


class StaticRequest(BaseModel):
    potential: PotentialConfig = PotentialConfig()
    a: float
    c: float | None = None


class StabilityVerdictPayload(BaseModel):
    classification: str
    witness: list[float] | None = None


class StaticResponse(BaseModel):
    constants: ConstantsResponse
    kind: str
    solution: dict[str, float]
    stability: StabilityVerdictPayload


class StabilityRequest(BaseModel):
    potential: PotentialConfig = PotentialConfig()
    a: float
    M: int = 2
    rho0: float = 1.0
    measure_rate: bool = False
    t_end: float = 8.0


class StabilityResponse(BaseModel):
    constants: ConstantsResponse
    a: float
    M: int
    alpha: list[float]
    rates: list[float]
    regime: str
    measured_rate: float | None = None


class RiemannRequest(BaseModel):
    potential: PotentialConfig = PotentialConfig()
    defect: DefectConfig = DefectConfig()
    times: list[float] = [0.01, 0.02, 0.03, 0.04]
    points: int = 256


class WavePayload(BaseModel):
    kind: str
    center: float
    left: dict[str, float]
    right: dict[str, float]
    speed_lo: float
    speed_hi: float


class SnapshotPayload(BaseModel):
    M: int | None = None
    t: float
    family: str | None = None
    provenance: str
    x: list[float]
    F: list[float]
    v: list[float]
    phi: list[float]
    F_avg: list[float] | None = None
    v_avg: list[float] | None = None
    eps: float | None = None


class RiemannResponse(BaseModel):
    constants: ConstantsResponse
    waves: list[WavePayload]
    middle: dict[str, float] | None
    t0: float
    t_boundary: float | None
    snapshots: list[SnapshotPayload]


class EventPayload(BaseModel):
    kind: str
    M: int
    family: str
    t: float | None = None
    index: int | None = None
    location: float | None = None
    strain: float | None = None
    reason: str | None = None


class SimulateResponse(BaseModel):
    config: ExperimentConfig
    constants: ConstantsResponse
    snapshots: list[SnapshotPayload]
    events: list[EventPayload]
    aborted: bool


class ConsistencyRequest(BaseModel):
    config: ExperimentConfig = ExperimentConfig()
    measure: str = "mollified"  # or "viscous"
    reference: str = "exact"  # or "finest"


class ConsistencyResponse(BaseModel):
    meshes: list[int]
    times: list[float]
    reference: str
    l2: dict[str, list[float]]
    linf: dict[str, list[float]]
    grid: list[float]
    monotone_l2: bool
    meta: dict
