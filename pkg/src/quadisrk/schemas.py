"""Request/response models of the reduction service.

Complex scalars travel as [re, im] pairs; matrices as dense row-major
nested lists, matching the on-disk model JSON format.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

ComplexPair = tuple[float, float]

MethodName = Literal["irka", "isrk", "quad-isrk"]


class ModelPayload(BaseModel):
    n: int
    E: list[list[float]]
    A: list[list[float]]
    B: list[float]
    C: list[float]


class RomPayload(BaseModel):
    n: int
    r: int
    E: list[list[float]]
    A: list[list[float]]
    B: list[float]
    C: list[float]


class QuadraturePayload(BaseModel):
    omega_min: float = 1e-2
    omega_max: float = 1e2
    half_count: int = 200


class SamplePayload(BaseModel):
    s_re: float
    s_im: float
    H_re: float
    H_im: float


class TraceRecordPayload(BaseModel):
    iteration: int
    shifts: list[ComplexPair]
    shift_change: float
    poles: list[ComplexPair]
    oracle_queries: int


class TracePayload(BaseModel):
    status: str
    iterations: int
    records: list[TraceRecordPayload]


class ReduceRequest(BaseModel):
    method: MethodName
    r: int = Field(ge=1)
    tau: float = 1e-4
    max_iter: int = 100
    model: Optional[ModelPayload] = None
    samples: Optional[list[SamplePayload]] = None
    quadrature: Optional[QuadraturePayload] = None
    initial_shifts: Optional[list[ComplexPair]] = None
    orthonormalize: bool = False


class ReduceResponse(BaseModel):
    rom: RomPayload
    trace: TracePayload
    h2_rel: Optional[float] = None
    hinf_rel: Optional[float] = None
    oracle_queries: int = 0


class SweepRequest(BaseModel):
    kind: str
    n: int
    seed: int
    r_list: list[int]
    methods: Optional[list[MethodName]] = None
    quadrature: Optional[QuadraturePayload] = None
    tau: float = 1e-4
    max_iter: int = 100


class SweepRowPayload(BaseModel):
    method: str
    r: int
    h2_rel: float
    hinf_rel: float
    iterations: int
    converged: bool
    oracle_queries: int
    wall_time_s: float


class SweepResponse(BaseModel):
    rows: list[SweepRowPayload]


class ValidateRequest(BaseModel):
    model: ModelPayload


class ValidateResponse(BaseModel):
    valid: bool
    stable: bool
    n: int
    spectral_abscissa: Optional[float] = None
    cond_E: Optional[float] = None
    poles: list[ComplexPair] = []
    messages: list[str] = []


class SampleExportRequest(BaseModel):
    model: ModelPayload
    r: int = Field(ge=1)
    tau: float = 1e-4
    max_iter: int = 100
    quadrature: Optional[QuadraturePayload] = None
    initial_shifts: Optional[list[ComplexPair]] = None


class SampleExportResponse(BaseModel):
    samples: list[SamplePayload]
    backend_queries: int
    iterations: int
    converged: bool


class HealthResponse(BaseModel):
    status: str
    version: str
