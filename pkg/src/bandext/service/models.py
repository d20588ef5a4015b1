"""Request/response schemas for the HTTP service.

Optional floats use ``None`` rather than NaN so every payload stays
strict-JSON clean; the CLI renders ``None`` back as ``nan`` in CSV cells.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, field_validator

Method = Literal["nd", "wcd"]
Order = Literal["constant", "linear", "quadratic"]


class SolverKnobs(BaseModel):
    method: Method = "wcd"
    order: Order = "quadratic"
    tol: float = Field(1e-12, gt=0)
    max_iters: int = Field(2000, ge=1)
    band_factor: float = Field(2.0, gt=0)
    dtau_override: float | None = Field(None, gt=0)
    minmod_cache: bool = True
    neighbors_only_masks: bool = False


class ExtrapolateRequest(SolverKnobs):
    shape: str
    n: int = Field(ge=4)
    field: str | None = None
    include_fields: bool = True
    timings: bool = False


class GridInfo(BaseModel):
    n: list[int]
    lo: list[float]
    hi: list[float]
    h: list[float]


class ExtrapolateResponse(BaseModel):
    shape: str
    field: str
    method: Method
    order: Order
    grid: GridInfo
    error: float
    iterations_per_stage: list[int]
    stage_names: list[str]
    converged: bool
    degenerate_normals: int
    empty_band: bool
    wall_ms: float
    fields: dict[str, list[float]] | None = None


class ConvergenceRequest(SolverKnobs):
    shape: str
    field: str | None = None
    resolutions: list[int]
    timings: bool = False
    threads: int = Field(1, ge=1)

    @field_validator("resolutions")
    @classmethod
    def _resolutions_rule(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("need at least one resolution")
        if any(n < 32 for n in v):
            raise ValueError("resolutions must be >= 32")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("resolutions must be strictly increasing")
        return v


class ConvergenceRowModel(BaseModel):
    n: int
    h: float
    error: float
    pairwise_order: float | None
    iterations_stage1: int
    iterations_stage2: int
    iterations_stage3: int
    wall_ms: float
    converged: bool


class ConvergenceResponse(BaseModel):
    shape: str
    field: str
    method: Method
    order: Order
    rows: list[ConvergenceRowModel]
    fitted_order: float | None
    all_converged: bool


class SweepDemoRequest(SolverKnobs):
    object_kind: Literal["smooth", "nonsmooth"] = Field("nonsmooth",
                                                       alias="object")
    n: int = Field(128, ge=4)
    factor: float = Field(0.8, gt=0)
    diffusion: float = Field(1.0, gt=0)

    model_config = {"populate_by_name": True}


class SweepStepModel(BaseModel):
    step: int
    t: float
    dt: float
    uncovered: int
    error: float


class SweepDemoResponse(BaseModel):
    object_kind: Literal["smooth", "nonsmooth"]
    method: Method
    order: Order
    n: int
    steps: list[SweepStepModel]
    n_steps_total: int
    trajectory_max_error: float | None


class ShapeInfo(BaseModel):
    key: str
    dim: int
    description: str


class HealthResponse(BaseModel):
    status: str
    version: str
