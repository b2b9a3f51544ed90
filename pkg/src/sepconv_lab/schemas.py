"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from .executors import ExecPlan, make_plan
from .kernels import SeparableKernel, gaussian5


class HealthResponse(BaseModel):
    status: str
    hardware_threads: int


class SyntheticSpec(BaseModel):
    """Deterministic input description: dims and seed fully define the samples."""

    rows: int = Field(ge=5)
    cols: int = Field(ge=5)
    planes: int = Field(default=3, ge=1)
    seed: int = 42


class ImageSource(BaseModel):
    """Exactly one of: a synthetic description or a base64-encoded binary PPM."""

    synthetic: Optional[SyntheticSpec] = None
    ppm_base64: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.synthetic is None) == (self.ppm_base64 is None):
            raise ValueError("provide exactly one of synthetic or ppm_base64")
        return self


class KernelSpec(BaseModel):
    """Named kernel or explicit odd-width weight list, used verbatim."""

    name: Optional[Literal["gaussian5"]] = None
    weights: Optional[list[float]] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.name is None) == (self.weights is None):
            raise ValueError("provide exactly one of name or weights")
        return self

    def to_kernel(self) -> SeparableKernel:
        if self.name == "gaussian5":
            return gaussian5()
        return SeparableKernel(self.weights)


class PlanSpec(BaseModel):
    mode: Literal["sequential", "static", "taskpool"] = "sequential"
    workers: Optional[int] = Field(default=None, ge=1)
    cutoff: int = Field(default=100, ge=1)
    agglomerate: bool = False

    def to_plan(self) -> ExecPlan:
        return make_plan(self.mode, self.workers, self.cutoff, self.agglomerate)


class LaunchStatsModel(BaseModel):
    parallel_region_launches: int
    tasks_spawned: int
    wall_time_ns: int


class ConvolveRequest(BaseModel):
    image: ImageSource
    kernel: KernelSpec = KernelSpec(name="gaussian5")
    algorithm: Literal["single-generic", "single-unrolled", "two-pass"] = "two-pass"
    copy_back: bool = True
    vectorized: bool = True
    plan: PlanSpec = PlanSpec()
    return_image: bool = False


class ConvolveResponse(BaseModel):
    rows: int
    cols: int
    planes: int
    stats: LaunchStatsModel
    result_ppm_base64: Optional[str] = None


class GenerateRequest(SyntheticSpec):
    pass


class GenerateResponse(BaseModel):
    rows: int
    cols: int
    planes: int
    ppm_base64: str


class LadderRequest(BaseModel):
    sizes: list[tuple[int, int]] = Field(min_length=1)
    planes: int = Field(default=3, ge=1)
    seed: int = 42
    reps: int = Field(default=1000, ge=1)
    workers: int = Field(default=100, ge=1)
    cutoff: int = Field(default=100, ge=1)
    stages: Optional[list[str]] = None


class BenchRecordModel(BaseModel):
    label: str
    algorithm: str
    copy_back: bool
    plan: str
    workers: int
    cutoff: Optional[int] = None
    agglomerate: Optional[bool] = None
    rows: int
    cols: int
    planes: int
    reps: int
    total_ns: int
    per_image_ns: int
    speedup: Optional[float] = None
    build_vectorized: bool


class StageFailureModel(BaseModel):
    label: str
    rows: int
    cols: int
    detail: str


class LadderResponse(BaseModel):
    records: list[BenchRecordModel]
    failures: list[StageFailureModel]
    csv: str


class OverheadRequest(BaseModel):
    workers: Optional[int] = Field(default=None, ge=1)
    cutoff: int = Field(default=100, ge=1)
    launches: int = Field(default=100, ge=1)


class OverheadResponse(BaseModel):
    per_launch_ns: float
    launches: int
    cutoff: int
    workers: int
