"""FastAPI service wrapping the convolution laboratory.

Meant to run on the bench machine itself (timing happens in process, never
across the wire). Start with:

    uvicorn sepconv_lab.service:app
"""

from __future__ import annotations

import base64
import io

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .bench import LadderConfig, emit_csv, plan_summary, run_ladder
from .conv import Algorithm, ConvVariant
from .errors import PpmParseError, SepconvError
from .executors import (
    TaskPool,
    convolve_image,
    empty_task_overhead,
    hardware_threads,
    result_image,
)
from .image import Image, make_synthetic
from .ppm import read_ppm_bytes, write_ppm_bytes
from .schemas import (
    BenchRecordModel,
    ConvolveRequest,
    ConvolveResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    ImageSource,
    LadderRequest,
    LadderResponse,
    LaunchStatsModel,
    OverheadRequest,
    OverheadResponse,
    StageFailureModel,
)

app = FastAPI(title="sepconv-lab", version=__version__)


@app.exception_handler(SepconvError)
async def _domain_error(request: Request, exc: SepconvError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


def _load_image(source: ImageSource) -> Image:
    if source.synthetic is not None:
        synth = source.synthetic
        return make_synthetic(synth.rows, synth.cols, synth.planes, synth.seed)
    try:
        raw = base64.b64decode(source.ppm_base64, validate=True)
    except Exception as exc:
        raise PpmParseError(f"invalid base64 payload: {exc}", 0) from None
    return read_ppm_bytes(raw)


def _record_model(rec) -> BenchRecordModel:
    mode, workers, cutoff, agglomerate = plan_summary(rec.plan)
    return BenchRecordModel(
        label=rec.label,
        algorithm=rec.variant.algorithm.value,
        copy_back=rec.variant.copy_back,
        plan=mode,
        workers=workers,
        cutoff=cutoff,
        agglomerate=agglomerate,
        rows=rec.rows,
        cols=rec.cols,
        planes=rec.planes,
        reps=rec.reps,
        total_ns=rec.total_ns,
        per_image_ns=rec.per_image_ns,
        speedup=rec.speedup,
        build_vectorized=rec.build_vectorized,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", hardware_threads=hardware_threads())


@app.post("/images/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest) -> GenerateResponse:
    image = make_synthetic(req.rows, req.cols, req.planes, req.seed)
    payload = base64.b64encode(write_ppm_bytes(image)).decode("ascii")
    return GenerateResponse(rows=req.rows, cols=req.cols, planes=req.planes, ppm_base64=payload)


@app.post("/convolve", response_model=ConvolveResponse)
def convolve(req: ConvolveRequest) -> ConvolveResponse:
    image = _load_image(req.image)
    kernel = req.kernel.to_kernel()
    variant = ConvVariant(Algorithm(req.algorithm), copy_back=req.copy_back)
    plan = req.plan.to_plan()
    workspace = Image.zeros_like(image)
    stats = convolve_image(
        image, kernel, variant, plan, vectorized=req.vectorized, workspace=workspace
    )
    encoded = None
    if req.return_image:
        out = result_image(image, workspace, variant)
        encoded = base64.b64encode(write_ppm_bytes(out)).decode("ascii")
    return ConvolveResponse(
        rows=image.rows,
        cols=image.cols,
        planes=image.plane_count,
        stats=LaunchStatsModel(
            parallel_region_launches=stats.parallel_region_launches,
            tasks_spawned=stats.tasks_spawned,
            wall_time_ns=stats.wall_time_ns,
        ),
        result_ppm_base64=encoded,
    )


@app.post("/bench/ladder", response_model=LadderResponse)
def ladder(req: LadderRequest) -> LadderResponse:
    config = LadderConfig(
        sizes=tuple((r, c) for r, c in req.sizes),
        planes=req.planes,
        seed=req.seed,
        reps=req.reps,
        workers=req.workers,
        cutoff=req.cutoff,
        stages=tuple(req.stages) if req.stages is not None else None,
    )
    result = run_ladder(config)
    buffer = io.StringIO()
    emit_csv(result.records, buffer)
    return LadderResponse(
        records=[_record_model(rec) for rec in result.records],
        failures=[
            StageFailureModel(label=f.label, rows=f.rows, cols=f.cols, detail=f.detail)
            for f in result.failures
        ],
        csv=buffer.getvalue(),
    )


@app.post("/bench/overhead", response_model=OverheadResponse)
def overhead(req: OverheadRequest) -> OverheadResponse:
    plan = TaskPool(workers=req.workers, cutoff=req.cutoff)
    per_launch = empty_task_overhead(plan, req.launches)
    return OverheadResponse(
        per_launch_ns=per_launch,
        launches=req.launches,
        cutoff=req.cutoff,
        workers=plan.effective_workers(),
    )
