"""Benchmark harness: the optimisation ladder, timing, speedups, and CSV.

The ladder walks the same image through every variant of the package, from
the naive scalar single pass (Opt-0, the baseline) to parallel vectorised
stages, timing a reps-loop around the whole multi-plane convolution exactly
once per stage and size. Before a stage is timed its output is checked
against the naive dense convolution; a stage that fails the check is never
timed and is reported as a failure instead of a record.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .conv import (
    Algorithm,
    ConvVariant,
    conv_single_pass_generic,
    doubly_interior_region,
)
from .errors import ConfigError, InvalidArgumentError
from .executors import (
    ExecPlan,
    Sequential,
    StaticChunked,
    TaskPool,
    WorkerPool,
    convolve_image,
    result_image,
)
from .image import Image, make_synthetic, valid_region
from .kernels import SeparableKernel, gaussian5, outer_product

# Cross-algorithm agreement bounds: two-pass reassociates the 25-term sum,
# so only the single-pass variants are compared bitwise.
REL_TOL = 1e-4
ABS_TOL = 1e-5

BASELINE_LABEL = "Opt-0"


@dataclass
class BenchRecord:
    """One ladder measurement."""

    label: str
    variant: ConvVariant
    plan: ExecPlan
    rows: int
    cols: int
    planes: int
    reps: int
    total_ns: int
    per_image_ns: int
    speedup: float | None = None
    build_vectorized: bool = True


@dataclass(frozen=True)
class StageFailure:
    """A ladder stage whose output failed the correctness check."""

    label: str
    rows: int
    cols: int
    detail: str


@dataclass
class LadderResult:
    records: list[BenchRecord] = field(default_factory=list)
    failures: list[StageFailure] = field(default_factory=list)


@dataclass(frozen=True)
class LadderConfig:
    """What to run: image sizes, repetitions, and parallel knobs."""

    sizes: tuple[tuple[int, int], ...]
    planes: int = 3
    seed: int = 42
    reps: int = 1000
    workers: int = 100
    cutoff: int = 100
    stages: tuple[str, ...] | None = None  # None runs the full ladder

    def __post_init__(self):
        if not self.sizes:
            raise ConfigError("ladder needs at least one image size")
        if self.reps < 1 or self.workers < 1 or self.cutoff < 1 or self.planes < 1:
            raise ConfigError("reps, workers, cutoff, and planes must all be >= 1")


# label -> (algorithm, copy_back, plan kind, vectorized)
_GENERIC = Algorithm.SINGLE_PASS_GENERIC
_UNROLLED = Algorithm.SINGLE_PASS_UNROLLED5
_TWO_PASS = Algorithm.TWO_PASS

LADDER_STAGES: tuple[tuple[str, Algorithm, bool, str, bool], ...] = (
    ("Opt-0", _GENERIC, True, "seq", False),
    ("Opt-1", _UNROLLED, True, "seq", False),
    ("Opt-2", _UNROLLED, True, "seq", True),
    ("Opt-3", _TWO_PASS, False, "seq", False),
    ("Opt-4", _TWO_PASS, False, "seq", True),
    ("Par-1", _UNROLLED, True, "static", False),
    ("Par-2", _UNROLLED, True, "static", True),
    ("Par-3", _TWO_PASS, False, "static", False),
    ("Par-4", _TWO_PASS, False, "static", True),
    ("Par-5", _UNROLLED, False, "taskpool-agg", False),
    ("Par-6", _UNROLLED, False, "taskpool-agg", True),
    ("Opt-1-nocopy", _UNROLLED, False, "seq", False),
    ("Opt-2-nocopy", _UNROLLED, False, "seq", True),
    ("Par-2-nocopy", _UNROLLED, False, "static", True),
)

_STAGE_ORDER = {stage[0]: i for i, stage in enumerate(LADDER_STAGES)}


def _stage_plan(kind: str, config: LadderConfig) -> ExecPlan:
    if kind == "seq":
        return Sequential()
    if kind == "static":
        return StaticChunked(workers=config.workers)
    if kind == "taskpool-agg":
        return TaskPool(workers=config.workers, cutoff=config.cutoff, agglomerate=True)
    raise ConfigError(f"unknown stage plan kind {kind!r}")


def time_variant(
    image: Image,
    kernel: SeparableKernel,
    variant: ConvVariant,
    plan: ExecPlan,
    reps: int,
    *,
    vectorized: bool = True,
    label: str = "custom",
) -> BenchRecord:
    """Time `reps` full multi-plane convolutions on the same buffers.

    One warm-up convolution runs untimed first; the timer then wraps the
    whole reps loop and per-image time is total divided by reps.
    """
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    workspace = Image.zeros_like(image)
    pool = None
    if isinstance(plan, StaticChunked):
        pool = WorkerPool(plan.workers)
    elif isinstance(plan, TaskPool):
        pool = WorkerPool(plan.effective_workers())
    try:
        convolve_image(image, kernel, variant, plan, vectorized=vectorized,
                       workspace=workspace, pool=pool)
        t0 = time.perf_counter_ns()
        for _ in range(reps):
            convolve_image(image, kernel, variant, plan, vectorized=vectorized,
                           workspace=workspace, pool=pool)
        total = time.perf_counter_ns() - t0
    finally:
        if pool is not None:
            pool.close()
    return BenchRecord(
        label=label,
        variant=variant,
        plan=plan,
        rows=image.rows,
        cols=image.cols,
        planes=image.plane_count,
        reps=reps,
        total_ns=total,
        per_image_ns=max(1, round(total / reps)),
        build_vectorized=vectorized,
    )


def check_stage_output(
    image: Image,
    kernel: SeparableKernel,
    variant: ConvVariant,
    plan: ExecPlan,
    vectorized: bool,
) -> str | None:
    """Compare one convolution against the naive dense reference.

    Returns None when the outputs agree (bitwise for single-pass variants,
    within REL_TOL/ABS_TOL on the doubly-interior region for two-pass), else
    a human-readable discrepancy description.
    """
    dense = outer_product(kernel)
    reference = Image.zeros_like(image)
    for p in range(image.plane_count):
        conv_single_pass_generic(image.planes[p], dense, reference.planes[p])

    work = image.copy()
    workspace = Image.zeros_like(image)
    convolve_image(work, kernel, variant, plan, vectorized=vectorized, workspace=workspace)
    out = result_image(work, workspace, variant)

    r = kernel.radius
    if variant.algorithm is Algorithm.TWO_PASS:
        region = doubly_interior_region(image.rows, image.cols, r)
        for p in range(image.plane_count):
            got = out.planes[p].data[region.row_lo : region.row_hi, region.col_lo : region.col_hi]
            want = reference.planes[p].data[
                region.row_lo : region.row_hi, region.col_lo : region.col_hi
            ]
            err = np.abs(got.astype(np.float64) - want.astype(np.float64))
            bound = ABS_TOL + REL_TOL * np.abs(want.astype(np.float64))
            if not np.all(err <= bound):
                return f"plane {p}: max deviation {float(err.max()):.3e} beyond tolerance"
        return None
    region = valid_region(image.rows, image.cols, r)
    for p in range(image.plane_count):
        got = out.planes[p].data[region.row_lo : region.row_hi, region.col_lo : region.col_hi]
        want = reference.planes[p].data[region.row_lo : region.row_hi, region.col_lo : region.col_hi]
        if not np.array_equal(got, want):
            return f"plane {p}: output not bitwise equal to the dense reference"
    return None


def run_ladder(config: LadderConfig) -> LadderResult:
    """Run every configured stage on every configured size.

    Records come out in ladder order, sizes ascending within a stage.
    Stages whose correctness check fails are skipped and reported in
    `failures`.
    """
    stage_names = config.stages if config.stages is not None else tuple(s[0] for s in LADDER_STAGES)
    unknown = [name for name in stage_names if name not in _STAGE_ORDER]
    if unknown:
        raise ConfigError(f"unknown ladder stage(s): {', '.join(unknown)}")
    by_name = {s[0]: s for s in LADDER_STAGES}
    kernel = gaussian5()
    sizes = sorted(config.sizes, key=lambda rc: (rc[0] * rc[1], rc))

    result = LadderResult()
    for name in stage_names:
        label, algorithm, copy, kind, vectorized = by_name[name]
        variant = ConvVariant(algorithm, copy_back=copy)
        plan = _stage_plan(kind, config)
        for rows, cols in sizes:
            image = make_synthetic(rows, cols, config.planes, config.seed)
            problem = check_stage_output(image, kernel, variant, plan, vectorized)
            if problem is not None:
                result.failures.append(StageFailure(label, rows, cols, problem))
                continue
            record = time_variant(
                image, kernel, variant, plan, config.reps, vectorized=vectorized, label=label
            )
            result.records.append(record)
    if any(rec.label == BASELINE_LABEL for rec in result.records):
        result.records = speedup_table(result.records, BASELINE_LABEL)
    return result


def speedup_table(records: Sequence[BenchRecord], baseline_label: str) -> list[BenchRecord]:
    """Fill each record's speedup against the baseline at the same image size."""
    baselines: dict[tuple[int, int, int], int] = {}
    for rec in records:
        if rec.label == baseline_label:
            baselines[(rec.rows, rec.cols, rec.planes)] = rec.per_image_ns
    if not baselines:
        raise ConfigError(f"baseline stage {baseline_label!r} missing from records")
    out = []
    for rec in records:
        base = baselines.get((rec.rows, rec.cols, rec.planes))
        out.append(replace(rec, speedup=None if base is None else base / rec.per_image_ns))
    return out


def overhead_adjusted(record: BenchRecord, overhead_per_image_ns: int) -> int:
    """Per-image time minus the measured launch overhead (pure compute time)."""
    if overhead_per_image_ns < 0:
        raise InvalidArgumentError("overhead cannot be negative")
    if overhead_per_image_ns > record.per_image_ns:
        raise InvalidArgumentError(
            f"overhead {overhead_per_image_ns} ns exceeds per-image time {record.per_image_ns} ns"
        )
    return record.per_image_ns - overhead_per_image_ns


CSV_HEADER = (
    "label,algorithm,copy_back,plan,workers,cutoff,agglomerate,"
    "rows,cols,planes,reps,total_ns,per_image_ns,speedup,build_vectorized"
)


def plan_summary(plan: ExecPlan) -> tuple[str, int, int | None, bool | None]:
    """(mode, workers, cutoff, agglomerate) with None for fields a mode lacks."""
    if isinstance(plan, Sequential):
        return "sequential", 1, None, None
    if isinstance(plan, StaticChunked):
        return "static", plan.workers, None, None
    return "taskpool", plan.effective_workers(), plan.cutoff, plan.agglomerate


def _bool_cell(value: bool | None) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def _record_row(rec: BenchRecord) -> str:
    mode, workers, cutoff, agglomerate = plan_summary(rec.plan)
    speedup = "" if rec.speedup is None else f"{rec.speedup:.4f}"
    return ",".join(
        [
            rec.label,
            rec.variant.algorithm.value,
            _bool_cell(rec.variant.copy_back),
            mode,
            str(workers),
            "" if cutoff is None else str(cutoff),
            _bool_cell(agglomerate),
            str(rec.rows),
            str(rec.cols),
            str(rec.planes),
            str(rec.reps),
            str(rec.total_ns),
            str(rec.per_image_ns),
            speedup,
            _bool_cell(rec.build_vectorized),
        ]
    )


def emit_csv(records: Sequence[BenchRecord], sink: str | Path | IO[str]) -> None:
    """Write records as CSV: ladder order first, then size ascending.

    Identical records produce byte-identical output.
    """
    ordered = sorted(
        records,
        key=lambda r: (
            _STAGE_ORDER.get(r.label, len(_STAGE_ORDER)),
            r.label,
            r.rows * r.cols,
            r.rows,
            r.cols,
            r.planes,
        ),
    )
    lines = [CSV_HEADER] + [_record_row(r) for r in ordered]
    text = "\n".join(lines) + "\n"
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text, encoding="ascii")
    else:
        sink.write(text)
