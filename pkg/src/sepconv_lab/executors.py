"""Static row-chunked and task-pool execution of row-range work.

Both executors run "bodies": callables taking a half-open row range and
writing only rows inside it. A launch is one fork/join episode. A launch may
carry several phases; every phase runs to completion across all workers
before the next starts, which is how a convolution pass and its copy-back
share one launch without racing. Convolution results are bitwise identical
under every plan because bodies get disjoint ranges and the per-pixel
summation order is fixed.
"""

from __future__ import annotations

import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .conv import (
    Algorithm,
    ConvVariant,
    OpCounter,
    copy_back_rows,
    horizontal_rows_scalar,
    horizontal_rows_vec,
    single_pass_rows_scalar,
    single_pass_rows_vec,
    unrolled5_rows_scalar,
    unrolled5_rows_vec,
    vertical_rows_scalar,
    vertical_rows_vec,
)
from .errors import (
    ExecutionError,
    InvalidArgumentError,
    UnsupportedCombinationError,
    UnsupportedWidthError,
)
from .image import Image, valid_region
from .kernels import SeparableKernel, outer_product

RowBody = Callable[[int, int], None]


def hardware_threads() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Sequential:
    """Run everything on the calling thread (no parallel regions)."""


@dataclass(frozen=True)
class StaticChunked:
    """One near-equal contiguous block per worker, barrier at the end."""

    workers: int

    def __post_init__(self):
        if self.workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class TaskPool:
    """cutoff tasks drained by a fixed worker pool; workers default to core count."""

    workers: int | None = None
    cutoff: int = 100
    agglomerate: bool = False

    def __post_init__(self):
        if self.workers is not None and self.workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {self.workers}")
        if self.cutoff < 1:
            raise InvalidArgumentError(f"cutoff must be >= 1, got {self.cutoff}")

    def effective_workers(self) -> int:
        return self.workers if self.workers is not None else hardware_threads()


ExecPlan = Union[Sequential, StaticChunked, TaskPool]


def make_plan(
    mode: str,
    workers: int | None = None,
    cutoff: int = 100,
    agglomerate: bool = False,
) -> ExecPlan:
    """Build a plan from loosely typed configuration (CLI flags, request bodies).

    Agglomeration belongs to the task pool; asking for it anywhere else is an
    unsupported combination.
    """
    if mode == "sequential":
        if agglomerate:
            raise UnsupportedCombinationError("agglomeration applies to the task pool only")
        return Sequential()
    if mode == "static":
        if agglomerate:
            raise UnsupportedCombinationError("agglomeration applies to the task pool only")
        return StaticChunked(workers=workers if workers is not None else hardware_threads())
    if mode == "taskpool":
        return TaskPool(workers=workers, cutoff=cutoff, agglomerate=agglomerate)
    raise InvalidArgumentError(f"unknown plan mode {mode!r}")


@dataclass
class LaunchStats:
    """Exact event counts and wall time for one or more launches."""

    parallel_region_launches: int = 0
    tasks_spawned: int = 0
    wall_time_ns: int = 0


def partition_block(lo: int, hi: int, index: int, cutoff: int) -> tuple[int, int]:
    """The index-th of `cutoff` contiguous near-equal chunks covering [lo, hi).

    With n = hi - lo, the first n mod cutoff chunks get one extra element, so
    sizes never differ by more than one; when n < cutoff the trailing chunks
    are empty.
    """
    if lo > hi:
        raise InvalidArgumentError(f"range bounds out of order: [{lo}, {hi})")
    if cutoff < 1:
        raise InvalidArgumentError(f"cutoff must be >= 1, got {cutoff}")
    if not 0 <= index < cutoff:
        raise InvalidArgumentError(f"chunk index {index} outside [0, {cutoff})")
    q, s = divmod(hi - lo, cutoff)
    if index < s:
        start = lo + index * (q + 1)
        return start, start + q + 1
    start = lo + s * (q + 1) + (index - s) * q
    return start, start + q


class WorkerPool:
    """A fixed set of worker threads created once and reused across launches.

    static_launch hands block w of the range to worker w, one block per
    worker. queued_launch posts `cutoff` index blocks to a shared queue that
    idle workers drain greedily; each task runs exactly once. Both block the
    caller until every phase has completed (barrier semantics). Body
    exceptions are collected and re-raised as one ExecutionError after all
    workers have stopped.
    """

    def __init__(self, workers: int):
        if workers < 1:
            raise InvalidArgumentError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self._barrier = threading.Barrier(workers + 1)
        self._work: tuple[str, object] | None = None
        self._failures: list[tuple[int, Exception]] = []
        self._failures_lock = threading.Lock()
        self._stop = False
        self._threads = [
            threading.Thread(target=self._worker_loop, args=(w,), daemon=True, name=f"sepconv-w{w}")
            for w in range(workers)
        ]
        for t in self._threads:
            t.start()

    def _worker_loop(self, wid: int) -> None:
        while True:
            self._barrier.wait()  # phase start
            if self._stop:
                return
            mode, payload = self._work
            try:
                if mode == "static":
                    body, blocks = payload
                    lo, hi = blocks[wid]
                    if hi > lo:
                        body(lo, hi)
                else:
                    body, queue = payload
                    while True:
                        try:
                            lo, hi = queue.popleft()
                        except IndexError:
                            break
                        if hi > lo:
                            body(lo, hi)
            except Exception as exc:  # noqa: BLE001 - reported after the phase barrier
                with self._failures_lock:
                    self._failures.append((wid, exc))
            self._barrier.wait()  # phase end

    def _run_phase(self, mode: str, payload) -> None:
        self._work = (mode, payload)
        self._barrier.wait()
        self._barrier.wait()
        if self._failures:
            failures, self._failures = self._failures, []
            raise ExecutionError(failures)

    def static_launch(self, lo: int, hi: int, phases: Sequence[RowBody]) -> None:
        blocks = [partition_block(lo, hi, w, self.workers) for w in range(self.workers)]
        for body in phases:
            self._run_phase("static", (body, blocks))

    def queued_launch(self, lo: int, hi: int, cutoff: int, phases: Sequence[RowBody]) -> int:
        spawned = 0
        for body in phases:
            queue = deque(partition_block(lo, hi, t, cutoff) for t in range(cutoff))
            spawned += cutoff
            self._run_phase("queue", (body, queue))
        return spawned

    def close(self) -> None:
        if self._stop:
            return
        self._stop = True
        self._barrier.wait()
        for t in self._threads:
            t.join()

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def run_static_chunked(
    row_range: tuple[int, int], workers: int, body: RowBody
) -> LaunchStats:
    """One static-chunked launch of `body` over row_range on a fresh pool."""
    lo, hi = row_range
    with WorkerPool(workers) as pool:
        t0 = time.perf_counter_ns()
        pool.static_launch(lo, hi, [body])
        elapsed = time.perf_counter_ns() - t0
    return LaunchStats(parallel_region_launches=1, tasks_spawned=0, wall_time_ns=elapsed)


def run_task_pool(row_range: tuple[int, int], plan: TaskPool, body: RowBody) -> LaunchStats:
    """One task-pool launch of `body` over row_range on a fresh pool."""
    lo, hi = row_range
    with WorkerPool(plan.effective_workers()) as pool:
        t0 = time.perf_counter_ns()
        spawned = pool.queued_launch(lo, hi, plan.cutoff, [body])
        elapsed = time.perf_counter_ns() - t0
    return LaunchStats(parallel_region_launches=1, tasks_spawned=spawned, wall_time_ns=elapsed)


def _split_fused_range(g_lo: int, g_hi: int, rows: int):
    """Decompose a fused (plane, row) index range into per-plane row spans."""
    g = g_lo
    while g < g_hi:
        p, row0 = divmod(g, rows)
        row1 = min(rows, row0 + (g_hi - g))
        yield p, row0, row1
        g = p * rows + row1


def _single_pass_body(variant: ConvVariant, vectorized: bool):
    if variant.algorithm is Algorithm.SINGLE_PASS_GENERIC:
        return single_pass_rows_vec if vectorized else single_pass_rows_scalar
    return unrolled5_rows_vec if vectorized else unrolled5_rows_scalar


def convolve_image(
    image: Image,
    kernel: SeparableKernel,
    variant: ConvVariant,
    plan: ExecPlan,
    *,
    vectorized: bool = True,
    workspace: Image | None = None,
    pool: WorkerPool | None = None,
    counter: OpCounter | None = None,
) -> LaunchStats:
    """Convolve every plane of `image` under an execution plan.

    Single-pass variants write into `workspace` (allocated if not given) and
    optionally copy the valid region back; two-pass uses `workspace` as the
    inter-pass scratch and finishes with the result in `image`. Launch
    accounting: without agglomeration each pass of each plane is one launch
    (copy-back joins its pass's launch as a second phase); with agglomeration
    (task pool only) each pass is one launch over the fused plane x row index
    space. Sequential runs launch nothing. Each phase of a task-pool launch
    spawns `cutoff` tasks.

    Returns the stats; the convolved samples are bitwise identical under
    every plan.
    """
    if variant.algorithm is Algorithm.SINGLE_PASS_UNROLLED5 and kernel.width != 5:
        raise UnsupportedWidthError(f"unrolled variant needs width 5, got {kernel.width}")
    if counter is not None and not isinstance(plan, Sequential):
        raise InvalidArgumentError("operation counters are supported for sequential runs only")

    rows, cols = image.rows, image.cols
    r = kernel.radius
    region = valid_region(rows, cols, r)
    nplanes = image.plane_count
    if workspace is None:
        workspace = Image.zeros(rows, cols, nplanes)
    if workspace.rows != rows or workspace.cols != cols or workspace.plane_count != nplanes:
        raise InvalidArgumentError("workspace must match the image's dimensions")

    two_pass = variant.algorithm is Algorithm.TWO_PASS
    if two_pass:
        hor = horizontal_rows_vec if vectorized else horizontal_rows_scalar
        ver = vertical_rows_vec if vectorized else vertical_rows_scalar
        for scratch in workspace.planes:
            scratch.data[:] = 0.0
    else:
        dense = outer_product(kernel)
        conv_rows = _single_pass_body(variant, vectorized)

    def plane_phases(p: int) -> list[list[RowBody]]:
        """Per-plane launches, each a list of barrier-separated phases."""
        src = image.planes[p]
        dst = workspace.planes[p]
        if two_pass:
            return [
                [lambda lo, hi, s=src, d=dst: hor(s, kernel, d, lo, hi, counter)],
                [lambda lo, hi, s=dst, d=src: ver(s, kernel, d, lo, hi, counter)],
            ]
        phases: list[RowBody] = [
            lambda lo, hi, s=src, d=dst: conv_rows(s, dense, d, lo, hi, counter)
        ]
        if variant.copy_back:
            phases.append(lambda lo, hi, s=dst, d=src: copy_back_rows(s, d, region, lo, hi))
        return [phases]

    def fused_phases() -> list[list[RowBody]]:
        """Whole-image launches over the fused plane x row index space."""

        def fused(per_plane_rows):
            def body(g_lo: int, g_hi: int) -> None:
                for p, row0, row1 in _split_fused_range(g_lo, g_hi, rows):
                    per_plane_rows(p, max(row0, region.row_lo), min(row1, region.row_hi))

            return body

        if two_pass:
            return [
                [fused(lambda p, lo, hi: hor(image.planes[p], kernel, workspace.planes[p], lo, hi, counter))],
                [fused(lambda p, lo, hi: ver(workspace.planes[p], kernel, image.planes[p], lo, hi, counter))],
            ]
        phases: list[RowBody] = [
            fused(lambda p, lo, hi: conv_rows(image.planes[p], dense, workspace.planes[p], lo, hi, counter))
        ]
        if variant.copy_back:
            phases.append(
                fused(lambda p, lo, hi: copy_back_rows(workspace.planes[p], image.planes[p], region, lo, hi))
            )
        return [phases]

    stats = LaunchStats()
    t0 = time.perf_counter_ns()

    if isinstance(plan, Sequential):
        for p in range(nplanes):
            for phases in plane_phases(p):
                for body in phases:
                    body(region.row_lo, region.row_hi)
    elif isinstance(plan, StaticChunked):
        own = pool is None
        active = pool if pool is not None else WorkerPool(plan.workers)
        if active.workers != plan.workers:
            raise InvalidArgumentError(
                f"pool has {active.workers} workers, plan wants {plan.workers}"
            )
        try:
            for p in range(nplanes):
                for phases in plane_phases(p):
                    active.static_launch(region.row_lo, region.row_hi, phases)
                    stats.parallel_region_launches += 1
        finally:
            if own:
                active.close()
    else:
        own = pool is None
        active = pool if pool is not None else WorkerPool(plan.effective_workers())
        if active.workers != plan.effective_workers():
            raise InvalidArgumentError(
                f"pool has {active.workers} workers, plan wants {plan.effective_workers()}"
            )
        try:
            if plan.agglomerate:
                for phases in fused_phases():
                    stats.tasks_spawned += active.queued_launch(0, nplanes * rows, plan.cutoff, phases)
                    stats.parallel_region_launches += 1
            else:
                for p in range(nplanes):
                    for phases in plane_phases(p):
                        stats.tasks_spawned += active.queued_launch(
                            region.row_lo, region.row_hi, plan.cutoff, phases
                        )
                        stats.parallel_region_launches += 1
        finally:
            if own:
                active.close()

    stats.wall_time_ns = time.perf_counter_ns() - t0
    return stats


def result_image(image: Image, workspace: Image, variant: ConvVariant) -> Image:
    """Where the convolved samples live after convolve_image."""
    if variant.algorithm is Algorithm.TWO_PASS or variant.copy_back:
        return image
    return workspace


def empty_task_overhead(plan: TaskPool, launches: int) -> float:
    """Mean wall time (ns) per launch of `cutoff` no-op tasks.

    Measures the fork/join and task distribution cost alone; subtracting it
    from a measured per-image time estimates pure compute time. One unmeasured
    warm-up launch precedes the timed ones.
    """
    if launches < 1:
        raise InvalidArgumentError(f"launches must be >= 1, got {launches}")

    def noop(lo: int, hi: int) -> None:
        return None

    with WorkerPool(plan.effective_workers()) as pool:
        pool.queued_launch(0, plan.cutoff, plan.cutoff, [noop])
        t0 = time.perf_counter_ns()
        for _ in range(launches):
            pool.queued_launch(0, plan.cutoff, plan.cutoff, [noop])
        elapsed = time.perf_counter_ns() - t0
    return elapsed / launches
