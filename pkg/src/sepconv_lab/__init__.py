"""Separable 2D image convolution performance laboratory.

A library plus benchmark harness for the classic blur-kernel optimisation
ladder: naive single pass, hand-unrolled, separable two-pass, and the same
variants under two parallel execution models (static row chunking and a
cutoff-driven task pool with optional plane agglomeration). A FastAPI
service and a CLI expose the same operations.
"""

__version__ = "0.1.0"

from .bench import (
    BenchRecord,
    LadderConfig,
    LadderResult,
    emit_csv,
    overhead_adjusted,
    run_ladder,
    speedup_table,
    time_variant,
)
from .conv import (
    Algorithm,
    ArithCount,
    ConvVariant,
    OpCounter,
    arith_count,
    conv_single_pass_generic,
    conv_single_pass_unrolled5,
    conv_two_pass,
    copy_back,
    doubly_interior_region,
    horizontal_pass,
    vertical_pass,
)
from .errors import (
    ConfigError,
    ExecutionError,
    InvalidArgumentError,
    InvalidDimensionError,
    PpmParseError,
    SepconvError,
    UnsupportedCombinationError,
    UnsupportedWidthError,
)
from .executors import (
    ExecPlan,
    LaunchStats,
    Sequential,
    StaticChunked,
    TaskPool,
    WorkerPool,
    convolve_image,
    empty_task_overhead,
    make_plan,
    partition_block,
    result_image,
    run_static_chunked,
    run_task_pool,
)
from .image import (
    Image,
    Plane,
    ValidRegion,
    flatten,
    make_synthetic,
    max_abs_diff,
    splitmix64,
    unflatten,
    valid_region,
)
from .kernels import DenseKernel, SeparableKernel, delta, gaussian5, outer_product
from .ppm import read_ppm, read_ppm_bytes, write_ppm, write_ppm_bytes

__all__ = [
    "Algorithm",
    "ArithCount",
    "BenchRecord",
    "ConfigError",
    "ConvVariant",
    "DenseKernel",
    "ExecPlan",
    "ExecutionError",
    "Image",
    "InvalidArgumentError",
    "InvalidDimensionError",
    "LadderConfig",
    "LadderResult",
    "LaunchStats",
    "OpCounter",
    "Plane",
    "PpmParseError",
    "SeparableKernel",
    "SepconvError",
    "Sequential",
    "StaticChunked",
    "TaskPool",
    "UnsupportedCombinationError",
    "UnsupportedWidthError",
    "ValidRegion",
    "WorkerPool",
    "arith_count",
    "conv_single_pass_generic",
    "conv_single_pass_unrolled5",
    "conv_two_pass",
    "convolve_image",
    "copy_back",
    "delta",
    "doubly_interior_region",
    "emit_csv",
    "empty_task_overhead",
    "flatten",
    "gaussian5",
    "make_plan",
    "make_synthetic",
    "max_abs_diff",
    "outer_product",
    "overhead_adjusted",
    "partition_block",
    "read_ppm",
    "read_ppm_bytes",
    "result_image",
    "run_ladder",
    "run_static_chunked",
    "run_task_pool",
    "speedup_table",
    "splitmix64",
    "time_variant",
    "unflatten",
    "valid_region",
    "write_ppm",
    "write_ppm_bytes",
]
