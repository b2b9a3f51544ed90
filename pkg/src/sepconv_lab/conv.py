"""Sequential convolution variants, the copy-back step, and operation counts.

Every variant honours one summation contract: kernel terms are folded in
row-major order (kernel row outer, kernel column inner) with left-to-right
float32 additions starting from the first product. The generic and unrolled
single-pass variants are therefore bitwise identical, and any row
partitioning of the output stays bitwise equal to a sequential run because
each output pixel's arithmetic never touches a neighbouring pixel's.

Two backends share these contracts. The vectorised backend evaluates whole
row blocks through contiguous numpy slices (SIMD under the hood); the scalar
backend walks pixels one by one with float32 scalar arithmetic and stands in
for a build with auto-vectorisation disabled. Per pixel both execute the
same operation sequence, so their outputs match bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError, InvalidDimensionError, UnsupportedWidthError
from .image import Plane, ValidRegion, valid_region
from .kernels import DenseKernel, SeparableKernel


class Algorithm(str, Enum):
    SINGLE_PASS_GENERIC = "single-generic"
    SINGLE_PASS_UNROLLED5 = "single-unrolled"
    TWO_PASS = "two-pass"


@dataclass(frozen=True)
class ConvVariant:
    """Algorithm choice plus whether the result is copied back into the source.

    copy_back only means something for the single-pass algorithms; the
    two-pass algorithm always finishes with the result in the source plane,
    so it is normalised to False there.
    """

    algorithm: Algorithm
    copy_back: bool = False

    def __post_init__(self):
        if self.algorithm is Algorithm.TWO_PASS and self.copy_back:
            object.__setattr__(self, "copy_back", False)


@dataclass
class OpCounter:
    """Tally of float multiply and add events from an instrumented run."""

    multiplications: int = 0
    additions: int = 0


@dataclass(frozen=True)
class ArithCount:
    """Closed-form per-plane operation counts for a variant."""

    multiplications: int
    additions: int


def _check_pair(src: Plane, dst: Plane, width: int) -> None:
    if src.rows != dst.rows or src.cols != dst.cols:
        raise InvalidArgumentError(
            f"source and destination dimensions differ: "
            f"({src.rows}, {src.cols}) vs ({dst.rows}, {dst.cols})"
        )
    if np.shares_memory(src.data, dst.data):
        raise InvalidArgumentError("source and destination must be distinct buffers")
    if src.rows < width or src.cols < width:
        raise InvalidDimensionError(
            f"plane {src.rows}x{src.cols} smaller than kernel width {width}"
        )


# ---------------------------------------------------------------------------
# Single-pass bodies. Row ranges are subsets of the valid rows; the column
# span is always the full valid width. Empty ranges are no-ops.

def single_pass_rows_vec(
    src: Plane,
    kernel: DenseKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    if row_hi <= row_lo:
        return
    m = kernel.matrix
    width = kernel.width
    r = kernel.radius
    cols = src.cols
    span = cols - 2 * r
    s = src.data
    acc = None
    for i in range(width):
        for j in range(width):
            term = s[row_lo - r + i : row_hi - r + i, j : j + span] * m[i, j]
            if counter is not None:
                counter.multiplications += term.size
            if acc is None:
                acc = term
            else:
                acc += term
                if counter is not None:
                    counter.additions += term.size
    dst.data[row_lo:row_hi, r : cols - r] = acc


def single_pass_rows_scalar(
    src: Plane,
    kernel: DenseKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    m = kernel.matrix
    width = kernel.width
    r = kernel.radius
    cols = src.cols
    s = src.data
    d = dst.data
    terms = width * width
    for y in range(row_lo, row_hi):
        for x in range(r, cols - r):
            acc = None
            for i in range(width):
                row = s[y + i - r]
                for j in range(width):
                    term = row[x + j - r] * m[i, j]
                    acc = term if acc is None else acc + term
            d[y, x] = acc
        if counter is not None:
            counter.multiplications += terms * (cols - 2 * r)
            counter.additions += (terms - 1) * (cols - 2 * r)


def unrolled5_rows_vec(
    src: Plane,
    kernel: DenseKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    if row_hi <= row_lo:
        return
    m = kernel.matrix
    cols = src.cols
    span = cols - 4
    s = src.data

    def sl(i: int, j: int) -> np.ndarray:
        return s[row_lo - 2 + i : row_hi - 2 + i, j : j + span]

    out = (
        sl(0, 0) * m[0, 0] + sl(0, 1) * m[0, 1] + sl(0, 2) * m[0, 2] + sl(0, 3) * m[0, 3] + sl(0, 4) * m[0, 4]
        + sl(1, 0) * m[1, 0] + sl(1, 1) * m[1, 1] + sl(1, 2) * m[1, 2] + sl(1, 3) * m[1, 3] + sl(1, 4) * m[1, 4]
        + sl(2, 0) * m[2, 0] + sl(2, 1) * m[2, 1] + sl(2, 2) * m[2, 2] + sl(2, 3) * m[2, 3] + sl(2, 4) * m[2, 4]
        + sl(3, 0) * m[3, 0] + sl(3, 1) * m[3, 1] + sl(3, 2) * m[3, 2] + sl(3, 3) * m[3, 3] + sl(3, 4) * m[3, 4]
        + sl(4, 0) * m[4, 0] + sl(4, 1) * m[4, 1] + sl(4, 2) * m[4, 2] + sl(4, 3) * m[4, 3] + sl(4, 4) * m[4, 4]
    )
    dst.data[row_lo:row_hi, 2 : cols - 2] = out
    if counter is not None:
        n = out.size
        counter.multiplications += 25 * n
        counter.additions += 24 * n


def unrolled5_rows_scalar(
    src: Plane,
    kernel: DenseKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    m = kernel.matrix
    m00, m01, m02, m03, m04 = m[0]
    m10, m11, m12, m13, m14 = m[1]
    m20, m21, m22, m23, m24 = m[2]
    m30, m31, m32, m33, m34 = m[3]
    m40, m41, m42, m43, m44 = m[4]
    cols = src.cols
    s = src.data
    d = dst.data
    for y in range(row_lo, row_hi):
        r0, r1, r2, r3, r4 = s[y - 2], s[y - 1], s[y], s[y + 1], s[y + 2]
        for x in range(2, cols - 2):
            d[y, x] = (
                r0[x - 2] * m00 + r0[x - 1] * m01 + r0[x] * m02 + r0[x + 1] * m03 + r0[x + 2] * m04
                + r1[x - 2] * m10 + r1[x - 1] * m11 + r1[x] * m12 + r1[x + 1] * m13 + r1[x + 2] * m14
                + r2[x - 2] * m20 + r2[x - 1] * m21 + r2[x] * m22 + r2[x + 1] * m23 + r2[x + 2] * m24
                + r3[x - 2] * m30 + r3[x - 1] * m31 + r3[x] * m32 + r3[x + 1] * m33 + r3[x + 2] * m34
                + r4[x - 2] * m40 + r4[x - 1] * m41 + r4[x] * m42 + r4[x + 1] * m43 + r4[x + 2] * m44
            )
        if counter is not None:
            counter.multiplications += 25 * (cols - 4)
            counter.additions += 24 * (cols - 4)


# ---------------------------------------------------------------------------
# Two-pass bodies. The horizontal pass reads and writes the same rows, so any
# row range in [0, rows) is legal; the vertical pass reads radius rows either
# side, so its range must stay inside the valid rows.

def horizontal_rows_vec(
    src: Plane,
    kernel: SeparableKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    if row_hi <= row_lo:
        return
    w = kernel.weights
    width = kernel.width
    r = kernel.radius
    cols = src.cols
    span = cols - 2 * r
    s = src.data
    acc = s[row_lo:row_hi, 0:span] * w[0]
    if counter is not None:
        counter.multiplications += acc.size
    for mth in range(1, width):
        term = s[row_lo:row_hi, mth : mth + span] * w[mth]
        acc += term
        if counter is not None:
            counter.multiplications += term.size
            counter.additions += term.size
    dst.data[row_lo:row_hi, r : cols - r] = acc


def horizontal_rows_scalar(
    src: Plane,
    kernel: SeparableKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    w = kernel.weights
    width = kernel.width
    r = kernel.radius
    cols = src.cols
    s = src.data
    d = dst.data
    for y in range(row_lo, row_hi):
        row = s[y]
        for x in range(r, cols - r):
            acc = row[x - r] * w[0]
            for mth in range(1, width):
                acc = acc + row[x - r + mth] * w[mth]
            d[y, x] = acc
        if counter is not None:
            counter.multiplications += width * (cols - 2 * r)
            counter.additions += (width - 1) * (cols - 2 * r)


def vertical_rows_vec(
    src: Plane,
    kernel: SeparableKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    if row_hi <= row_lo:
        return
    w = kernel.weights
    width = kernel.width
    r = kernel.radius
    cols = src.cols
    s = src.data
    acc = s[row_lo - r : row_hi - r, r : cols - r] * w[0]
    if counter is not None:
        counter.multiplications += acc.size
    for mth in range(1, width):
        term = s[row_lo - r + mth : row_hi - r + mth, r : cols - r] * w[mth]
        acc += term
        if counter is not None:
            counter.multiplications += term.size
            counter.additions += term.size
    dst.data[row_lo:row_hi, r : cols - r] = acc


def vertical_rows_scalar(
    src: Plane,
    kernel: SeparableKernel,
    dst: Plane,
    row_lo: int,
    row_hi: int,
    counter: OpCounter | None = None,
) -> None:
    w = kernel.weights
    width = kernel.width
    r = kernel.radius
    cols = src.cols
    s = src.data
    d = dst.data
    for y in range(row_lo, row_hi):
        for x in range(r, cols - r):
            acc = s[y - r, x] * w[0]
            for mth in range(1, width):
                acc = acc + s[y - r + mth, x] * w[mth]
            d[y, x] = acc
        if counter is not None:
            counter.multiplications += width * (cols - 2 * r)
            counter.additions += (width - 1) * (cols - 2 * r)


# ---------------------------------------------------------------------------
# Public whole-plane operations.

def conv_single_pass_generic(
    src: Plane,
    kernel: DenseKernel,
    dst: Plane,
    *,
    vectorized: bool = True,
    counter: OpCounter | None = None,
) -> None:
    """Direct four-loop convolution of the valid region of src into dst.

    dst outside the valid region is left untouched.
    """
    _check_pair(src, dst, kernel.width)
    region = valid_region(src.rows, src.cols, kernel.radius)
    body = single_pass_rows_vec if vectorized else single_pass_rows_scalar
    body(src, kernel, dst, region.row_lo, region.row_hi, counter)


def conv_single_pass_unrolled5(
    src: Plane,
    kernel: DenseKernel,
    dst: Plane,
    *,
    vectorized: bool = True,
    counter: OpCounter | None = None,
) -> None:
    """Single-pass convolution with the 25-term sum written out explicitly.

    Term order matches the generic variant, so outputs are bitwise equal.
    """
    if kernel.width != 5:
        raise UnsupportedWidthError(f"unrolled variant needs width 5, got {kernel.width}")
    _check_pair(src, dst, 5)
    region = valid_region(src.rows, src.cols, 2)
    body = unrolled5_rows_vec if vectorized else unrolled5_rows_scalar
    body(src, kernel, dst, region.row_lo, region.row_hi, counter)


def horizontal_pass(
    src: Plane,
    kernel: SeparableKernel,
    dst: Plane,
    *,
    vectorized: bool = True,
    counter: OpCounter | None = None,
) -> None:
    """1-D convolution along each valid row into dst; dst elsewhere untouched."""
    _check_pair(src, dst, kernel.width)
    region = valid_region(src.rows, src.cols, kernel.radius)
    body = horizontal_rows_vec if vectorized else horizontal_rows_scalar
    body(src, kernel, dst, region.row_lo, region.row_hi, counter)


def vertical_pass(
    src: Plane,
    kernel: SeparableKernel,
    dst: Plane,
    *,
    vectorized: bool = True,
    counter: OpCounter | None = None,
) -> None:
    """1-D convolution along each valid column into dst; dst elsewhere untouched."""
    _check_pair(src, dst, kernel.width)
    region = valid_region(src.rows, src.cols, kernel.radius)
    body = vertical_rows_vec if vectorized else vertical_rows_scalar
    body(src, kernel, dst, region.row_lo, region.row_hi, counter)


def conv_two_pass(
    plane: Plane,
    kernel: SeparableKernel,
    scratch: Plane,
    *,
    vectorized: bool = True,
    counter: OpCounter | None = None,
    extended: bool = False,
) -> None:
    """Horizontal pass into scratch, then vertical pass back into `plane`.

    scratch is zeroed first and the vertical pass starts only after the
    horizontal pass has completed, so the result always lands in `plane`.
    By default the horizontal pass covers only the valid rows, which leaves
    scratch's edge rows zero; the result then agrees with a dense single
    pass on the doubly-interior rows only. extended=True runs the
    horizontal pass over every row instead, widening exact agreement to the
    whole valid region.
    """
    _check_pair(plane, scratch, kernel.width)
    r = kernel.radius
    rows = plane.rows
    scratch.data[:] = 0.0
    hor = horizontal_rows_vec if vectorized else horizontal_rows_scalar
    ver = vertical_rows_vec if vectorized else vertical_rows_scalar
    if extended:
        hor(plane, kernel, scratch, 0, rows, counter)
    else:
        hor(plane, kernel, scratch, r, rows - r, counter)
    ver(scratch, kernel, plane, r, rows - r, counter)


def copy_back(src: Plane, dst: Plane, region: ValidRegion) -> None:
    """Copy `region` of src into dst; dst outside the region is untouched."""
    if src.rows != dst.rows or src.cols != dst.cols:
        raise InvalidArgumentError(
            f"source and destination dimensions differ: "
            f"({src.rows}, {src.cols}) vs ({dst.rows}, {dst.cols})"
        )
    if np.shares_memory(src.data, dst.data):
        raise InvalidArgumentError("source and destination must be distinct buffers")
    if not (
        0 <= region.row_lo <= region.row_hi <= src.rows
        and 0 <= region.col_lo <= region.col_hi <= src.cols
    ):
        raise InvalidArgumentError(f"region {region} out of bounds for {src.rows}x{src.cols}")
    dst.data[region.row_lo : region.row_hi, region.col_lo : region.col_hi] = src.data[
        region.row_lo : region.row_hi, region.col_lo : region.col_hi
    ]


def copy_back_rows(src: Plane, dst: Plane, region: ValidRegion, row_lo: int, row_hi: int) -> None:
    """Row-range slice of copy_back used by parallel copy phases."""
    lo = max(row_lo, region.row_lo)
    hi = min(row_hi, region.row_hi)
    if hi <= lo:
        return
    dst.data[lo:hi, region.col_lo : region.col_hi] = src.data[lo:hi, region.col_lo : region.col_hi]


def doubly_interior_region(rows: int, cols: int, radius: int) -> ValidRegion:
    """Rows whose vertical window reads only rows the horizontal pass wrote."""
    region = ValidRegion(2 * radius, rows - 2 * radius, radius, cols - radius)
    if region.row_lo >= region.row_hi or region.col_lo >= region.col_hi:
        raise InvalidDimensionError(
            f"image {rows}x{cols} has no doubly-interior region for radius {radius}"
        )
    return region


def arith_count(variant: ConvVariant, rows: int, cols: int, width: int) -> ArithCount:
    """Analytic per-plane multiply and add counts for one convolution.

    Single pass does width**2 multiply-accumulates per valid pixel; two-pass
    does 2 * width. Copy-back moves data without arithmetic, so it never
    contributes.
    """
    if rows < width or cols < width:
        raise InvalidDimensionError(f"plane {rows}x{cols} smaller than kernel width {width}")
    r = width // 2
    valid = (rows - 2 * r) * (cols - 2 * r)
    if variant.algorithm is Algorithm.TWO_PASS:
        return ArithCount(multiplications=2 * width * valid, additions=2 * (width - 1) * valid)
    terms = width * width
    return ArithCount(multiplications=terms * valid, additions=(terms - 1) * valid)
