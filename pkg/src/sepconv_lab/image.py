"""Planes, images, deterministic synthetic inputs, and comparison helpers.

A plane is a rows x cols grid of float32 samples stored row-major with unit
column stride, so inner loops over columns touch contiguous memory. An image
is an ordered list of equally sized planes (3 by default). Pixel intensities
conventionally live in [0, 256) but any real value is allowed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidDimensionError

# Width-5 kernels are the supported baseline; synthetic inputs must fit one.
MIN_SYNTHETIC_DIM = 5

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64_MASK = (1 << 64) - 1


class Plane:
    """One colour plane: a C-contiguous float32 matrix."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise InvalidArgumentError(f"plane data must be 2-D, got {arr.ndim}-D")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidDimensionError(f"plane dimensions must be positive, got {arr.shape}")
        if arr.dtype != np.float32 or not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr, dtype=np.float32)
        self.data = arr

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Plane":
        return cls(np.zeros((rows, cols), dtype=np.float32))

    @classmethod
    def full(cls, rows: int, cols: int, value: float) -> "Plane":
        return cls(np.full((rows, cols), value, dtype=np.float32))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def copy(self) -> "Plane":
        return Plane(self.data.copy())


class Image:
    """Ordered list of planes that all share one (rows, cols) shape."""

    __slots__ = ("planes",)

    def __init__(self, planes: list[Plane]):
        if not planes:
            raise InvalidArgumentError("an image needs at least one plane")
        rows, cols = planes[0].rows, planes[0].cols
        for p in planes[1:]:
            if p.rows != rows or p.cols != cols:
                raise InvalidArgumentError(
                    f"plane dimensions differ: ({rows}, {cols}) vs ({p.rows}, {p.cols})"
                )
        self.planes = list(planes)

    @classmethod
    def zeros(cls, rows: int, cols: int, planes: int = 3) -> "Image":
        return cls([Plane.zeros(rows, cols) for _ in range(planes)])

    @classmethod
    def zeros_like(cls, other: "Image") -> "Image":
        return cls.zeros(other.rows, other.cols, other.plane_count)

    @property
    def rows(self) -> int:
        return self.planes[0].rows

    @property
    def cols(self) -> int:
        return self.planes[0].cols

    @property
    def plane_count(self) -> int:
        return len(self.planes)

    def copy(self) -> "Image":
        return Image([p.copy() for p in self.planes])


@dataclass(frozen=True)
class ValidRegion:
    """Half-open bounds of the pixels whose full kernel window is in bounds."""

    row_lo: int
    row_hi: int
    col_lo: int
    col_hi: int


def valid_region(rows: int, cols: int, radius: int) -> ValidRegion:
    """Interior region left after trimming `radius` pixels from every edge."""
    region = ValidRegion(radius, rows - radius, radius, cols - radius)
    if region.row_lo >= region.row_hi or region.col_lo >= region.col_hi:
        raise InvalidDimensionError(
            f"image {rows}x{cols} too small for kernel radius {radius}"
        )
    return region


def flatten(cols: int, i: int, j: int) -> int:
    """Flat row-major offset of element (i, j)."""
    return i * cols + j


def unflatten(cols: int, offset: int) -> tuple[int, int]:
    """Inverse of flatten: (i, j) of a flat row-major offset."""
    return divmod(offset, cols)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First `count` outputs of the splitmix64 stream seeded with `seed`.

    The stream state advances by a fixed odd constant per draw, so the whole
    sequence vectorises: output n mixes seed + (n + 1) * gamma mod 2**64.
    """
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & _U64_MASK) + idx * _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def make_synthetic(rows: int, cols: int, planes: int = 3, seed: int = 0) -> Image:
    """Deterministic pseudo-random image: same (dims, seed), same bits.

    Samples come from one splitmix64 stream: the top 24 bits of each draw
    scaled by 2**-16, which lands exactly on a float32 in [0, 256). Plane 0
    fills first, row-major, then plane 1, and so on.
    """
    if rows < MIN_SYNTHETIC_DIM or cols < MIN_SYNTHETIC_DIM:
        raise InvalidDimensionError(
            f"synthetic images must be at least {MIN_SYNTHETIC_DIM}x{MIN_SYNTHETIC_DIM}, "
            f"got {rows}x{cols}"
        )
    if planes < 1:
        raise InvalidArgumentError(f"plane count must be >= 1, got {planes}")
    draws = splitmix64(seed, rows * cols * planes)
    # (x >> 40) has 24 bits; * 2**-16 is exact in both float64 and float32.
    samples = ((draws >> np.uint64(40)).astype(np.float64) * 2.0**-16).astype(np.float32)
    stacked = samples.reshape(planes, rows, cols)
    return Image([Plane(stacked[p].copy()) for p in range(planes)])


def max_abs_diff(a: Plane, b: Plane, region: ValidRegion) -> float:
    """Largest |a - b| over `region`; zero iff the samples there are equal."""
    if a.rows != b.rows or a.cols != b.cols:
        raise InvalidArgumentError(
            f"plane dimensions differ: ({a.rows}, {a.cols}) vs ({b.rows}, {b.cols})"
        )
    if not (
        0 <= region.row_lo < region.row_hi <= a.rows
        and 0 <= region.col_lo < region.col_hi <= a.cols
    ):
        raise InvalidArgumentError(f"region {region} out of bounds for {a.rows}x{a.cols}")
    sa = a.data[region.row_lo : region.row_hi, region.col_lo : region.col_hi]
    sb = b.data[region.row_lo : region.row_hi, region.col_lo : region.col_hi]
    return float(np.max(np.abs(sa.astype(np.float64) - sb.astype(np.float64))))
