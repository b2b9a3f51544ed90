"""Binary PPM (P6, maxval 255) reading and writing.

The one file format this package speaks. Reading maps the R, G, B bytes of
each pixel to planes 0, 1, 2 as float32. Writing rounds half-to-even, clamps
to [0, 255], and emits a canonical "P6\\n<cols> <rows>\\n255\\n" header, so
write(read(f)) reproduces files in that canonical form byte for byte.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, PpmParseError
from .image import Image, Plane


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next header token after whitespace and '#' comments, with its end offset."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    if pos >= n:
        raise PpmParseError("truncated header", pos)
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def _int_token(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, end = _next_token(data, pos)
    if not token.isdigit():
        raise PpmParseError(f"expected {what}, got {token!r}", end - len(token))
    return int(token), end


def read_ppm_bytes(data: bytes) -> Image:
    """Parse a binary P6 payload into a 3-plane image."""
    if data[:2] != b"P6":
        raise PpmParseError(f"unsupported magic {data[:2]!r}", 0)
    if len(data) < 3 or not (data[2:3].isspace() or data[2:3] == b"#"):
        raise PpmParseError("magic not followed by whitespace", 2)
    cols, pos = _int_token(data, 2, "width")
    rows, pos = _int_token(data, pos, "height")
    maxval, pos = _int_token(data, pos, "maxval")
    if cols < 1 or rows < 1:
        raise PpmParseError(f"dimensions must be positive, got {cols}x{rows}", pos)
    if maxval != 255:
        raise PpmParseError(f"unsupported maxval {maxval}, only 255", pos)
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PpmParseError("maxval not followed by a whitespace byte", pos)
    pos += 1  # exactly one whitespace byte separates header and payload
    payload = data[pos:]
    need = rows * cols * 3
    if len(payload) < need:
        raise PpmParseError(
            f"truncated pixel payload, expected {need} bytes, got {len(payload)}",
            len(data),
        )
    if len(payload) > need:
        raise PpmParseError(f"{len(payload) - need} trailing bytes after payload", pos + need)
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(rows, cols, 3)
    return Image([Plane(pixels[:, :, c].astype(np.float32)) for c in range(3)])


def read_ppm(path: str | os.PathLike) -> Image:
    return read_ppm_bytes(Path(path).read_bytes())


def write_ppm_bytes(image: Image) -> bytes:
    """Serialise a 3-plane image as canonical binary P6."""
    if image.plane_count != 3:
        raise InvalidArgumentError(
            f"PPM output needs exactly 3 planes, image has {image.plane_count}"
        )
    header = f"P6\n{image.cols} {image.rows}\n255\n".encode("ascii")
    stacked = np.stack([p.data for p in image.planes], axis=-1)
    quantised = np.clip(np.rint(stacked), 0, 255).astype(np.uint8)
    return header + quantised.tobytes()


def write_ppm(image: Image, path: str | os.PathLike) -> None:
    Path(path).write_bytes(write_ppm_bytes(image))
