"""PPM reader and writer."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sepconv_lab import (
    Image,
    InvalidArgumentError,
    Plane,
    PpmParseError,
    read_ppm,
    read_ppm_bytes,
    write_ppm,
    write_ppm_bytes,
)

# 2x2 image with pixels (0,0,0), (255,255,255), (10,20,30), (1,2,3)
TINY_PPM = b"P6\n2 2\n255\n" + bytes([0, 0, 0, 255, 255, 255, 10, 20, 30, 1, 2, 3])


def test_read_tiny_hand_constructed_file():
    image = read_ppm_bytes(TINY_PPM)
    assert (image.rows, image.cols, image.plane_count) == (2, 2, 3)
    assert image.planes[0].data.tolist() == [[0.0, 255.0], [10.0, 1.0]]
    assert image.planes[1].data.tolist() == [[0.0, 255.0], [20.0, 2.0]]
    assert image.planes[2].data.tolist() == [[0.0, 255.0], [30.0, 3.0]]


def test_write_read_round_trip_is_byte_identical():
    assert write_ppm_bytes(read_ppm_bytes(TINY_PPM)) == TINY_PPM


@given(
    rows=st.integers(min_value=1, max_value=8),
    cols=st.integers(min_value=1, max_value=8),
    seed=st.integers(min_value=0, max_value=2**32),
)
def test_round_trip_on_random_integer_images(rows, cols, seed):
    rng = np.random.default_rng(seed)
    pixels = rng.integers(0, 256, size=(rows, cols, 3), dtype=np.uint8)
    data = f"P6\n{cols} {rows}\n255\n".encode() + pixels.tobytes()
    assert write_ppm_bytes(read_ppm_bytes(data)) == data


def test_read_from_path_and_write_to_path(tmp_path):
    path = tmp_path / "tiny.ppm"
    path.write_bytes(TINY_PPM)
    image = read_ppm(path)
    out = tmp_path / "copy.ppm"
    write_ppm(image, out)
    assert out.read_bytes() == TINY_PPM


def test_header_comments_are_skipped():
    data = b"P6\n# a comment\n2 1 # trailing\n255\n" + bytes(6)
    image = read_ppm_bytes(data)
    assert (image.rows, image.cols) == (1, 2)


def test_unsupported_magic():
    with pytest.raises(PpmParseError, match="unsupported magic"):
        read_ppm_bytes(b"P5\n2 2\n255\n" + bytes(12))


def test_unsupported_maxval():
    with pytest.raises(PpmParseError, match="maxval"):
        read_ppm_bytes(b"P6\n2 2\n254\n" + bytes(12))


def test_truncated_payload_reports_offset():
    data = b"P6\n2 2\n255\n" + bytes(5)
    with pytest.raises(PpmParseError) as excinfo:
        read_ppm_bytes(data)
    assert "truncated" in str(excinfo.value)
    assert excinfo.value.byte_offset == len(data)


def test_trailing_bytes_rejected():
    with pytest.raises(PpmParseError, match="trailing"):
        read_ppm_bytes(TINY_PPM + b"\n")


def test_truncated_header():
    with pytest.raises(PpmParseError):
        read_ppm_bytes(b"P6\n2")


def test_non_numeric_header_token():
    with pytest.raises(PpmParseError):
        read_ppm_bytes(b"P6\ntwo 2\n255\n" + bytes(12))


def test_write_requires_three_planes():
    with pytest.raises(InvalidArgumentError):
        write_ppm_bytes(Image.zeros(2, 2, 1))


def test_write_rounds_half_to_even_and_clamps():
    values = np.array([[0.5, 1.5], [2.5, 300.0]], dtype=np.float32)
    image = Image([Plane(values), Plane(np.full((2, 2), -3.0)), Plane.zeros(2, 2)])
    payload = write_ppm_bytes(image)[len(b"P6\n2 2\n255\n") :]
    red = payload[0::3]
    assert list(red) == [0, 2, 2, 255]
    green = payload[1::3]
    assert list(green) == [0, 0, 0, 0]
