"""Shared fixtures and independent reference implementations.

The reference functions here are deliberately written as plain scalar loops,
separate from the library's code paths, so tests can compare the optimised
implementations against a second opinion.
"""

from __future__ import annotations

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile(
    "sepconv",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("sepconv")

_MASK64 = (1 << 64) - 1


def splitmix64_reference(seed: int, count: int) -> list[int]:
    """Scalar splitmix64: state += gamma, then mix, one output per draw."""
    out = []
    state = seed & _MASK64
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


def synthetic_reference(rows: int, cols: int, planes: int, seed: int) -> np.ndarray:
    """(planes, rows, cols) float32 samples built from the scalar stream."""
    draws = splitmix64_reference(seed, rows * cols * planes)
    samples = np.array([(x >> 40) * 2.0**-16 for x in draws], dtype=np.float32)
    return samples.reshape(planes, rows, cols)


def oracle_single_pass(src: np.ndarray, dense: np.ndarray) -> np.ndarray:
    """Per-pixel dense convolution of the valid region, float32 throughout.

    Kernel terms fold row-major, left to right, starting from the first
    product; pixels outside the valid region stay zero.
    """
    rows, cols = src.shape
    width = dense.shape[0]
    r = width // 2
    out = np.zeros((rows, cols), dtype=np.float32)
    for y in range(r, rows - r):
        for x in range(r, cols - r):
            acc = None
            for i in range(width):
                for j in range(width):
                    term = src[y + i - r, x + j - r] * dense[i, j]
                    acc = term if acc is None else acc + term
            out[y, x] = acc
    return out


def oracle_horizontal(src: np.ndarray, weights: np.ndarray) -> np.ndarray:
    rows, cols = src.shape
    width = weights.shape[0]
    r = width // 2
    out = np.zeros((rows, cols), dtype=np.float32)
    for y in range(r, rows - r):
        for x in range(r, cols - r):
            acc = src[y, x - r] * weights[0]
            for m in range(1, width):
                acc = acc + src[y, x - r + m] * weights[m]
            out[y, x] = acc
    return out


def oracle_vertical(src: np.ndarray, weights: np.ndarray) -> np.ndarray:
    rows, cols = src.shape
    width = weights.shape[0]
    r = width // 2
    out = np.zeros((rows, cols), dtype=np.float32)
    for y in range(r, rows - r):
        for x in range(r, cols - r):
            acc = src[y - r, x] * weights[0]
            for m in range(1, width):
                acc = acc + src[y - r + m, x] * weights[m]
            out[y, x] = acc
    return out
