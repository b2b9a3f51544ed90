"""Separable kernel weights and their dense outer-product expansion."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError


class SeparableKernel:
    """A 1-D vector of float32 weights with odd width."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        w = np.ascontiguousarray(weights, dtype=np.float32)
        if w.ndim != 1 or w.size < 1 or w.size % 2 == 0:
            raise InvalidArgumentError(
                f"kernel weights must be a 1-D vector of odd length, got shape {w.shape}"
            )
        self.weights = w

    @property
    def width(self) -> int:
        return int(self.weights.size)

    @property
    def radius(self) -> int:
        return self.width // 2


class DenseKernel:
    """A width x width float32 matrix applied by the single-pass variants."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.ascontiguousarray(matrix, dtype=np.float32)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1 or m.shape[0] % 2 == 0:
            raise InvalidArgumentError(
                f"dense kernel must be a square odd-width matrix, got shape {m.shape}"
            )
        self.matrix = m

    @property
    def width(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def radius(self) -> int:
        return self.width // 2


def gaussian5() -> SeparableKernel:
    """Binomial width-5 Gaussian approximation with unit sum: [1, 4, 6, 4, 1] / 16."""
    return SeparableKernel(np.array([1, 4, 6, 4, 1], dtype=np.float32) / np.float32(16))


def delta(width: int = 5) -> SeparableKernel:
    """Identity kernel: 1 at the centre, 0 elsewhere."""
    w = np.zeros(width, dtype=np.float32)
    w[width // 2] = 1.0
    return SeparableKernel(w)


def outer_product(kernel: SeparableKernel) -> DenseKernel:
    """Dense matrix with entry (i, j) = weights[i] * weights[j].

    Products are computed in float32, so each entry carries a single rounding.
    """
    w = kernel.weights
    return DenseKernel(np.outer(w, w))
