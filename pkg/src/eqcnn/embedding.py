"""Coordinate-aware amplitude embedding of square images.

Pixel (i, j) of an N x N image (N = 2**n, first array axis is the
x-coordinate) lands on basis state |i>|j>, i.e. index i * N + j, after
L2 normalization. This makes the pixel-space square symmetries act as
basis permutations on the embedded state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import QuantumState
from .symmetry import GroupElement, inverse, pixel_map


@dataclass
class ImageSample:
    """An N x N real pixel grid plus its one-hot label."""

    pixels: np.ndarray
    label: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        self.label = np.asarray(self.label, dtype=np.float64)
        if self.pixels.ndim != 2 or self.pixels.shape[0] != self.pixels.shape[1]:
            raise ValueError(f"pixels must be square, got shape {self.pixels.shape}")
        if self.pixels.shape[0] < 2:
            raise ValueError(f"image size must be >= 2, got {self.pixels.shape[0]}")
        if self.label.ndim != 1:
            raise ValueError("label must be a one-hot vector")

    @property
    def size(self) -> int:
        return self.pixels.shape[0]

    @property
    def class_index(self) -> int:
        return int(np.argmax(self.label))


def caa_embed(image: ImageSample) -> QuantumState:
    """Embed pixels as amplitudes on |i>|j>, normalized to unit L2 norm."""
    size = image.size
    if size & (size - 1):
        raise ValueError(f"embedding needs a power-of-two image size, got {size}")
    norm = float(np.linalg.norm(image.pixels))
    if norm == 0.0:
        raise ValueError("cannot embed an all-zero image")
    n = size.bit_length() - 1
    amps = (image.pixels / norm).reshape(-1).astype(np.complex128)
    return QuantumState(2 * n, amps)


def apply_group_to_image(image: ImageSample, g: GroupElement) -> ImageSample:
    """Transform pixels by a square-symmetry element; the label is kept.

    Satisfies the commuting diagram
    caa_embed(apply_group_to_image(x, g)) = induced_rep(g, n) . caa_embed(x).
    """
    size = image.size
    inv = inverse(g)
    i, j = np.indices((size, size))
    si, sj = pixel_map(inv, size, i, j)
    return ImageSample(image.pixels[si, sj], image.label.copy())
