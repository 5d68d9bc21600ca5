"""MNIST IDX ingestion, bilinear downsampling, and the two-digit task."""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np

from ..embedding import ImageSample
from .container import DatasetSplit
from .transforms import draw_extension_elements, extend_with_group

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _open_idx(path):
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(2)
    if head == b"\x1f\x8b":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_idx(path, expected_magic: int, rank: int) -> np.ndarray:
    with _open_idx(path) as fh:
        raw = fh.read(4)
        if len(raw) < 4:
            raise ValueError(f"truncated IDX header at offset 0 in {path}")
        (magic,) = struct.unpack(">I", raw)
        if magic != expected_magic:
            raise ValueError(
                f"bad IDX magic 0x{magic:08x} at offset 0 in {path}, "
                f"expected 0x{expected_magic:08x}"
            )
        dims = []
        for d in range(rank):
            raw = fh.read(4)
            if len(raw) < 4:
                raise ValueError(f"truncated IDX header at offset {4 * (d + 1)} in {path}")
            dims.append(struct.unpack(">I", raw)[0])
        count = int(np.prod(dims))
        data = fh.read(count)
        if len(data) < count:
            raise ValueError(
                f"truncated IDX payload in {path}: expected {count} bytes "
                f"at offset {4 * (rank + 1)}, got {len(data)}"
            )
    return np.frombuffer(data, dtype=np.uint8).reshape(dims)


def read_idx_images(path) -> np.ndarray:
    """(count, rows, cols) uint8 array from an IDX image file (gzip ok)."""
    return _read_idx(path, IMAGE_MAGIC, rank=3)


def read_idx_labels(path) -> np.ndarray:
    return _read_idx(path, LABEL_MAGIC, rank=1)


def mnist_load(image_path, label_path, digits=(4, 5)) -> list[ImageSample]:
    """Samples for a two-digit task, pixels scaled to [0, 1].

    The first digit maps to label [1, 0], the second to [0, 1]; samples
    of other digits are dropped.
    """
    digits = tuple(digits)
    if len(set(digits)) != 2:
        raise ValueError(f"digit set must contain exactly 2 digits, got {digits}")
    images = read_idx_images(image_path)
    labels = read_idx_labels(label_path)
    if len(images) != len(labels):
        raise ValueError(
            f"{image_path} holds {len(images)} images but {label_path} "
            f"holds {len(labels)} labels"
        )
    one_hot = {digits[0]: np.array([1.0, 0.0]), digits[1]: np.array([0.0, 1.0])}
    out = []
    for pixels, digit in zip(images, labels):
        hot = one_hot.get(int(digit))
        if hot is not None:
            out.append(ImageSample(pixels.astype(np.float64) / 255.0, hot.copy()))
    return out


def downsample(image: ImageSample, size: int = 16) -> ImageSample:
    """Bilinear interpolation onto a smaller square grid; label kept."""
    src = image.pixels
    in_size = image.size
    if in_size < size:
        raise ValueError(f"cannot downsample a {in_size}x{in_size} image to {size}x{size}")
    scale = in_size / size
    coords = (np.arange(size) + 0.5) * scale - 0.5
    lo = np.clip(np.floor(coords).astype(int), 0, in_size - 1)
    hi = np.clip(lo + 1, 0, in_size - 1)
    frac = np.clip(coords - lo, 0.0, 1.0)
    rows = src[lo][:, hi] * frac[None, :] + src[lo][:, lo] * (1 - frac[None, :])
    rows_hi = src[hi][:, hi] * frac[None, :] + src[hi][:, lo] * (1 - frac[None, :])
    out = rows_hi * frac[:, None] + rows * (1 - frac[:, None])
    return ImageSample(out, image.label.copy())


def _interleave(samples: list[ImageSample]) -> list[ImageSample]:
    by_class: dict[int, list[ImageSample]] = {}
    for s in samples:
        by_class.setdefault(s.class_index, []).append(s)
    pools = [by_class[c] for c in sorted(by_class)]
    out = []
    for row in zip(*pools):
        out.extend(row)
    return out


def mnist_task_dataset(train_images, train_labels, test_images, test_labels,
                       digits=(4, 5), seed: int = 0, n_test_per_class: int = 100,
                       size: int = 16) -> DatasetSplit:
    """The extended two-digit task: filter, downsample, random transforms.

    Train samples are interleaved by class so any prefix stays
    balanced; the test set takes a fixed number per class.
    """
    train = [downsample(s, size) for s in mnist_load(train_images, train_labels, digits)]
    test = [downsample(s, size) for s in mnist_load(test_images, test_labels, digits)]
    train = _interleave(train)
    test = _interleave(test)[: 2 * n_test_per_class]
    train_ext = extend_with_group(train, seed=seed * 2)
    test_ext = extend_with_group(test, seed=seed * 2 + 1)
    provenance = {
        "source": "mnist",
        "digits": list(digits),
        "seed": seed,
        "size": size,
        "n_test_per_class": n_test_per_class,
        "train_transforms": draw_extension_elements(len(train), seed * 2),
        "test_transforms": draw_extension_elements(len(test), seed * 2 + 1),
    }
    return DatasetSplit(train_ext, test_ext, provenance)
