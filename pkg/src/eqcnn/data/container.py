"""Dataset splits and the EQDS binary container.

EQDS layout (little-endian): magic ``EQDS``, version u16, image size
u16, class count u16, total sample count u32, then per sample the
float32 pixel block followed by a u8 label index. The train/test
boundary and provenance live in a JSON sidecar at ``<path>.json``.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..embedding import ImageSample

MAGIC = b"EQDS"
VERSION = 1
_HEADER = struct.Struct("<4sHHHI")


@dataclass
class DatasetSplit:
    """Train/test sample lists plus provenance metadata."""

    train: list[ImageSample]
    test: list[ImageSample]
    provenance: dict = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        samples = self.train or self.test
        return len(samples[0].label) if samples else 0

    @property
    def image_size(self) -> int:
        samples = self.train or self.test
        return samples[0].size if samples else 0


def _check_uniform(samples: list[ImageSample], size: int, num_classes: int):
    for s in samples:
        if s.size != size:
            raise ValueError(f"mixed image sizes {size} and {s.size}")
        if len(s.label) != num_classes:
            raise ValueError(f"mixed class counts {num_classes} and {len(s.label)}")


def save_dataset(split: DatasetSplit, path) -> None:
    path = Path(path)
    samples = split.train + split.test
    if not samples:
        raise ValueError("refusing to save an empty dataset")
    size = samples[0].size
    num_classes = len(samples[0].label)
    _check_uniform(samples, size, num_classes)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, size, num_classes, len(samples)))
        for s in samples:
            fh.write(s.pixels.astype("<f4").tobytes())
            fh.write(struct.pack("<B", s.class_index))
    sidecar = {
        "n_train": len(split.train),
        "n_test": len(split.test),
        "provenance": split.provenance,
    }
    with open(path.with_name(path.name + ".json"), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_dataset(path) -> DatasetSplit:
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise ValueError(f"truncated EQDS header in {path}: got {len(header)} bytes")
        magic, version, size, num_classes, count = _HEADER.unpack(header)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r} at offset 0 in {path}")
        if version != VERSION:
            raise ValueError(f"unsupported EQDS version {version} in {path}")
        block = size * size * 4
        samples = []
        for k in range(count):
            raw = fh.read(block + 1)
            if len(raw) < block + 1:
                raise ValueError(
                    f"truncated EQDS file {path}: sample {k} ends early"
                )
            pixels = np.frombuffer(raw[:block], dtype="<f4").reshape(size, size)
            label = np.zeros(num_classes)
            label[raw[block]] = 1.0
            samples.append(ImageSample(pixels.astype(np.float64), label))
    sidecar_path = path.with_name(path.name + ".json")
    n_train = count
    provenance: dict = {}
    if sidecar_path.exists():
        with open(sidecar_path) as fh:
            sidecar = json.load(fh)
        n_train = int(sidecar.get("n_train", count))
        provenance = sidecar.get("provenance", {})
    return DatasetSplit(samples[:n_train], samples[n_train:], provenance)


def metadata_csv(split: DatasetSplit) -> str:
    """Per-sample metadata table: split, index, class, plus any
    per-sample provenance columns (temperatures, transforms)."""
    extras = []
    for key in ("temperatures", "transforms"):
        if f"train_{key}" in split.provenance or f"test_{key}" in split.provenance:
            extras.append(key)
    lines = ["split,index,class" + "".join(f",{k[:-1]}" for k in extras)]
    for name, samples in (("train", split.train), ("test", split.test)):
        for index, sample in enumerate(samples):
            row = f"{name},{index},{sample.class_index}"
            for key in extras:
                values = split.provenance.get(f"{name}_{key}", [])
                row += f",{values[index] if index < len(values) else ''}"
            lines.append(row)
    return "\n".join(lines) + "\n"
