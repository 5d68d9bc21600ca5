"""Random square-symmetry extension of image datasets."""

from __future__ import annotations

import numpy as np

from ..embedding import ImageSample, apply_group_to_image
from ..symmetry import element

#: Rotations and axis reflections used for the extension draw.
EXTEND_ELEMENTS = ("e", "r", "r2", "r3", "tx", "ty")


def draw_extension_elements(count: int, seed) -> list[str]:
    """The deterministic per-sample transform labels for a given seed."""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(EXTEND_ELEMENTS), size=count)
    return [EXTEND_ELEMENTS[k] for k in picks]


def extend_with_group(samples: list[ImageSample], seed) -> list[ImageSample]:
    """Transform each sample by an independent uniform element.

    Labels are untouched; ``draw_extension_elements`` with the same
    seed reproduces the applied transform sequence for provenance.
    """
    labels = draw_extension_elements(len(samples), seed)
    return [apply_group_to_image(s, element(g)) for s, g in zip(samples, labels)]
