"""Dataset generation, ingestion, and persistence."""

from .container import DatasetSplit, load_dataset, metadata_csv, save_dataset
from .ising import (
    DEFAULT_TEMPS_DISORDERED,
    DEFAULT_TEMPS_ORDERED,
    T_CRITICAL,
    IsingConfig,
    MetropolisSampler,
    ising_dataset,
    ising_sample,
    lattice_energy,
    magnetization_curve,
)
from .mnist import downsample, mnist_load, mnist_task_dataset, read_idx_images, read_idx_labels
from .transforms import EXTEND_ELEMENTS, draw_extension_elements, extend_with_group

__all__ = [
    "DatasetSplit",
    "load_dataset",
    "metadata_csv",
    "save_dataset",
    "IsingConfig",
    "MetropolisSampler",
    "T_CRITICAL",
    "DEFAULT_TEMPS_ORDERED",
    "DEFAULT_TEMPS_DISORDERED",
    "ising_dataset",
    "ising_sample",
    "lattice_energy",
    "magnetization_curve",
    "downsample",
    "mnist_load",
    "mnist_task_dataset",
    "read_idx_images",
    "read_idx_labels",
    "EXTEND_ELEMENTS",
    "draw_extension_elements",
    "extend_with_group",
]
