"""2D Ising configurations from single-flip Metropolis Monte Carlo.

Periodic boundaries, ferromagnetic coupling, temperatures in units of
the coupling over k_B. Labels split ordered (below the exact critical
temperature) from disordered; the sampler pre-draws one uniform per
site and sweep so the compiled and fallback kernels walk an identical
random stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..embedding import ImageSample
from .container import DatasetSplit

#: Exact critical temperature of the square-lattice model, 2/ln(1+sqrt(2)).
T_CRITICAL = 2.0 / math.log(1.0 + math.sqrt(2.0))

DEFAULT_TEMPS_ORDERED = (1.0, 1.2, 1.4, 1.6, 1.8, 2.0)
DEFAULT_TEMPS_DISORDERED = (2.6, 2.8, 3.0, 3.2, 3.4, 3.6)


@dataclass(frozen=True)
class IsingConfig:
    temperature: float
    lattice_size: int = 16
    coupling: float = 1.0
    sweeps: int = 2000
    seed: int = 0

    def __post_init__(self):
        size = self.lattice_size
        if size < 2 or size & (size - 1):
            raise ValueError(f"lattice size must be a power of two >= 2, got {size}")
        if self.temperature <= 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be >= 1, got {self.sweeps}")


def lattice_energy(lattice: np.ndarray, coupling: float = 1.0) -> float:
    """Total bond energy with periodic boundaries, each bond counted once."""
    s = lattice.astype(np.float64)
    return float(-coupling * np.sum(s * (np.roll(s, -1, axis=0) + np.roll(s, -1, axis=1))))


class MetropolisSampler:
    """Single-flip Metropolis chain on a periodic lattice.

    Tracks the energy incrementally; ``recompute_energy`` is the
    from-scratch cross-check.
    """

    def __init__(self, size: int, temperature: float, coupling: float = 1.0, seed=0):
        self.size = size
        self.temperature = temperature
        self.coupling = coupling
        self.rng = np.random.default_rng(seed)
        self.lattice = (self.rng.integers(0, 2, size=(size, size)) * 2 - 1).astype(np.int8)
        self.energy = lattice_energy(self.lattice, coupling)

    def sweep(self, count: int = 1) -> None:
        sites = self.size * self.size
        for _ in range(count):
            uniforms = self.rng.random(sites)
            self.energy += kernels.metropolis_sweep(
                self.lattice, uniforms, self.coupling, self.temperature
            )

    def recompute_energy(self) -> float:
        return lattice_energy(self.lattice, self.coupling)

    def magnetization(self) -> float:
        return float(np.mean(self.lattice))


def ising_sample(config: IsingConfig) -> ImageSample:
    """Lattice after the configured number of sweeps, labeled by phase."""
    sampler = MetropolisSampler(config.lattice_size, config.temperature,
                                config.coupling, config.seed)
    sampler.sweep(config.sweeps)
    label = [1.0, 0.0] if config.temperature < T_CRITICAL else [0.0, 1.0]
    return ImageSample(sampler.lattice.astype(np.float64), np.array(label))


def _class_samples(n: int, temps, base_seed, domain: int, config_kw) -> list[ImageSample]:
    out = []
    for k in range(n):
        seed = np.random.SeedSequence([base_seed, domain, k])
        temp = temps[k % len(temps)]
        cfg = IsingConfig(temperature=temp, seed=seed, **config_kw)
        out.append(ising_sample(cfg))
    return out


def ising_dataset(n_per_class: int, temps_ordered=None, temps_disordered=None,
                  seed: int = 0, n_test_per_class: int = 100,
                  lattice_size: int = 16, sweeps: int = 2000) -> DatasetSplit:
    """Balanced two-class dataset with a train/test split.

    Every sample runs its own chain under a seed derived from its
    (split, class, index) coordinates, so the test set is identical for
    any n_per_class and reruns are deterministic. Train samples are
    interleaved by class so any prefix stays balanced.
    """
    temps_ordered = tuple(temps_ordered or DEFAULT_TEMPS_ORDERED)
    temps_disordered = tuple(temps_disordered or DEFAULT_TEMPS_DISORDERED)
    if max(temps_ordered) >= T_CRITICAL:
        raise ValueError(
            f"ordered temperatures must stay below T_c = {T_CRITICAL:.4f}, "
            f"got {max(temps_ordered)}"
        )
    if min(temps_disordered) <= T_CRITICAL:
        raise ValueError(
            f"disordered temperatures must stay above T_c = {T_CRITICAL:.4f}, "
            f"got {min(temps_disordered)}"
        )
    kw = {"lattice_size": lattice_size, "sweeps": sweeps}
    train_o = _class_samples(n_per_class, temps_ordered, seed, 0, kw)
    train_d = _class_samples(n_per_class, temps_disordered, seed, 1, kw)
    test_o = _class_samples(n_test_per_class, temps_ordered, seed, 2, kw)
    test_d = _class_samples(n_test_per_class, temps_disordered, seed, 3, kw)
    train = [s for pair in zip(train_o, train_d) for s in pair]
    test = [s for pair in zip(test_o, test_d) for s in pair]

    def temps_of(n, temps_a, temps_b):
        out = []
        for k in range(n):
            out.append(temps_a[k % len(temps_a)])
            out.append(temps_b[k % len(temps_b)])
        return out

    provenance = {
        "source": "ising",
        "seed": seed,
        "lattice_size": lattice_size,
        "sweeps": sweeps,
        "temps_ordered": list(temps_ordered),
        "temps_disordered": list(temps_disordered),
        "n_per_class": n_per_class,
        "n_test_per_class": n_test_per_class,
        "train_temperatures": temps_of(n_per_class, temps_ordered, temps_disordered),
        "test_temperatures": temps_of(n_test_per_class, temps_ordered, temps_disordered),
    }
    return DatasetSplit(train, test, provenance)


def magnetization_curve(temps, lattice_size: int = 16, sweeps: int = 2000,
                        burn_in: int = 500, chains: int = 3, seed: int = 0,
                        measure_every: int = 10) -> list[float]:
    """Mean |magnetization| per temperature, averaged over chains."""
    out = []
    for t_index, temp in enumerate(temps):
        acc = []
        for chain in range(chains):
            sampler = MetropolisSampler(
                lattice_size, temp, seed=np.random.SeedSequence([seed, t_index, chain])
            )
            sampler.sweep(burn_in)
            done = burn_in
            while done < sweeps:
                step = min(measure_every, sweeps - done)
                sampler.sweep(step)
                done += step
                acc.append(abs(sampler.magnetization()))
        out.append(float(np.mean(acc)))
    return out
