"""Seeded uniform stream shared with the simulation kernels."""

from __future__ import annotations

from ._kernels_py import MASK64, path_seed, rng_uniform


class SplitMix64:
    """Counter-friendly splitmix64 stream.

    The simulation kernels thread the same generator state internally, so a
    stream drawn here is interchangeable with one consumed inside a kernel.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def uniform(self) -> float:
        """Next double in [0, 1)."""
        self.state, u = rng_uniform(self.state)
        return u


def spawn_seed(master: int, index: int) -> int:
    """Derive the seed of stream `index` from a master seed.

    Pure function of (master, index): path-level reproducibility does not
    depend on scheduling order.
    """
    return path_seed(int(master) & MASK64, int(index))
