"""Counter-based random streams.

Every Gaussian increment used by the lattice steppers is a pure function of
``(seed, stream_id, step, position in block)``: the Philox key is derived from
``(seed, stream_id)`` and the step index is written into the counter, so any
step can be regenerated without replaying the ones before it.
"""

from __future__ import annotations

import numpy as np

__all__ = ["NoiseStream", "replica_seeds", "stream_key"]


def stream_key(seed: int, stream_id: int = 0) -> np.ndarray:
    """128-bit Philox key for the pair (seed, stream_id)."""
    if seed < 0 or stream_id < 0:
        raise ValueError("seed and stream_id must be nonnegative")
    return np.random.SeedSequence([int(seed), int(stream_id)]).generate_state(2, np.uint64)


class NoiseStream:
    """Standard Gaussian increments indexed by (step, site).

    ``normals(step, shape)`` always returns the same block for the same
    arguments.  Within a block, entries are laid out in C order, so a fixed
    shape pins every (site, step) pair to one number.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._key = stream_key(self.seed, self.stream_id)

    def __repr__(self):
        return f"NoiseStream(seed={self.seed}, stream_id={self.stream_id})"

    def generator(self, step: int) -> np.random.Generator:
        if step < 0:
            raise ValueError("step must be nonnegative")
        bitgen = np.random.Philox(key=self._key, counter=[0, 0, int(step), 0])
        return np.random.Generator(bitgen)

    def normals(self, step: int, shape) -> np.ndarray:
        return self.generator(step).standard_normal(shape)

    def increments(self, step: int, shape, dt: float) -> np.ndarray:
        """Brownian increments with variance ``dt``."""
        return np.sqrt(dt) * self.normals(step, shape)

    def uniforms(self, step: int, shape) -> np.ndarray:
        return self.generator(step).random(shape)

    def spawn(self, stream_id: int) -> "NoiseStream":
        return NoiseStream(self.seed, stream_id)


def replica_seeds(seed: int, count: int, stream_id: int = 0) -> np.ndarray:
    """Distinct 32-bit seeds for the compiled event-driven kernels.

    Replica ``r`` gets ``base + r`` (mod 2**32), so seeds never collide for
    fewer than 2**32 replicas and replica ``r`` is the same whatever the
    batch size.
    """
    base = int(np.random.SeedSequence([int(seed), int(stream_id), 0x5EED]).generate_state(1)[0])
    return ((base + np.arange(count, dtype=np.uint64)) % (1 << 32)).astype(np.uint32)
