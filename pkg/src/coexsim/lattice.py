"""Finite-range radial kernels on a periodic d-dimensional torus.

Fields carry any number of leading batch axes (typically replicas) followed
by ``d`` spatial axes of equal length.  Site ``k`` along an axis has
coordinate ``k`` if ``k < side/2`` and ``k - side`` otherwise, so index 0 is
the origin.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DomainError, ParameterError

__all__ = ["RadialKernel", "Torus", "shell_size"]


def shell_size(r: int, d: int) -> int:
    """Number of lattice points at max-norm distance exactly r in Z^d."""
    if r == 0:
        return 1
    return (2 * r + 1) ** d - (2 * r - 1) ** d


@dataclass(frozen=True)
class RadialKernel:
    """Weights depending only on the max-norm distance, zero beyond ``range``."""

    weights: tuple

    def __init__(self, weights):
        w = tuple(float(v) for v in np.atleast_1d(np.asarray(weights, dtype=float)))
        if len(w) == 0:
            w = (0.0,)
        if any(v < 0 or not np.isfinite(v) for v in w):
            raise ParameterError("kernel weights must be finite and nonnegative")
        object.__setattr__(self, "weights", w)

    @classmethod
    def zero(cls) -> "RadialKernel":
        return cls([0.0])

    @classmethod
    def nearest(cls, rate: float, self_weight: float = 0.0) -> "RadialKernel":
        return cls([self_weight, rate])

    def __call__(self, r: int) -> float:
        r = int(r)
        return self.weights[r] if 0 <= r < len(self.weights) else 0.0

    @property
    def range(self) -> int:
        """Largest r with a nonzero weight (0 for the zero kernel)."""
        nz = [r for r, v in enumerate(self.weights) if v != 0.0]
        return max(nz) if nz else 0

    @property
    def offdiag_range(self) -> int:
        nz = [r for r, v in enumerate(self.weights) if r > 0 and v != 0.0]
        return max(nz) if nz else 0

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.weights)

    def total(self, d: int, include_diagonal: bool = True) -> float:
        """Sum over j of w(||i - j||) on Z^d."""
        start = 0 if include_diagonal else 1
        return float(sum(self.weights[r] * shell_size(r, d) for r in range(start, len(self.weights))))

    def stencil(self, d: int) -> np.ndarray:
        """Dense (2R+1)^d array of weights centred on the origin."""
        R = self.range
        ax = np.abs(np.arange(-R, R + 1))
        grids = np.meshgrid(*([ax] * d), indexing="ij")
        dist = np.maximum.reduce(grids) if d > 1 else grids[0]
        w = np.asarray(self.weights + (0.0,) * (R + 1 - len(self.weights)))
        return w[dist]


@dataclass(frozen=True)
class Torus:
    d: int
    side: int

    def __post_init__(self):
        if self.d < 1:
            raise ParameterError("dimension must be >= 1")
        if self.side < 1:
            raise ParameterError("torus side must be positive")

    @property
    def shape(self) -> tuple:
        return (self.side,) * self.d

    @property
    def n_sites(self) -> int:
        return self.side ** self.d

    def check_kernel(self, kernel: RadialKernel, name: str = "kernel"):
        """Reject kernels that would wrap onto themselves.

        A single-site torus is allowed only for purely diagonal kernels.
        """
        R = kernel.range
        if self.side == 1:
            if R > 0:
                raise DomainError(f"{name} has range {R} but the torus has one site")
            return
        if self.side <= 2 * (R + 1):
            raise DomainError(f"torus side {self.side} must exceed 2*(range+1) = {2 * (R + 1)} for {name}")

    def apply(self, kernel: RadialKernel, field: np.ndarray) -> np.ndarray:
        """(kernel * field)_i = sum_j w(||i - j||) field_j with periodic wrap."""
        stencil = kernel.stencil(self.d)
        batch = field.ndim - self.d
        if stencil.size == 1:
            return stencil.flat[0] * field
        full = stencil.reshape((1,) * batch + stencil.shape)
        return ndimage.correlate(field, full, mode="wrap")

    def box_max(self, field: np.ndarray, radius: int) -> np.ndarray:
        """Maximum of ``field`` over the max-norm ball of given radius, wrapped."""
        if 2 * radius + 1 > self.side and self.side > 1:
            raise DomainError(f"box of radius {radius} does not fit in torus side {self.side}")
        if radius == 0 or self.side == 1:
            return field.copy()
        batch = field.ndim - self.d
        size = (1,) * batch + (2 * radius + 1,) * self.d
        return ndimage.maximum_filter(field, size=size, mode="wrap")

    def coords(self) -> np.ndarray:
        """Signed coordinates along one axis."""
        k = np.arange(self.side)
        return np.where(k < (self.side + 1) // 2, k, k - self.side)

    def norm_from_origin(self) -> np.ndarray:
        """Max-norm distance of every site from the origin (torus metric)."""
        c = np.abs(self.coords())
        grids = np.meshgrid(*([c] * self.d), indexing="ij")
        return np.maximum.reduce(grids) if self.d > 1 else grids[0]

    def index(self, coord) -> tuple:
        """Array index of a signed coordinate tuple."""
        coord = np.atleast_1d(coord)
        if coord.size != self.d:
            raise ParameterError(f"expected {self.d} coordinates")
        return tuple(int(c) % self.side for c in coord)

    def offsets(self, radius: int):
        """All integer offsets with max norm <= radius."""
        return itertools.product(range(-radius, radius + 1), repeat=self.d)

    def neighbor_table(self, kernel: RadialKernel):
        """Flattened-site targets and weights of the off-diagonal kernel entries.

        Returns (targets, weights) of shapes (n_sites, K) and (K,).
        """
        offs = [o for o in self.offsets(kernel.range) if max(map(abs, o)) > 0]
        offs = [o for o in offs if kernel(max(map(abs, o))) > 0]
        sites = np.array(list(itertools.product(range(self.side), repeat=self.d)), dtype=np.int64)
        targets = np.empty((len(sites), len(offs)), dtype=np.int64)
        for k, o in enumerate(offs):
            moved = (sites + np.array(o)) % self.side
            targets[:, k] = np.ravel_multi_index(moved.T, self.shape)
        weights = np.array([kernel(max(map(abs, o))) for o in offs], dtype=float)
        return targets, weights

    def migration_matrix(self, kernel: RadialKernel) -> np.ndarray:
        """Dense off-diagonal migration matrix m_ij (wrapping contributions add)."""
        n = self.n_sites
        mat = np.zeros((n, n))
        if n == 1:
            return mat
        targets, weights = self.neighbor_table(kernel)
        for k, w in enumerate(weights):
            np.add.at(mat, (np.arange(n), targets[:, k]), w)
        return mat
