"""Rectangular grids in R^n and finite-difference gradients of grid functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned grid on the box ``[lo, hi]``.

    With ``cell_centered=False`` the nodes include both box faces and the
    spacing is ``(hi - lo) / (shape - 1)``; with ``cell_centered=True`` the
    points are cell midpoints and the spacing is ``(hi - lo) / shape``.
    Points are enumerated in C order.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    shape: tuple[int, ...]
    cell_centered: bool = False

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.shape)):
            raise ValueError("lo, hi and shape must have the same length")
        if any(s < 1 for s in self.shape):
            raise ValueError(f"bad grid shape {self.shape}")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("need lo < hi on every axis")
        if not self.cell_centered and any(s < 2 for s in self.shape):
            raise ValueError("a node grid needs at least 2 nodes per axis")

    @classmethod
    def uniform(cls, n: int, dim: int, lo: float = 0.0, hi: float = 1.0,
                cell_centered: bool = False) -> "GridSpec":
        return cls((lo,) * dim, (hi,) * dim, (n,) * dim, cell_centered)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacing(self) -> np.ndarray:
        lo, hi, shape = np.array(self.lo), np.array(self.hi), np.array(self.shape)
        if self.cell_centered:
            return (hi - lo) / shape
        return (hi - lo) / (shape - 1)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        h = self.spacing
        offset = 0.5 if self.cell_centered else 0.0
        return [self.lo[k] + (np.arange(self.shape[k]) + offset) * h[k]
                for k in range(self.ndim)]

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def multi_index(self) -> np.ndarray:
        """(N, n) integer index of every point."""
        mesh = np.meshgrid(*[np.arange(s) for s in self.shape], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def boundary_mask(self) -> np.ndarray:
        idx = self.multi_index()
        shape = np.array(self.shape)
        return np.any((idx == 0) | (idx == shape - 1), axis=1)

    def refine(self) -> "GridSpec":
        """Halve the spacing on every axis."""
        if self.cell_centered:
            shape = tuple(2 * s for s in self.shape)
        else:
            shape = tuple(2 * (s - 1) + 1 for s in self.shape)
        return GridSpec(self.lo, self.hi, shape, self.cell_centered)

    def nearest_index(self, x) -> int:
        x = np.asarray(x, dtype=float)
        offset = 0.5 if self.cell_centered else 0.0
        k = np.rint((x - np.array(self.lo)) / self.spacing - offset).astype(int)
        k = np.clip(k, 0, np.array(self.shape) - 1)
        return int(np.ravel_multi_index(tuple(k), self.shape))

    def evaluate(self, func) -> np.ndarray:
        """Sample ``func`` (points -> values) on the grid; returns a flat array."""
        values = np.asarray(func(self.points()), dtype=float)
        return np.broadcast_to(values, (self.size,)).copy()


def grid_gradient(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    """Euclidean gradient of a flat grid function, shape (N, n).

    Second-order central differences in the interior and second-order
    one-sided differences on the faces (first order on 2-point axes).
    """
    arr = np.asarray(values, dtype=float).reshape(grid.shape)
    h = grid.spacing
    out = np.zeros((grid.size, grid.ndim))
    for k in range(grid.ndim):
        if grid.shape[k] < 2:
            continue
        edge = 2 if grid.shape[k] >= 3 else 1
        out[:, k] = np.gradient(arr, h[k], axis=k, edge_order=edge).ravel()
    return out
