"""Uniform node-centred Cartesian grids in two or three dimensions.

Axis convention used throughout the package: *math* axis 0 is x, 1 is y,
2 is z.  Node fields are stored as numpy arrays of shape ``grid.shape``,
which lists axes in reversed order -- ``(ny, nx)`` in 2D, ``(nz, ny, nx)``
in 3D -- so that ``field.ravel()`` walks the nodes row-major with x
varying fastest.  ``nd_axis`` maps a math axis to the corresponding numpy
axis of such an array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["Grid", "nd_axis", "tensor_components", "tensor_component_names"]

# Upper-triangle component order for symmetric second-derivative tensors.
_TENSOR_COMPONENTS = {
    2: ((0, 0), (0, 1), (1, 1)),
    3: ((0, 0), (0, 1), (1, 1), (0, 2), (1, 2), (2, 2)),
}
_AXIS_NAMES = "xyz"


def tensor_components(dim: int) -> tuple[tuple[int, int], ...]:
    """Ordered (a, b) index pairs, a <= b, of the symmetric tensor components."""
    return _TENSOR_COMPONENTS[dim]


def tensor_component_names(dim: int) -> tuple[str, ...]:
    return tuple(_AXIS_NAMES[a] + _AXIS_NAMES[b] for a, b in _TENSOR_COMPONENTS[dim])


def nd_axis(dim: int, axis: int) -> int:
    """Numpy array axis corresponding to math axis ``axis`` (0=x, 1=y, 2=z)."""
    return dim - 1 - axis


@dataclass(frozen=True)
class Grid:
    """Node-centred uniform grid on an axis-aligned box.

    ``n[a]`` nodes along math axis ``a`` span ``[lo[a], hi[a]]`` inclusive,
    so the spacing is ``h[a] = (hi[a] - lo[a]) / (n[a] - 1)``.
    """

    n: tuple[int, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self) -> None:
        n = tuple(int(v) for v in self.n)
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(n) not in (2, 3):
            raise ValueError(f"grid must be 2D or 3D, got {len(n)} axes")
        if not (len(n) == len(lo) == len(hi)):
            raise ValueError("n, lo and hi must have the same length")
        if any(v < 4 for v in n):
            raise ValueError(f"need at least 4 nodes per axis, got n={n}")
        if any(b <= a for a, b in zip(lo, hi)):
            raise ValueError(f"box must have positive extent, got lo={lo} hi={hi}")

    @classmethod
    def box(cls, n: int | Sequence[int], dim: int = 2,
            lo: float = -1.0, hi: float = 1.0) -> "Grid":
        """Uniform grid with ``n`` nodes per axis on ``[lo, hi]^dim``."""
        if isinstance(n, int):
            n = (n,) * dim
        return cls(tuple(n), (lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def h(self) -> tuple[float, ...]:
        return tuple((b - a) / (k - 1) for a, b, k in zip(self.lo, self.hi, self.n))

    @property
    def min_h(self) -> float:
        return min(self.h)

    @property
    def diag(self) -> float:
        """Cell diagonal, sqrt(sum_a h_a^2); the natural band-width unit."""
        return float(np.sqrt(sum(v * v for v in self.h)))

    @property
    def shape(self) -> tuple[int, ...]:
        """Array shape for node fields: reversed axis order, x fastest."""
        return tuple(reversed(self.n))

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    def axis_coords(self, axis: int) -> np.ndarray:
        return np.linspace(self.lo[axis], self.hi[axis], self.n[axis])

    def coords(self) -> tuple[np.ndarray, ...]:
        """Node coordinate arrays (X, Y[, Z]), each of shape ``self.shape``."""
        axes_rev = [self.axis_coords(a) for a in reversed(range(self.dim))]
        mesh = np.meshgrid(*axes_rev, indexing="ij")
        return tuple(reversed(mesh))

    def node_coord(self, index: Sequence[int]) -> tuple[float, ...]:
        """Coordinates of the node with per-axis index (i, j[, k])."""
        if len(index) != self.dim:
            raise ValueError(f"index must have {self.dim} entries, got {len(index)}")
        out = []
        for a, i in enumerate(index):
            i = int(i)
            if not 0 <= i < self.n[a]:
                raise IndexError(f"index {i} out of range for axis {a} (n={self.n[a]})")
            out.append(self.lo[a] + i * self.h[a])
        return tuple(out)

    def sample(self, fn: Callable[..., np.ndarray]) -> np.ndarray:
        """Evaluate ``fn(X, Y[, Z])`` at every node.

        Returns a float64 array of shape ``self.shape``.  Raises if the
        result contains a non-finite value, naming the offending node.
        """
        values = np.asarray(fn(*self.coords()), dtype=np.float64)
        if values.shape != self.shape:
            values = np.broadcast_to(values, self.shape).astype(np.float64)
        bad = ~np.isfinite(values)
        if bad.any():
            flat = int(np.argmax(bad.ravel()))
            idx_nd = np.unravel_index(flat, self.shape)
            index = tuple(int(idx_nd[nd_axis(self.dim, a)]) for a in range(self.dim))
            coord = self.node_coord(index)
            raise ValueError(
                f"sampled field is not finite at node {index} (coord {coord})")
        return values
