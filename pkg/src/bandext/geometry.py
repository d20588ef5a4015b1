"""Level-set shapes and the node sets derived from them.

Shapes follow the sign convention phi < 0 inside the data region and
phi > 0 in the region to be filled by extrapolation.  Update masks are
discrete Heaviside fields: a stage only advances nodes where its mask is
one, so values on and inside the interface stay untouched.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .grid import Grid
from .stencils import central_gradient

__all__ = [
    "LevelSetShape", "SHAPES", "get_shape",
    "compute_normals", "Masks", "build_masks", "band_mask",
]


class LevelSetShape(Protocol):
    dim: int
    description: str

    def phi(self, *coords: np.ndarray) -> np.ndarray: ...


def _ball(coords, center, radius):
    sq = sum((c - cc) ** 2 for c, cc in zip(coords, center))
    return np.sqrt(sq) - radius


def _five_lobe(x, y, rsq):
    """Angular factor (y^5 + 5x^4y - 10x^2y^3) / r^5, zero at the origin."""
    num = y ** 5 + 5.0 * x ** 4 * y - 10.0 * x ** 2 * y ** 3
    r5 = rsq ** 2.5
    return np.divide(num, r5, out=np.zeros_like(num), where=r5 > 0)


@dataclass(frozen=True)
class Disk2D:
    dim = 2
    description = "circle of radius 0.501 about the origin"
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.501

    def phi(self, x, y):
        return _ball((x, y), self.center, self.radius)


@dataclass(frozen=True)
class Star2D:
    dim = 2
    description = "five-lobed star: high curvature, smooth boundary"
    radius: float = 0.501
    amplitude: float = 0.25

    def phi(self, x, y):
        rsq = x ** 2 + y ** 2
        return np.sqrt(rsq) - self.radius - self.amplitude * _five_lobe(x, y, rsq)


@dataclass(frozen=True)
class Union2D:
    dim = 2
    description = "union of two overlapping disks: concave kinks"
    center1: tuple[float, float] = (-0.1, -0.3)
    radius1: float = 0.501
    center2: tuple[float, float] = (0.2, 0.2)
    radius2: float = 0.401

    def phi(self, x, y):
        return np.minimum(_ball((x, y), self.center1, self.radius1),
                          _ball((x, y), self.center2, self.radius2))


@dataclass(frozen=True)
class Intersection2D:
    dim = 2
    description = "intersection of two overlapping disks: convex kinks"
    center1: tuple[float, float] = (0.0, 0.0)
    radius1: float = 0.501
    center2: tuple[float, float] = (0.4, 0.3)
    radius2: float = 0.401

    def phi(self, x, y):
        return np.maximum(_ball((x, y), self.center1, self.radius1),
                          _ball((x, y), self.center2, self.radius2))


@dataclass(frozen=True)
class Sphere3D:
    dim = 3
    description = "sphere of radius 0.501 about the origin"
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 0.501

    def phi(self, x, y, z):
        return _ball((x, y, z), self.center, self.radius)


@dataclass(frozen=True)
class Star3D:
    dim = 3
    description = "sphere with five-lobed ripple modulated along z"
    radius: float = 0.501
    amplitude: float = 0.15

    def phi(self, x, y, z):
        rsq = x ** 2 + y ** 2 + z ** 2
        mod = np.cos(0.5 * np.pi * z / self.radius)
        return np.sqrt(rsq) - self.radius - self.amplitude * _five_lobe(x, y, rsq) * mod


@dataclass(frozen=True)
class Union3D:
    dim = 3
    description = "union of two overlapping balls: concave kink curve"
    center1: tuple[float, float, float] = (-0.1, -0.3, -0.2)
    radius1: float = 0.501
    center2: tuple[float, float, float] = (0.2, 0.2, 0.1)
    radius2: float = 0.401

    def phi(self, x, y, z):
        return np.minimum(_ball((x, y, z), self.center1, self.radius1),
                          _ball((x, y, z), self.center2, self.radius2))


@dataclass(frozen=True)
class Intersection3D:
    dim = 3
    description = "intersection of two overlapping balls: convex kink curve"
    center1: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius1: float = 0.501
    center2: tuple[float, float, float] = (0.4, 0.3, 0.2)
    radius2: float = 0.401

    def phi(self, x, y, z):
        return np.maximum(_ball((x, y, z), self.center1, self.radius1),
                          _ball((x, y, z), self.center2, self.radius2))


SHAPES: dict[str, LevelSetShape] = {
    "disk2d": Disk2D(),
    "star2d": Star2D(),
    "union2d": Union2D(),
    "intersection2d": Intersection2D(),
    "sphere3d": Sphere3D(),
    "star3d": Star3D(),
    "union3d": Union3D(),
    "intersection3d": Intersection3D(),
}


def get_shape(key: str) -> LevelSetShape:
    try:
        return SHAPES[key]
    except KeyError:
        raise KeyError(f"unknown shape {key!r}; available: {sorted(SHAPES)}") from None


def compute_normals(phi: np.ndarray, grid: Grid, eps_factor: float = 1e-10
                    ) -> tuple[tuple[np.ndarray, ...], int]:
    """Unit outward normals n = grad(phi)/|grad(phi)| at every node.

    Nodes where |grad(phi)| < eps_factor * max(h) get a zero normal and
    are counted as degenerate; transport never moves them.  Returns the
    component tuple (math-axis order) and the degenerate-node count.
    """
    grads = central_gradient(phi, grid)
    mag = np.sqrt(sum(g * g for g in grads))
    eps = eps_factor * max(grid.h)
    degenerate = mag < eps
    safe = np.where(degenerate, 1.0, mag)
    normals = tuple(np.where(degenerate, 0.0, g / safe) for g in grads)
    return normals, int(np.count_nonzero(degenerate))


@dataclass(frozen=True)
class Masks:
    """Stage update masks as 0/1 uint8 node arrays.

    ``h_phi`` gates the field stage (nodes with phi > 0), ``h_grad`` the
    first-derivative stage and ``h_hess`` the second-derivative stage;
    the wider neighbourhood tests push derivative updates one ring
    further out so each stage has valid data upwind of it.
    """
    h_phi: np.ndarray
    h_grad: np.ndarray
    h_hess: np.ndarray


def _all_nonpositive(neg_padded: np.ndarray, offsets) -> np.ndarray:
    core = tuple(slice(1, -1) for _ in range(neg_padded.ndim))
    out = None
    for off in offsets:
        view = neg_padded[tuple(slice(1 + o, (-1 + o) or None) for o in off)]
        out = view.copy() if out is None else (out & view)
    assert out is not None
    return out


def build_masks(phi: np.ndarray, grid: Grid, neighbors_only: bool = False) -> Masks:
    """Update masks from the sign of phi over each node's neighbourhood.

    ``h_phi`` is one iff phi > 0 at the node.  ``h_grad`` is zero only
    where phi <= 0 at the node and all its 2*dim face neighbours;
    ``h_hess`` is zero only where phi <= 0 over the full 3^dim box.
    Neighbours outside the grid count as phi > 0, so box-face nodes are
    always updated.  With ``neighbors_only`` the node's own sign is left
    out of the ``h_grad``/``h_hess`` tests (A/B variant; identical on
    every shipped shape).
    """
    dim = grid.dim
    neg = phi <= 0.0
    negp = np.pad(neg, 1, mode="constant", constant_values=False)

    face_offsets = []
    for a in range(dim):
        for s in (-1, 1):
            off = [0] * dim
            off[a] = s
            face_offsets.append(tuple(off))
    box_offsets = [off for off in itertools.product((-1, 0, 1), repeat=dim)
                   if any(off)]
    if not neighbors_only:
        me = (0,) * dim
        face_offsets.append(me)
        box_offsets.append(me)

    h_phi = (~neg).astype(np.uint8)
    h_grad = (~_all_nonpositive(negp, face_offsets)).astype(np.uint8)
    h_hess = (~_all_nonpositive(negp, box_offsets)).astype(np.uint8)
    return Masks(h_phi=h_phi, h_grad=h_grad, h_hess=h_hess)


def band_mask(phi: np.ndarray, grid: Grid, width: float, mode: str = "exterior"
              ) -> np.ndarray:
    """Narrow-band node selector.

    ``exterior``: 0 < phi <= width (where extension errors are measured);
    ``two_sided``: |phi| <= width (where iteration residuals are watched).
    Warns if the band reaches the box faces, since one-sided closures
    there degrade the extension accuracy.
    """
    if mode == "exterior":
        band = (phi > 0.0) & (phi <= width)
    elif mode == "two_sided":
        band = np.abs(phi) <= width
    else:
        raise ValueError(f"mode must be 'exterior' or 'two_sided', got {mode!r}")
    if band.any():
        edge = np.zeros_like(band)
        for ax in range(band.ndim):
            sl = [slice(None)] * band.ndim
            sl[ax] = 0
            edge[tuple(sl)] = True
            sl[ax] = -1
            edge[tuple(sl)] = True
        if (band & edge).any():
            warnings.warn("narrow band touches the box boundary; results there "
                          "rely on one-sided closures", RuntimeWarning, stacklevel=2)
    return band
