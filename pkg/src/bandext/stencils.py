"""Finite-difference kernels: central derivatives, minmod, upwind transport.

All kernels run on whole node arrays (shape ``grid.shape``).  Central
derivatives are second-order: three-point centred stencils in the
interior with one-sided three/four-point closures at box faces.  The
upwind kernels assemble ``sum_a n_a D_a f`` with per-axis one-sided
differences chosen against the sign of ``n_a``; a node whose upwind
neighbour would fall outside the box contributes zero for that axis.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, nd_axis, tensor_components

__all__ = [
    "minmod",
    "central_gradient",
    "central_hessian",
    "upwind_first",
    "upwind_second_minmod",
]


def minmod(a, b):
    """Slope limiter: 0 on sign disagreement, else the smaller-magnitude arg."""
    a_arr = np.asarray(a, dtype=np.float64)
    b_arr = np.asarray(b, dtype=np.float64)
    # explicit sign test: a*b would underflow to 0 for tiny same-sign pairs
    same_sign = ((a_arr > 0.0) & (b_arr > 0.0)) | ((a_arr < 0.0) & (b_arr < 0.0))
    out = np.where(same_sign,
                   np.where(np.abs(a_arr) <= np.abs(b_arr), a_arr, b_arr), 0.0)
    if np.isscalar(a) and np.isscalar(b):
        return float(out)
    return out


def _axis_slices(ndim: int, ax: int):
    def sl(s):
        return tuple(s if i == ax else slice(None) for i in range(ndim))
    return sl


def _d1(f: np.ndarray, h: float, ax: int) -> np.ndarray:
    """Centred first derivative along array axis ``ax``, one-sided at faces."""
    sl = _axis_slices(f.ndim, ax)
    out = np.empty_like(f)
    out[sl(slice(1, -1))] = (f[sl(slice(2, None))] - f[sl(slice(None, -2))]) / (2.0 * h)
    out[sl(0)] = (-3.0 * f[sl(0)] + 4.0 * f[sl(1)] - f[sl(2)]) / (2.0 * h)
    out[sl(-1)] = (3.0 * f[sl(-1)] - 4.0 * f[sl(-2)] + f[sl(-3)]) / (2.0 * h)
    return out


def _d2(f: np.ndarray, h: float, ax: int) -> np.ndarray:
    """Centred second derivative along array axis ``ax``, one-sided at faces."""
    sl = _axis_slices(f.ndim, ax)
    h2 = h * h
    out = np.empty_like(f)
    out[sl(slice(1, -1))] = (f[sl(slice(2, None))] - 2.0 * f[sl(slice(1, -1))]
                             + f[sl(slice(None, -2))]) / h2
    out[sl(0)] = (2.0 * f[sl(0)] - 5.0 * f[sl(1)] + 4.0 * f[sl(2)] - f[sl(3)]) / h2
    out[sl(-1)] = (2.0 * f[sl(-1)] - 5.0 * f[sl(-2)] + 4.0 * f[sl(-3)] - f[sl(-4)]) / h2
    return out


def central_gradient(f: np.ndarray, grid: Grid) -> tuple[np.ndarray, ...]:
    """Gradient components (f_x, f_y[, f_z]) in math-axis order."""
    h = grid.h
    return tuple(_d1(f, h[a], nd_axis(grid.dim, a)) for a in range(grid.dim))


def central_hessian(f: np.ndarray, grid: Grid) -> dict[tuple[int, int], np.ndarray]:
    """Upper-triangle second derivatives keyed by math-axis pair (a, b), a <= b.

    Mixed components compose the two one-dimensional first-derivative
    operators, which reduces to the four-corner cross stencil at interior
    nodes.
    """
    h = grid.h
    dim = grid.dim
    out: dict[tuple[int, int], np.ndarray] = {}
    for a, b in tensor_components(dim):
        if a == b:
            out[(a, b)] = _d2(f, h[a], nd_axis(dim, a))
        else:
            out[(a, b)] = _d1(_d1(f, h[a], nd_axis(dim, a)), h[b], nd_axis(dim, b))
    return out


def _padded(f: np.ndarray, pad: np.ndarray | None) -> np.ndarray:
    """Edge-replicated one-node pad of ``f``, written into ``pad`` if given."""
    if pad is None:
        return np.pad(f, 1, mode="edge")
    core = tuple(slice(1, -1) for _ in range(f.ndim))
    pad[core] = f
    _fill_pad_ring(pad)
    return pad


def _fill_pad_ring(p: np.ndarray) -> None:
    for ax in range(p.ndim):
        sl = _axis_slices(p.ndim, ax)
        p[sl(0)] = p[sl(1)]
        p[sl(-1)] = p[sl(-2)]


def upwind_coefficients(normals: tuple[np.ndarray, ...], grid: Grid
                        ) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-axis upwind weights (max(n_a,0), min(n_a,0)).

    The weight pointing out of the box is zeroed on the corresponding
    face, which drops the whole axis term at nodes missing their upwind
    neighbour.
    """
    dim = grid.dim
    out = []
    for a in range(dim):
        ax = nd_axis(dim, a)
        sl = _axis_slices(dim, ax)
        cm = np.maximum(normals[a], 0.0)
        cp = np.minimum(normals[a], 0.0)
        cm[sl(0)] = 0.0
        cp[sl(-1)] = 0.0
        out.append((cm, cp))
    return out


def _shifted_views(p: np.ndarray, ax: int):
    """(backward, forward) neighbour views of the core of padded array ``p``."""
    ndim = p.ndim
    core = [slice(1, -1)] * ndim
    bwd = list(core)
    fwd = list(core)
    bwd[ax] = slice(0, -2)
    fwd[ax] = slice(2, None)
    return p[tuple(bwd)], p[tuple(fwd)]


def upwind_first(f: np.ndarray, normals: tuple[np.ndarray, ...], grid: Grid,
                 coeffs=None, out: np.ndarray | None = None,
                 pad: np.ndarray | None = None) -> np.ndarray:
    """First-order upwind transport term ``sum_a n_a D_a f``."""
    dim = grid.dim
    h = grid.h
    if coeffs is None:
        coeffs = upwind_coefficients(normals, grid)
    p = _padded(np.asarray(f, dtype=np.float64), pad)
    if out is None:
        out = np.zeros_like(f, dtype=np.float64)
    else:
        out.fill(0.0)
    for a in range(dim):
        ax = nd_axis(dim, a)
        am, ap = _shifted_views(p, ax)
        cm, cp = coeffs[a]
        out += cm * ((f - am) / h[a])
        out += cp * ((ap - f) / h[a])
    return out


def minmod_corrections(seconds: tuple[np.ndarray, ...], grid: Grid,
                       spads: list[np.ndarray] | None = None
                       ) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-axis (backward, forward) minmod terms from pure second derivatives.

    ``seconds[a]`` is the second derivative of the transported field along
    math axis ``a``; the backward term pairs each node with its ``a-``
    neighbour, the forward term with its ``a+`` neighbour.
    """
    dim = grid.dim
    out = []
    for a in range(dim):
        ax = nd_axis(dim, a)
        pad = None if spads is None else spads[a]
        sp = _padded(np.asarray(seconds[a], dtype=np.float64), pad)
        sm, s_fwd = _shifted_views(sp, ax)
        s = seconds[a]
        out.append((minmod(s, sm), minmod(s, s_fwd)))
    return out


def upwind_second_minmod(f: np.ndarray, seconds: tuple[np.ndarray, ...],
                         normals: tuple[np.ndarray, ...], grid: Grid,
                         coeffs=None, corrections=None,
                         out: np.ndarray | None = None,
                         pad: np.ndarray | None = None,
                         spads: list[np.ndarray] | None = None) -> np.ndarray:
    """Second-order upwind transport with minmod-limited corrections.

    For ``n_a > 0`` the axis term is
    ``n_a ((f_i - f_{i-1})/h + (h/2) minmod(s_i, s_{i-1}))`` and for
    ``n_a < 0`` it mirrors with the forward difference and a minus on the
    correction; ``s`` is the pure second derivative along the axis.
    Precomputed ``corrections`` (as from :func:`minmod_corrections`) let a
    caller freeze the limited terms across iterations.
    """
    dim = grid.dim
    h = grid.h
    if coeffs is None:
        coeffs = upwind_coefficients(normals, grid)
    if corrections is None:
        corrections = minmod_corrections(seconds, grid, spads)
    p = _padded(np.asarray(f, dtype=np.float64), pad)
    if out is None:
        out = np.zeros_like(f, dtype=np.float64)
    else:
        out.fill(0.0)
    for a in range(dim):
        ax = nd_axis(dim, a)
        am, ap = _shifted_views(p, ax)
        cm, cp = coeffs[a]
        corr_m, corr_p = corrections[a]
        out += cm * ((f - am) / h[a] + (0.5 * h[a]) * corr_m)
        out += cp * ((ap - f) / h[a] - (0.5 * h[a]) * corr_p)
    return out
