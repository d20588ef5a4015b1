"""Pseudo-time extrapolation of node fields across a level-set interface.

Both methods advance stages of the transport equation
``df/dtau + H * (n . grad f - src) = 0`` to steady state with forward
Euler and upwind differencing, highest derivative first:

* ``nd`` extends the normal derivatives: q_nn, then q_n (sourced by the
  extended q_nn), then q itself (sourced by the extended q_n).
* ``wcd`` extends Cartesian derivatives: the second-derivative tensor
  components, then the gradient components (sourced by the contracted
  tensor), then q (sourced by ``n . grad_ext q``); the normal enters only
  as a weight.

At quadratic order the field stage uses minmod-limited second-order
upwinding.  ``wcd`` draws the limiter's second derivatives from the
already-extended tensor diagonal, so they are frozen for the whole
stage; ``nd`` has no extended Cartesian tensor and must rebuild them
from the evolving field every iteration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import band_mask, build_masks, compute_normals
from .grid import Grid, tensor_components
from .stencils import (
    _d2,
    central_gradient,
    central_hessian,
    minmod_corrections,
    upwind_coefficients,
    upwind_first,
    upwind_second_minmod,
)
from .grid import nd_axis

__all__ = [
    "ExtrapolationConfig",
    "ExtrapolationResult",
    "nd_normal_derivatives",
    "residual",
    "extrapolate",
]

METHODS = ("nd", "wcd")
ORDERS = ("constant", "linear", "quadratic")


@dataclass(frozen=True)
class ExtrapolationConfig:
    """Knobs for one extrapolation run.

    ``band_factor`` sizes the two-sided stopping band in cell diagonals;
    iteration residuals are only watched there.  ``minmod_cache`` (wcd
    quadratic only) stores the limited correction terms once instead of
    recomputing them each sweep -- either way they come from the same
    frozen extended tensor diagonal.  ``neighbors_only_masks`` drops the
    node itself from the mask neighbourhood tests.
    """

    method: str = "wcd"
    order: str = "quadratic"
    tol: float = 1e-12
    max_iters: int = 2000
    band_factor: float = 2.0
    dtau_override: float | None = None
    minmod_cache: bool = True
    neighbors_only_masks: bool = False
    record_residuals: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.band_factor > 0:
            raise ValueError("band_factor must be positive")
        if self.dtau_override is not None and not self.dtau_override > 0:
            raise ValueError("dtau_override must be positive when given")


@dataclass
class ExtrapolationResult:
    q_ext: np.ndarray
    iterations_per_stage: list[int]
    stage_names: list[str]
    converged: bool
    residual_history: list[list[float]] | None
    degenerate_normals: int
    empty_band: bool


def nd_normal_derivatives(q: np.ndarray, normals: Sequence[np.ndarray],
                          grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Directional derivatives (q_n, q_nn) of q along the normal field.

    ``q_n = n . grad q`` and, since n varies in space,
    ``q_nn = n . (grad grad q) . n + (n . grad n) . grad q``.
    """
    dim = grid.dim
    grads = central_gradient(q, grid)
    hess = central_hessian(q, grid)
    q_n = sum(normals[a] * grads[a] for a in range(dim))
    q_nn = np.zeros_like(q)
    for a in range(dim):
        q_nn += normals[a] ** 2 * hess[(a, a)]
    for a in range(dim):
        for b in range(a + 1, dim):
            q_nn += 2.0 * normals[a] * normals[b] * hess[(a, b)]
    for b in range(dim):
        dn_b = central_gradient(normals[b], grid)
        advect = sum(normals[a] * dn_b[a] for a in range(dim))
        q_nn += advect * grads[b]
    return q_n, q_nn


def residual(prev: np.ndarray, nxt: np.ndarray, band: np.ndarray) -> float:
    """Max |nxt - prev| over the nodes where band is nonzero.

    An empty band makes the max vacuous; it is defined as 0 and flagged
    with a warning because stopping tests against it are meaningless.
    """
    prev = np.asarray(prev, dtype=np.float64)
    nxt = np.asarray(nxt, dtype=np.float64)
    if prev.shape != nxt.shape or prev.shape != band.shape:
        raise ValueError("prev, nxt and band must share one grid shape")
    sel = np.asarray(band) != 0
    if not sel.any():
        warnings.warn("residual over an empty band is vacuously 0",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    return float(np.max(np.abs(nxt[sel] - prev[sel])))


class _StageRunner:
    """Shared buffers and the Jacobi sweep loop for one extrapolation."""

    def __init__(self, grid: Grid, normals, band01: np.ndarray, dtau: float,
                 cfg: ExtrapolationConfig):
        self.grid = grid
        self.normals = normals
        self.band01 = band01
        self.dtau = dtau
        self.cfg = cfg
        self.coeffs = upwind_coefficients(normals, grid)
        shape = grid.shape
        padded = tuple(s + 2 for s in shape)
        self.pad = np.empty(padded)
        self.spads = [np.empty(padded) for _ in range(grid.dim)]
        self.adv = np.empty(shape)
        self.diff = np.empty(shape)
        self.seconds_buf = [np.empty(shape) for _ in range(grid.dim)]

    def run_stage(self, name: str, fields: list[np.ndarray],
                  sources: list[np.ndarray | None], mask: np.ndarray,
                  scheme: str, seconds: tuple[np.ndarray, ...] | None = None,
                  ) -> tuple[list[np.ndarray], int, bool, list[float]]:
        grid = self.grid
        cfg = self.cfg
        dmask = self.dtau * mask.astype(np.float64)
        cur = [np.asarray(f, dtype=np.float64) for f in fields]
        nxt = [np.empty_like(f) for f in cur]
        history: list[float] = []

        static_corr = None
        if scheme == "minmod_static" and cfg.minmod_cache:
            static_corr = minmod_corrections(seconds, grid, self.spads)

        # a diverging iteration is reported via RuntimeError below, so the
        # intermediate overflow warnings numpy would emit are redundant
        with np.errstate(over="ignore", invalid="ignore"):
            return self._iterate(name, cur, nxt, sources, dmask, scheme,
                                 static_corr, seconds, history)

    def _iterate(self, name, cur, nxt, sources, dmask, scheme, static_corr,
                 seconds, history):
        grid = self.grid
        cfg = self.cfg
        iters = 0
        converged = False
        for k in range(1, cfg.max_iters + 1):
            iters = k
            field_residuals = []
            for f, s, out in zip(cur, sources, nxt):
                if scheme == "first":
                    self.adv = upwind_first(f, self.normals, grid,
                                            coeffs=self.coeffs, out=self.adv,
                                            pad=self.pad)
                elif scheme == "minmod_static":
                    corr = static_corr
                    if corr is None:
                        corr = minmod_corrections(seconds, grid, self.spads)
                    self.adv = upwind_second_minmod(
                        f, seconds, self.normals, grid, coeffs=self.coeffs,
                        corrections=corr, out=self.adv, pad=self.pad)
                elif scheme == "minmod_live":
                    live = self._live_seconds(f)
                    corr = minmod_corrections(live, grid, self.spads)
                    self.adv = upwind_second_minmod(
                        f, live, self.normals, grid, coeffs=self.coeffs,
                        corrections=corr, out=self.adv, pad=self.pad)
                else:  # pragma: no cover - internal scheme names only
                    raise ValueError(f"unknown scheme {scheme!r}")
                if s is not None:
                    self.adv -= s
                self.adv *= dmask
                np.subtract(f, self.adv, out=out)
                np.subtract(out, f, out=self.diff)
                np.abs(self.diff, out=self.diff)
                self.diff *= self.band01
                field_residuals.append(self.diff.max())
            # np.max propagates NaN, so a poisoned band cannot look converged
            residual = float(np.max(field_residuals))
            if not np.isfinite(residual):
                raise RuntimeError(
                    f"non-finite values in stage '{name}' at iteration {k}")
            if cfg.record_residuals:
                history.append(residual)
            cur, nxt = nxt, cur
            if residual <= cfg.tol:
                converged = True
                break
        for f in cur:
            if not np.isfinite(f).all():
                raise RuntimeError(
                    f"non-finite values in stage '{name}' at iteration {iters}")
        return cur, iters, converged, history

    def _live_seconds(self, f: np.ndarray) -> tuple[np.ndarray, ...]:
        grid = self.grid
        out = []
        for a in range(grid.dim):
            buf = self.seconds_buf[a]
            buf[...] = _d2(f, grid.h[a], nd_axis(grid.dim, a))
            out.append(buf)
        return tuple(out)


def extrapolate(q: np.ndarray, phi: np.ndarray, grid: Grid,
                cfg: ExtrapolationConfig | None = None) -> ExtrapolationResult:
    """Extend q from the region phi <= 0 across the interface.

    The input q supplies both the interior data and the initial guess
    outside; callers normally zero it where phi > 0.  Auxiliary
    derivative fields are seeded from central differences of q and zeroed
    wherever their stage updates them.
    """
    cfg = cfg or ExtrapolationConfig()
    q = np.array(q, dtype=np.float64, copy=True)
    phi = np.asarray(phi, dtype=np.float64)
    if q.shape != grid.shape or phi.shape != grid.shape:
        raise ValueError(
            f"q and phi must have grid shape {grid.shape}, "
            f"got {q.shape} and {phi.shape}")

    dim = grid.dim
    normals, n_degenerate = compute_normals(phi, grid)
    masks = build_masks(phi, grid, neighbors_only=cfg.neighbors_only_masks)
    band = band_mask(phi, grid, cfg.band_factor * grid.diag, mode="two_sided")
    empty_band = not bool(band.any())
    if empty_band:
        warnings.warn("stopping band is empty; residuals are trivially zero",
                      RuntimeWarning, stacklevel=2)
    band01 = band.astype(np.float64)

    if cfg.dtau_override is not None:
        dtau = cfg.dtau_override
    else:
        dtau = grid.min_h / (2.0 if dim == 2 else 3.0)

    runner = _StageRunner(grid, normals, band01, dtau, cfg)
    names: list[str] = []
    iterations: list[int] = []
    histories: list[list[float]] = []
    all_converged = True

    def run(name, fields, sources, mask, scheme, seconds=None):
        nonlocal all_converged
        out, iters, ok, hist = runner.run_stage(name, fields, sources, mask,
                                                scheme, seconds)
        names.append(name)
        iterations.append(iters)
        histories.append(hist)
        all_converged = all_converged and ok
        return out

    if cfg.order == "constant":
        (q_ext,) = run("field", [q], [None], masks.h_phi, "first")
    elif cfg.method == "nd":
        q_n0, q_nn0 = nd_normal_derivatives(q, normals, grid)
        if cfg.order == "quadratic":
            (q_nn,) = run("second-normal-derivative",
                          [q_nn0 * (1 - masks.h_hess)], [None],
                          masks.h_hess, "first")
            (q_n,) = run("normal-derivative", [q_n0 * (1 - masks.h_grad)],
                         [q_nn], masks.h_grad, "first")
            (q_ext,) = run("field", [q], [q_n], masks.h_phi, "minmod_live")
        else:
            (q_n,) = run("normal-derivative", [q_n0 * (1 - masks.h_grad)],
                         [None], masks.h_grad, "first")
            (q_ext,) = run("field", [q], [q_n], masks.h_phi, "first")
    else:  # wcd
        if cfg.order == "quadratic":
            comps = tensor_components(dim)
            hess = central_hessian(q, grid)
            t_fields = [hess[c] * (1 - masks.h_hess) for c in comps]
            t_ext = run("second-derivatives", t_fields, [None] * len(comps),
                        masks.h_hess, "first")
            tensor = dict(zip(comps, t_ext))

            def t_at(a, b):
                return tensor[(a, b) if a <= b else (b, a)]

            g_fields = [g * (1 - masks.h_grad) for g in central_gradient(q, grid)]
            g_sources = [sum(normals[b] * t_at(a, b) for b in range(dim))
                         for a in range(dim)]
            g_ext = run("gradient", g_fields, g_sources, masks.h_grad, "first")
            src = sum(normals[a] * g_ext[a] for a in range(dim))
            seconds = tuple(tensor[(a, a)] for a in range(dim))
            (q_ext,) = run("field", [q], [src], masks.h_phi, "minmod_static",
                           seconds=seconds)
        else:
            g_fields = [g * (1 - masks.h_grad) for g in central_gradient(q, grid)]
            g_ext = run("gradient", g_fields, [None] * dim, masks.h_grad, "first")
            src = sum(normals[a] * g_ext[a] for a in range(dim))
            (q_ext,) = run("field", [q], [src], masks.h_phi, "first")

    return ExtrapolationResult(
        q_ext=q_ext,
        iterations_per_stage=iterations,
        stage_names=names,
        converged=all_converged,
        residual_history=histories if cfg.record_residuals else None,
        degenerate_normals=n_degenerate,
        empty_band=empty_band,
    )
