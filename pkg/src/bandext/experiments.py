"""Convergence studies and single extrapolation runs over shipped shapes."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .extrapolation import ExtrapolationConfig, ExtrapolationResult, extrapolate
from .geometry import SHAPES, LevelSetShape, Masks, build_masks, get_shape
from .grid import Grid
from .metrics import ConvergenceReport, ConvergenceRow, band_linf_error

__all__ = [
    "TestField", "TEST_FIELDS", "get_field", "default_field_for",
    "SingleRun", "run_single",
    "ConvergenceRow", "ConvergenceReport", "convergence_study",
    "MEASURE_BAND_FACTOR", "thread_count",
]

# The error protocol measures over the exterior band of two cell diagonals.
MEASURE_BAND_FACTOR = 2.0


@dataclass(frozen=True)
class TestField:
    key: str
    dim: int
    fn: Callable[..., np.ndarray]
    description: str


def _sincos2d(x, y):
    return np.sin(np.pi * x) * np.cos(np.pi * y)


def _sincosexp3d(x, y, z):
    return np.sin(np.pi * x) * np.cos(np.pi * y) * np.exp(z)


TEST_FIELDS: dict[str, TestField] = {
    "sincos2d": TestField("sincos2d", 2, _sincos2d, "sin(pi x) cos(pi y)"),
    "sincosexp3d": TestField("sincosexp3d", 3, _sincosexp3d,
                             "sin(pi x) cos(pi y) exp(z)"),
}


def get_field(key: str) -> TestField:
    try:
        return TEST_FIELDS[key]
    except KeyError:
        raise KeyError(f"unknown field {key!r}; available: {sorted(TEST_FIELDS)}"
                       ) from None


def default_field_for(dim: int) -> TestField:
    return TEST_FIELDS["sincos2d" if dim == 2 else "sincosexp3d"]


def thread_count(env: str = "BANDEXT_THREADS") -> int:
    """Worker count for sweeping resolutions, from the environment (min 1)."""
    raw = os.environ.get(env, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class SingleRun:
    """One shape/field/resolution extrapolation with its error and inputs."""
    grid: Grid
    phi: np.ndarray
    q_exact: np.ndarray
    result: ExtrapolationResult
    masks: Masks
    error: float
    wall_ms: float


def run_single(shape: LevelSetShape | str, field: TestField | str | None,
               n: int, cfg: ExtrapolationConfig,
               timings: bool = False) -> SingleRun:
    """Sample, zero the unknown region, extrapolate, and measure.

    ``field`` defaults to the dimension's standard test field.
    ``wall_ms`` is 0 unless ``timings`` is set, keeping outputs that
    embed it byte-reproducible by default.
    """
    if isinstance(shape, str):
        shape = get_shape(shape)
    if field is None:
        field = default_field_for(shape.dim)
    elif isinstance(field, str):
        field = get_field(field)
    if field.dim != shape.dim:
        raise ValueError(f"field {field.key!r} is {field.dim}D but shape "
                         f"is {shape.dim}D")
    t0 = time.perf_counter()
    grid = Grid.box(n, dim=shape.dim)
    phi = grid.sample(shape.phi)
    q_exact = grid.sample(field.fn)
    q0 = np.where(phi > 0.0, 0.0, q_exact)
    result = extrapolate(q0, phi, grid, cfg)
    error = band_linf_error(result.q_ext, q_exact, phi, grid,
                            MEASURE_BAND_FACTOR * grid.diag)
    wall_ms = (time.perf_counter() - t0) * 1e3 if timings else 0.0
    masks = build_masks(phi, grid, neighbors_only=cfg.neighbors_only_masks)
    return SingleRun(grid=grid, phi=phi, q_exact=q_exact, result=result,
                     masks=masks, error=error, wall_ms=wall_ms)


def _validate_resolutions(resolutions: Sequence[int]) -> list[int]:
    res = [int(n) for n in resolutions]
    if not res:
        raise ValueError("need at least one resolution")
    if any(n < 32 for n in res):
        raise ValueError(f"resolutions must be >= 32, got {res}")
    if any(b <= a for a, b in zip(res, res[1:])):
        raise ValueError(f"resolutions must be strictly increasing, got {res}")
    return res


def convergence_study(shape: LevelSetShape | str, field: TestField | str | None,
                      cfg: ExtrapolationConfig, resolutions: Sequence[int],
                      timings: bool = False, threads: int | None = None
                      ) -> ConvergenceReport:
    """Run the shape/field pair over a resolution sweep.

    Resolutions may be processed by a thread pool (``threads`` > 1, or the
    BANDEXT_THREADS environment variable); rows are always assembled in
    sweep order so the report is independent of scheduling.
    """
    shape_obj = get_shape(shape) if isinstance(shape, str) else shape
    if field is None:
        field_obj = default_field_for(shape_obj.dim)
    else:
        field_obj = get_field(field) if isinstance(field, str) else field
    res = _validate_resolutions(resolutions)
    workers = thread_count() if threads is None else max(1, threads)

    def one(n: int) -> ConvergenceRow:
        run = run_single(shape_obj, field_obj, n, cfg, timings=timings)
        return ConvergenceRow(n=n, h=run.grid.min_h, error=run.error,
                              iterations=tuple(run.result.iterations_per_stage),
                              converged=run.result.converged,
                              wall_ms=run.wall_ms)

    if workers > 1 and len(res) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(one, res))
    else:
        rows = tuple(one(n) for n in res)

    shape_key = next((k for k, v in SHAPES.items() if v is shape_obj),
                     shape if isinstance(shape, str) else "custom")
    return ConvergenceReport(shape=shape_key, field=field_obj.key,
                             method=cfg.method, order=cfg.order, rows=rows)
