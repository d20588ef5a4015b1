"""HTTP face of the package: every CLI verb maps onto one route here."""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..experiments import (
    MEASURE_BAND_FACTOR,
    convergence_study,
    get_field,
    default_field_for,
    run_single,
)
from ..extrapolation import ExtrapolationConfig
from ..geometry import SHAPES, band_mask, get_shape
from ..grid import Grid
from ..moving_domain import MovingObject, run_sweep_demo
from .models import (
    ConvergenceRequest,
    ConvergenceResponse,
    ConvergenceRowModel,
    ExtrapolateRequest,
    ExtrapolateResponse,
    GridInfo,
    HealthResponse,
    ShapeInfo,
    SolverKnobs,
    SweepDemoRequest,
    SweepDemoResponse,
    SweepStepModel,
)


def _config_from(req: SolverKnobs) -> ExtrapolationConfig:
    return ExtrapolationConfig(
        method=req.method, order=req.order, tol=req.tol,
        max_iters=req.max_iters, band_factor=req.band_factor,
        dtau_override=req.dtau_override, minmod_cache=req.minmod_cache,
        neighbors_only_masks=req.neighbors_only_masks)


def _grid_info(grid: Grid) -> GridInfo:
    return GridInfo(n=list(grid.n), lo=list(grid.lo), hi=list(grid.hi),
                    h=list(grid.h))


def _pad_stages(iterations) -> tuple[int, int, int]:
    """Right-align stage counts so the field stage is always stage 3."""
    its = tuple(int(v) for v in iterations)
    return (0,) * (3 - len(its)) + its


def create_app() -> FastAPI:
    app = FastAPI(title="bandext", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/shapes", response_model=list[ShapeInfo])
    def shapes() -> list[ShapeInfo]:
        return [ShapeInfo(key=key, dim=shape.dim, description=shape.description)
                for key, shape in sorted(SHAPES.items())]

    @app.post("/extrapolate", response_model=ExtrapolateResponse,
              response_model_exclude_none=True)
    def extrapolate_route(req: ExtrapolateRequest) -> ExtrapolateResponse:
        try:
            shape = get_shape(req.shape)
            field = (default_field_for(shape.dim) if req.field is None
                     else get_field(req.field))
            run = run_single(shape, field, req.n, _config_from(req),
                             timings=req.timings)
        except (KeyError, ValueError, RuntimeError) as exc:
            # RuntimeError covers request-induced failures such as a
            # CFL-violating dtau_override blowing up the iteration
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        fields = None
        if req.include_fields:
            err = np.abs(run.result.q_ext - run.q_exact)
            band = band_mask(run.phi, run.grid,
                             MEASURE_BAND_FACTOR * run.grid.diag)
            fields = {
                "phi": run.phi,
                "q_exact": run.q_exact,
                "q_extended": run.result.q_ext,
                "band_error": np.where(band, err, 0.0),
                "mask_phi": run.masks.h_phi.astype(np.float64),
                "mask_grad": run.masks.h_grad.astype(np.float64),
                "mask_hess": run.masks.h_hess.astype(np.float64),
            }
            fields = {k: [float(v) for v in arr.ravel()]
                      for k, arr in fields.items()}
        return ExtrapolateResponse(
            shape=req.shape, field=field.key, method=req.method,
            order=req.order, grid=_grid_info(run.grid), error=run.error,
            iterations_per_stage=list(run.result.iterations_per_stage),
            stage_names=list(run.result.stage_names),
            converged=run.result.converged,
            degenerate_normals=run.result.degenerate_normals,
            empty_band=run.result.empty_band, wall_ms=run.wall_ms,
            fields=fields)

    @app.post("/convergence", response_model=ConvergenceResponse)
    def convergence_route(req: ConvergenceRequest) -> ConvergenceResponse:
        try:
            report = convergence_study(req.shape, req.field, _config_from(req),
                                       req.resolutions, timings=req.timings,
                                       threads=req.threads)
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        pairwise = [None] + [float(v) for v in report.pairwise]
        rows = []
        for row, pw in zip(report.rows, pairwise):
            s1, s2, s3 = _pad_stages(row.iterations)
            rows.append(ConvergenceRowModel(
                n=row.n, h=row.h, error=row.error, pairwise_order=pw,
                iterations_stage1=s1, iterations_stage2=s2,
                iterations_stage3=s3, wall_ms=row.wall_ms,
                converged=row.converged))
        fitted = report.fitted_order
        return ConvergenceResponse(
            shape=report.shape, field=report.field, method=report.method,
            order=report.order, rows=rows,
            fitted_order=None if np.isnan(fitted) else float(fitted),
            all_converged=report.all_converged)

    @app.post("/sweep-demo", response_model=SweepDemoResponse)
    def sweep_demo_route(req: SweepDemoRequest) -> SweepDemoResponse:
        try:
            grid = Grid.box(req.n, dim=2)
            obj = MovingObject(kind=req.object_kind)
            result = run_sweep_demo(obj, grid, _config_from(req),
                                    factor=req.factor,
                                    diffusion=req.diffusion)
        except (KeyError, ValueError, RuntimeError) as exc:
            # e.g. a grid too coarse for the object, whose band then
            # touches the box boundary
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return SweepDemoResponse(
            object_kind=req.object_kind, method=req.method, order=req.order,
            n=req.n,
            steps=[SweepStepModel(step=s.step, t=s.t, dt=s.dt,
                                  uncovered=s.uncovered, error=s.error)
                   for s in result.steps],
            n_steps_total=result.n_steps_total,
            trajectory_max_error=result.trajectory_max_error)

    return app
