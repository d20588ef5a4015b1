"""Narrow-band extrapolation of scalar fields across level-set interfaces."""

__version__ = "0.1.0"

from .extrapolation import (
    ExtrapolationConfig,
    ExtrapolationResult,
    extrapolate,
    nd_normal_derivatives,
    residual,
)
from .geometry import SHAPES, band_mask, build_masks, compute_normals, get_shape
from .grid import Grid
from .metrics import (
    ConvergenceReport,
    ConvergenceRow,
    band_linf_error,
    fit_order,
    pairwise_orders,
)
from .moving_domain import (
    HeatSolution,
    MovingObject,
    RigidMotion,
    run_sweep_demo,
)

__all__ = [
    "__version__",
    "Grid",
    "SHAPES",
    "get_shape",
    "band_mask",
    "build_masks",
    "compute_normals",
    "ExtrapolationConfig",
    "ExtrapolationResult",
    "extrapolate",
    "nd_normal_derivatives",
    "residual",
    "band_linf_error",
    "fit_order",
    "pairwise_orders",
    "ConvergenceRow",
    "ConvergenceReport",
    "HeatSolution",
    "MovingObject",
    "RigidMotion",
    "run_sweep_demo",
]
