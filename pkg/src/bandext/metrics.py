"""Error measurement and convergence-order estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import band_mask
from .grid import Grid

__all__ = ["band_linf_error", "pairwise_orders", "fit_order",
           "ConvergenceRow", "ConvergenceReport"]


def band_linf_error(q_num: np.ndarray,
                    exact: np.ndarray | Callable[..., np.ndarray],
                    phi: np.ndarray, grid: Grid, width: float,
                    mode: str = "exterior") -> float:
    """Max |q_num - exact| over the narrow band selected by phi and width.

    ``exact`` may be an array of node values or a callable of the node
    coordinates.  Raises if the band contains no nodes.
    """
    if callable(exact):
        exact_arr = grid.sample(exact)
    else:
        exact_arr = np.asarray(exact, dtype=np.float64)
    band = band_mask(phi, grid, width, mode=mode)
    if not band.any():
        raise ValueError(f"no nodes in {mode} band of width {width}")
    return float(np.max(np.abs(q_num[band] - exact_arr[band])))


def _check_rows(hs: Sequence[float], errors: Sequence[float]) -> None:
    if len(hs) != len(errors):
        raise ValueError("hs and errors must have the same length")
    if len(hs) < 2:
        raise ValueError("need at least two rows to estimate an order")
    if any(not e > 0 for e in errors):
        raise ValueError("errors must be strictly positive; drop exact or "
                         "failed rows before fitting")
    if any(not h > 0 for h in hs):
        raise ValueError("spacings must be strictly positive")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("rows must be sorted by strictly decreasing h")


def pairwise_orders(hs: Sequence[float], errors: Sequence[float]) -> list[float]:
    """Observed order for each adjacent row pair, log(e1/e2)/log(h1/h2).

    On node-centred grids a doubling of N does not exactly halve h, so
    the ratio of the actual spacings is used rather than assuming 2.
    """
    _check_rows(hs, errors)
    return [float(np.log(e1 / e2) / np.log(h1 / h2))
            for (h1, h2), (e1, e2) in zip(zip(hs, hs[1:]), zip(errors, errors[1:]))]


def fit_order(hs: Sequence[float], errors: Sequence[float]
              ) -> tuple[list[float], float]:
    """Pairwise orders plus the least-squares slope of log e vs log h."""
    pairwise = pairwise_orders(hs, errors)
    slope = np.polyfit(np.log(np.asarray(hs, dtype=np.float64)),
                       np.log(np.asarray(errors, dtype=np.float64)), 1)[0]
    return pairwise, float(slope)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    h: float
    error: float
    iterations: tuple[int, ...]
    converged: bool
    wall_ms: float


@dataclass(frozen=True)
class ConvergenceReport:
    shape: str
    field: str
    method: str
    order: str
    rows: tuple[ConvergenceRow, ...]  # sorted by decreasing h

    @property
    def pairwise(self) -> list[float]:
        return pairwise_orders([r.h for r in self.rows],
                               [r.error for r in self.rows])

    @property
    def fitted_order(self) -> float:
        """Least-squares order over converged rows; nan if fewer than two."""
        hs = [r.h for r in self.rows if r.converged]
        es = [r.error for r in self.rows if r.converged]
        if len(hs) < 2:
            return float("nan")
        return fit_order(hs, es)[1]

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.rows)
