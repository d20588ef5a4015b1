"""Shared fixtures: memoized extrapolation runs so slow studies run once."""

from __future__ import annotations

import pytest

from bandext.experiments import convergence_study, run_single
from bandext.extrapolation import ExtrapolationConfig


class RunCache:
    """Memoizes single runs and sweeps across the whole session.

    Results are deterministic, so sharing them between the acceptance
    gate and module tests changes nothing but wall time.
    """

    def __init__(self):
        self._singles = {}
        self._studies = {}

    def single(self, shape, method, order, n, **kw):
        key = (shape, method, order, n, tuple(sorted(kw.items())))
        if key not in self._singles:
            cfg = ExtrapolationConfig(method=method, order=order, **kw)
            self._singles[key] = run_single(shape, None, n, cfg)
        return self._singles[key]

    def study(self, shape, method, order, resolutions, **kw):
        key = (shape, method, order, tuple(resolutions),
               tuple(sorted(kw.items())))
        if key not in self._studies:
            cfg = ExtrapolationConfig(method=method, order=order, **kw)
            self._studies[key] = convergence_study(
                shape, None, cfg, resolutions)
        return self._studies[key]


@pytest.fixture(scope="session")
def runs():
    return RunCache()
