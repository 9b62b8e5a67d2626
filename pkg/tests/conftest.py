"""Shared fixtures: benchmark parameters and expensive session-scoped runs."""
from __future__ import annotations

import time

import numpy as np
import pytest

from relcrawl.cycles import find_limit_cycle, first_order_response, scaling_study
from relcrawl.equilibrium import certify_stability, homotopy_equilibrium
from relcrawl.presets import (
    DEFAULT_EPSILONS,
    default_params_2d,
    default_schedule_2d,
    demo_params_3d,
    demo_schedule_3d,
)


@pytest.fixture(scope="session")
def params2d():
    return default_params_2d()


@pytest.fixture(scope="session")
def schedule2d():
    return default_schedule_2d()


@pytest.fixture(scope="session")
def params3d():
    return demo_params_3d()


@pytest.fixture(scope="session")
def schedule3d():
    return demo_schedule_3d()


@pytest.fixture(scope="session")
def eq_point_2d(params2d):
    return homotopy_equilibrium(params2d)


@pytest.fixture(scope="session")
def eq_point_3d(params3d):
    return homotopy_equilibrium(params3d)


@pytest.fixture(scope="session")
def report_2d(params2d):
    return certify_stability(params2d)


@pytest.fixture(scope="session")
def cycle_05(params2d, schedule2d):
    """Converged benchmark cycle at amplitude 1/2."""
    return find_limit_cycle(0.5, schedule2d, params2d)


@pytest.fixture(scope="session")
def timings():
    """Wall-clock durations of the expensive session fixtures, by name."""
    return {}


@pytest.fixture(scope="session")
def cycle_3d(params3d, schedule3d, timings):
    """Converged spatial demo cycle at amplitude 1/4."""
    start = time.perf_counter()
    cycle = find_limit_cycle(0.25, schedule3d, params3d)
    timings["cycle_3d"] = time.perf_counter() - start
    return cycle


@pytest.fixture(scope="session")
def sweep_rows(params2d, schedule2d, timings):
    """Full benchmark amplitude sweep (the quantitative acceptance basis)."""
    start = time.perf_counter()
    rows = scaling_study(DEFAULT_EPSILONS, schedule2d, params2d)
    timings["sweep"] = time.perf_counter() - start
    return rows


@pytest.fixture(scope="session")
def response_2d(params2d, schedule2d):
    return first_order_response(schedule2d, params2d)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260814)
