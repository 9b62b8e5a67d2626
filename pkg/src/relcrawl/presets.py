"""Canonical parameter sets and forcing schedules used in the experiments.

The planar defaults are the benchmark configuration: unit masses and
gravity, all stiffnesses and the spring/no-slip viscosities 10, the
vertical-impact viscosity 5, and an equilateral unit triangle of rest
lengths, driven by the sum-preserving harmonic schedule with unit period.
The spatial demo keeps the same constants on a regular tetrahedron and
drives three of the six springs asymmetrically so the recovered planar
motion visibly turns.
"""
from __future__ import annotations

from .model import CrawlerParams, RestLengthSchedule

__all__ = [
    "DEFAULT_EPSILONS",
    "default_params_2d",
    "default_schedule_2d",
    "demo_params_3d",
    "demo_schedule_3d",
]

DEFAULT_EPSILONS = (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125)

_DEMO3D_TABLE = (
    (),
    (),
    ((1, 1.0, 0.0),),
    (),
    ((1, 0.8, -2.1),),
    ((1, 0.6, -4.2),),
)


def default_params_2d(**overrides) -> CrawlerParams:
    """Benchmark planar constants (three unit masses, unit gravity)."""
    base = dict(
        kappa_s=10.0,
        nu_s=10.0,
        kappa_np=10.0,
        nu_ns=10.0,
        nu_db=5.0,
        rest_lengths=(1.0, 1.0, 1.0),
    )
    base.update(overrides)
    return CrawlerParams(**base)


def default_schedule_2d(epsilon: float = 0.0, **overrides) -> RestLengthSchedule:
    """Sum-preserving harmonic schedule on the unit triangle, period 1."""
    base = dict(base_lengths=(1.0, 1.0, 1.0), amplitude=float(epsilon))
    base.update(overrides)
    return RestLengthSchedule(**base)


def demo_params_3d(**overrides) -> CrawlerParams:
    """Spatial demo constants (regular unit tetrahedron)."""
    base = dict(
        kappa_s=10.0,
        nu_s=10.0,
        kappa_np=10.0,
        nu_ns=10.0,
        nu_db=5.0,
        rest_lengths=(1.0,) * 6,
    )
    base.update(overrides)
    return CrawlerParams(**base)


def demo_schedule_3d(epsilon: float = 0.25, **overrides) -> RestLengthSchedule:
    """Asymmetric three-leg harmonic drive for the spatial demo.

    The three apex legs get unit-frequency harmonics with staggered phases
    and unequal amplitudes, so the per-cycle shift has a nonzero rotation
    component.
    """
    base = dict(
        base_lengths=(1.0,) * 6,
        amplitude=float(epsilon),
        mode="user_table",
        table=_DEMO3D_TABLE,
    )
    base.update(overrides)
    return RestLengthSchedule(**base)
