"""relcrawl: simulation and analysis toolkit for soft contact-crawling models.

Mass-spring crawlers on a flat ground with a smoothed (regularized) contact
law: energies, equations of motion, adaptive integration with dense output,
translation/planar-motion symmetry reduction, equilibrium construction with a
robust-stability certificate, stroboscopic limit cycles, per-cycle advance
scaling studies, and a small-amplitude perturbation formula.  A command line
front end is available as ``relcrawl`` (see ``relcrawl --help``).
"""
from .backend import active as active_backend
from .errors import (
    AssumptionViolated,
    ChartDomain,
    ConfigError,
    ContinuationFailed,
    DegenerateConfiguration,
    NoConvergence,
    OutOfSpan,
    RelcrawlError,
    ScheduleDomain,
    SingularPeriodMap,
    StepSizeUnderflow,
)
from .integrate import IntegratorConfig, Trajectory, integrate, flow_map
from .model import (
    CrawlerParams,
    PhaseState,
    RestLengthSchedule,
    eom_rhs,
    make_rhs,
    schedule_eval,
    spring_lengths,
    total_energy,
    total_potential,
)
from .smoothing import SmoothingProfile, RAW_C1, chi, chi_prime
from .equilibrium import (
    StabilityReport,
    certify_stability,
    equilibrium_state,
    homotopy_equilibrium,
)
from .cycles import (
    CycleResult,
    ScalingRow,
    find_limit_cycle,
    first_order_response,
    check_first_order_shift,
    scaling_study,
    second_order_shift,
    settle_then_force,
    stroboscopic_map,
)
from .reduction import (
    SE2Element,
    act_r,
    act_se2,
    lift_state_2d,
    lift_state_3d,
    project_state_2d,
    project_state_3d,
)
from .presets import (
    DEFAULT_EPSILONS,
    default_params_2d,
    default_schedule_2d,
    demo_params_3d,
    demo_schedule_3d,
)

__version__ = "1.0.0"

__all__ = [
    "__version__",
    "active_backend",
    "AssumptionViolated",
    "ChartDomain",
    "ConfigError",
    "ContinuationFailed",
    "CrawlerParams",
    "CycleResult",
    "DEFAULT_EPSILONS",
    "DegenerateConfiguration",
    "IntegratorConfig",
    "NoConvergence",
    "OutOfSpan",
    "PhaseState",
    "RAW_C1",
    "RelcrawlError",
    "RestLengthSchedule",
    "SE2Element",
    "ScalingRow",
    "ScheduleDomain",
    "SingularPeriodMap",
    "SmoothingProfile",
    "StabilityReport",
    "StepSizeUnderflow",
    "Trajectory",
    "act_r",
    "act_se2",
    "certify_stability",
    "check_first_order_shift",
    "chi",
    "chi_prime",
    "default_params_2d",
    "default_schedule_2d",
    "demo_params_3d",
    "demo_schedule_3d",
    "eom_rhs",
    "equilibrium_state",
    "find_limit_cycle",
    "first_order_response",
    "flow_map",
    "homotopy_equilibrium",
    "integrate",
    "lift_state_2d",
    "lift_state_3d",
    "make_rhs",
    "project_state_2d",
    "project_state_3d",
    "scaling_study",
    "schedule_eval",
    "second_order_shift",
    "settle_then_force",
    "spring_lengths",
    "stroboscopic_map",
    "total_energy",
    "total_potential",
]
