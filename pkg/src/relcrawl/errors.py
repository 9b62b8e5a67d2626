"""Typed errors raised by the crawler toolkit.

Every failure mode that callers are expected to handle has its own class so
the CLI can map them onto exit codes (assumption/domain failures vs.
numerical failures) without string matching.
"""

__all__ = [
    "RelcrawlError",
    "DegenerateConfiguration",
    "ChartDomain",
    "ScheduleDomain",
    "AssumptionViolated",
    "ContinuationFailed",
    "NoConvergence",
    "StepSizeUnderflow",
    "OutOfSpan",
    "SingularPeriodMap",
    "ConfigError",
]


class RelcrawlError(Exception):
    """Base class for all toolkit errors."""


class DegenerateConfiguration(RelcrawlError):
    """Two particles closer than the minimum separation; forces undefined."""


class ChartDomain(RelcrawlError):
    """A quotient-chart operation was evaluated outside its branch domain."""


class ScheduleDomain(RelcrawlError):
    """Rest-length schedule produced invalid (non-finite) values."""


class AssumptionViolated(RelcrawlError):
    """Model assumptions fail (degenerate rest lengths, indefinite Hessian, ...)."""


class ContinuationFailed(RelcrawlError):
    """Equilibrium continuation exhausted its step-halving budget."""


class NoConvergence(RelcrawlError):
    """Fixed-point iteration exhausted its budget without meeting tolerance."""


class StepSizeUnderflow(RelcrawlError):
    """Adaptive integrator drove the step below the representable minimum."""


class OutOfSpan(RelcrawlError):
    """Dense-output sample requested outside the integrated time span."""


class SingularPeriodMap(RelcrawlError):
    """(I - monodromy) is singular; the periodic linear response is undefined."""


class ConfigError(RelcrawlError):
    """Malformed experiment configuration."""
