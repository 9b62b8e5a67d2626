"""Contact-regularization profile and derivatives.

Ground interaction is regularized through a scalar profile ``chi`` that
vanishes above ground and grows like x**2/2 below it.  Two variants:

* ``raw_c1``: chi(x) = x**2/2 for x < 0, else 0.  C^1 (the second derivative
  jumps at 0), which an adaptive error-controlled integrator handles by
  shrinking steps near crossings.
* ``mollified``: a C^2 quintic-smoothstep blend on (-width, width) that
  agrees exactly with ``raw_c1`` outside that interval.  The width should be
  kept well below the equilibrium ground-penetration depth so the rest state
  is unaffected.

All functions are pure, accept scalars or numpy arrays, and are safe for
concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SmoothingProfile",
    "RAW_C1",
    "chi",
    "chi_prime",
    "chi_double_prime",
]

_KINDS = ("raw_c1", "mollified")


@dataclass(frozen=True)
class SmoothingProfile:
    """Selects the contact-regularization variant.

    Parameters
    ----------
    kind : {"raw_c1", "mollified"}
        Profile family.
    mollifier_width : float
        Half-width of the blending interval; used only by ``mollified``.
        Must be positive.
    """

    kind: str = "raw_c1"
    mollifier_width: float = 1e-3

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {_KINDS}")
        if not (self.mollifier_width > 0.0):
            raise ValueError("mollifier_width must be > 0")


RAW_C1 = SmoothingProfile("raw_c1")


def _smoothstep(u):
    """Quintic smoothstep s with s(0)=0, s(1)=1 and s'=s''=0 at both ends."""
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _smoothstep_prime(u):
    return 30.0 * u * u * (1.0 - u) * (1.0 - u)


def _smoothstep_double_prime(u):
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def chi(x, profile: SmoothingProfile = RAW_C1):
    """Regularization profile value.

    ``raw_c1`` returns x**2/2 for x < 0, else 0.  ``mollified`` returns the
    C^2 blend, identical to ``raw_c1`` outside (-width, width).  The value is
    nonnegative everywhere and non-increasing on (-inf, 0].
    """
    arr, scalar = _as_array(x)
    if profile.kind == "raw_c1":
        out = np.where(arr < 0.0, 0.5 * arr * arr, 0.0)
    else:
        w = profile.mollifier_width
        u = np.clip((arr + w) / (2.0 * w), 0.0, 1.0)
        out = (1.0 - _smoothstep(u)) * 0.5 * arr * arr
        out = np.where(arr <= -w, 0.5 * arr * arr, out)
        out = np.where(arr >= w, 0.0, out)
    return float(out) if scalar else out


def chi_prime(x, profile: SmoothingProfile = RAW_C1):
    """First derivative of :func:`chi`.  Returns 0 at x = 0 for both variants."""
    arr, scalar = _as_array(x)
    if profile.kind == "raw_c1":
        out = np.where(arr < 0.0, arr, 0.0)
    else:
        w = profile.mollifier_width
        u = np.clip((arr + w) / (2.0 * w), 0.0, 1.0)
        s = _smoothstep(u)
        sp = _smoothstep_prime(u)
        out = (1.0 - s) * arr - sp / (2.0 * w) * 0.5 * arr * arr
        out = np.where(arr <= -w, arr, out)
        out = np.where(arr >= w, 0.0, out)
    return float(out) if scalar else out


def chi_double_prime(x, profile: SmoothingProfile = RAW_C1):
    """Second derivative of :func:`chi` (used for Hessian assembly).

    For ``raw_c1`` the value jumps at 0; the convention here is 1 for x < 0
    and 0 for x >= 0, consistent with ``chi_prime`` being 0 at 0.
    """
    arr, scalar = _as_array(x)
    if profile.kind == "raw_c1":
        out = np.where(arr < 0.0, 1.0, 0.0)
    else:
        w = profile.mollifier_width
        u = np.clip((arr + w) / (2.0 * w), 0.0, 1.0)
        s = _smoothstep(u)
        sp = _smoothstep_prime(u)
        spp = _smoothstep_double_prime(u)
        out = (1.0 - s) - sp * arr / w - spp * arr * arr / (8.0 * w * w)
        out = np.where(arr <= -w, 1.0, out)
        out = np.where(arr >= w, 0.0, out)
    return float(out) if scalar else out
