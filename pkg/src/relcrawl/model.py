"""Energies, forces, Rayleigh dissipation, and equations of motion.

Two mechanical models share this module:

* planar crawler: three unit masses in the (x, z) plane joined by three
  linear spring-dampers, with gravity pulling in -z and a soft ground at
  z = 0 (configuration dimension 6);
* spatial crawler: four unit masses in (x, y, z) joined by six
  spring-dampers (configuration dimension 12).

Ground interaction is regularized: a penalty potential ``kappa_np * chi(z)``
replaces hard contact, a no-slip damper resists horizontal motion of
penetrating masses, and a de-bounce damper resists their vertical motion.
All dissipation derives from a Rayleigh function R(q, u) = u' nu(q) u / 2
with positive semi-definite nu, so the viscous force is exactly -nu(q) u.

Coordinate layout: positions are interleaved per mass, ``(x_i, z_i)`` in the
planar model and ``(x_i, y_i, z_i)`` in the spatial one.  Spring k of the
planar model connects the two masses *other than* k ("opposite" labeling);
spatial springs are ordered by the lexicographic pair list
(1,2),(1,3),(1,4),(2,3),(2,4),(3,4).

All functions are pure; parameter and schedule objects are immutable and
safe to share across threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AssumptionViolated, DegenerateConfiguration, ScheduleDomain
from .smoothing import RAW_C1, SmoothingProfile, chi, chi_double_prime, chi_prime

__all__ = [
    "L_MIN",
    "SPRING_PAIRS_2D",
    "SPRING_PAIRS_3D",
    "CrawlerParams",
    "PhaseState",
    "RestLengthSchedule",
    "spring_pairs",
    "spring_lengths",
    "shape_potential",
    "shape_damping_force",
    "ground_potential",
    "gravity_potential",
    "noslip_force",
    "debounce_force",
    "total_potential",
    "potential_gradient",
    "potential_hessian",
    "rayleigh_value",
    "rayleigh_matrix",
    "rayleigh_blocks",
    "eom_rhs",
    "make_rhs",
    "schedule_eval",
    "total_energy",
]

#: Minimum admissible pairwise particle distance; closer is a domain error.
L_MIN = 1e-8

#: Planar spring k joins the two masses other than k (0-based mass indices).
SPRING_PAIRS_2D = ((1, 2), (0, 2), (0, 1))
#: Spatial springs in lexicographic pair order (0-based mass indices).
SPRING_PAIRS_3D = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def _cayley_menger_det(d):
    """Cayley-Menger determinant for 4 points given the 6 pair distances.

    ``d`` follows the lexicographic order (1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
    Positive value <=> the distances embed as a non-degenerate tetrahedron
    (the determinant equals 288 * volume**2).
    """
    d12, d13, d14, d23, d24, d34 = (float(x) ** 2 for x in d)
    m = np.array(
        [
            [0.0, 1.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, d12, d13, d14],
            [1.0, d12, 0.0, d23, d24],
            [1.0, d13, d23, 0.0, d34],
            [1.0, d14, d24, d34, 0.0],
        ]
    )
    return float(np.linalg.det(m))


@dataclass(frozen=True)
class CrawlerParams:
    """Immutable stiffness/viscosity/rest-length constants for one model.

    ``rest_lengths`` has 3 entries (planar) or 6 (spatial).  Planar rest
    lengths are cyclically relabeled at construction so that the ground
    spring (index 3, joining the two ground masses) has the largest rest
    length; a UserWarning is emitted when that happens.

    The vertical-impact damper weight is ``chi(z)`` (quadratic in depth) by
    default; ``debounce_chi_prime=True`` switches it to ``|chi_prime(z)|``,
    the same contact weight as the horizontal no-slip damper, for
    sensitivity studies.
    """

    kappa_s: float
    nu_s: float
    kappa_np: float
    nu_ns: float
    nu_db: float
    rest_lengths: tuple
    gravity: float = 1.0
    profile: SmoothingProfile = field(default_factory=lambda: RAW_C1)
    debounce_chi_prime: bool = False

    def __post_init__(self):
        rest = tuple(float(r) for r in np.atleast_1d(self.rest_lengths))
        if len(rest) not in (3, 6):
            raise AssumptionViolated(
                f"rest_lengths must have 3 (planar) or 6 (spatial) entries, got {len(rest)}"
            )
        for name in ("kappa_s", "nu_s", "kappa_np", "nu_ns", "nu_db", "gravity"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value < 0.0:
                raise AssumptionViolated(f"{name} must be finite and >= 0, got {value}")
            object.__setattr__(self, name, value)
        if self.kappa_s <= 0.0 or self.kappa_np <= 0.0:
            raise AssumptionViolated("kappa_s and kappa_np must be > 0")
        if any(r <= 0.0 for r in rest):
            raise AssumptionViolated("rest lengths must be > 0")
        if len(rest) == 3:
            a, b, c = rest
            if not (a < b + c and b < a + c and c < a + b):
                raise AssumptionViolated(
                    f"rest lengths {rest} violate the strict triangle inequality"
                )
            k = int(np.argmax(rest))
            if k != 2 and rest[k] > rest[2]:
                # cyclic relabeling (orientation preserving) putting the
                # largest rest length on the ground spring
                order = (1, 2, 0) if k == 0 else (2, 0, 1)
                relabeled = tuple(rest[i] for i in order)
                warnings.warn(
                    f"rest lengths {rest} relabeled to {relabeled} so the ground "
                    "spring has the largest rest length",
                    UserWarning,
                    stacklevel=2,
                )
                rest = relabeled
        else:
            if _cayley_menger_det(rest) <= 0.0:
                raise AssumptionViolated(
                    f"rest lengths {rest} do not form a non-degenerate tetrahedron"
                )
        object.__setattr__(self, "rest_lengths", rest)
        if not isinstance(self.profile, SmoothingProfile):
            raise AssumptionViolated("profile must be a SmoothingProfile")

    @property
    def n_springs(self) -> int:
        return len(self.rest_lengths)

    @property
    def n_masses(self) -> int:
        return 3 if self.n_springs == 3 else 4

    @property
    def space_dim(self) -> int:
        """Spatial dimension of the ambient space (2 or 3)."""
        return 2 if self.n_springs == 3 else 3

    @property
    def n_coords(self) -> int:
        return self.n_masses * self.space_dim


@dataclass(frozen=True)
class PhaseState:
    """Full (unreduced) configuration + velocity at a time instant."""

    q: np.ndarray
    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float).ravel()
        u = np.array(self.u, dtype=float).ravel()
        if q.shape != u.shape or q.size not in (6, 12):
            raise ValueError(f"q and u must both have 6 or 12 entries, got {q.size}/{u.size}")
        q.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "t", float(self.t))

    @property
    def y(self) -> np.ndarray:
        """Packed phase vector ``concatenate([q, u])``."""
        return np.concatenate([self.q, self.u])

    @classmethod
    def from_vector(cls, y, t=0.0) -> "PhaseState":
        y = np.asarray(y, dtype=float).ravel()
        half = y.size // 2
        return cls(q=y[:half], u=y[half:], t=t)


@dataclass(frozen=True)
class RestLengthSchedule:
    """Time-periodic rest lengths driving the crawler.

    mode "standard" (3 springs): the sum-preserving harmonic pattern
        l1(t) = b1 + eps*cos(w*t),  l2(t) = b2 - eps*sin(w*(t - 1/2)),
        l3(t) = (b1+b2+b3) - l1(t) - l2(t).
    mode "user_table": per-spring harmonic tables; entry k is a sequence of
    (multiplier, amplitude, phase) triples contributing
        eps * amplitude * cos(multiplier * w * t + phase)
    on top of ``base_lengths[k]``.  Integer multipliers >= 1 keep every
    perturbation zero-mean over the period.

    ``phase_origin`` shifts the schedule in time: it is evaluated at
    ``t - phase_origin`` (used to start forcing after a settling phase).

    Large amplitudes may drive instantaneous rest lengths negative; the
    quadratic spring energy remains well-defined, so this is permitted.
    Evaluation raises ScheduleDomain only for non-finite results.
    """

    base_lengths: tuple
    amplitude: float = 0.0
    angular_frequency: float = 2.0 * math.pi
    mode: str = "standard"
    table: tuple = ()
    phase_origin: float = 0.0

    def __post_init__(self):
        base = tuple(float(b) for b in np.atleast_1d(self.base_lengths))
        object.__setattr__(self, "base_lengths", base)
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "angular_frequency", float(self.angular_frequency))
        object.__setattr__(self, "phase_origin", float(self.phase_origin))
        if self.mode not in ("standard", "user_table"):
            raise ScheduleDomain(f"unknown schedule mode {self.mode!r}")
        if self.amplitude < 0.0 or not np.isfinite(self.amplitude):
            raise ScheduleDomain("amplitude must be finite and >= 0")
        if not (self.angular_frequency > 0.0 and np.isfinite(self.angular_frequency)):
            raise ScheduleDomain("angular_frequency must be finite and > 0")
        if self.mode == "standard" and len(base) != 3:
            raise ScheduleDomain("standard mode is defined for 3 springs")
        if self.mode == "user_table":
            table = tuple(
                tuple((int(m), float(a), float(p)) for (m, a, p) in spring_entries)
                for spring_entries in self.table
            )
            if len(table) != len(base):
                raise ScheduleDomain("user_table needs one entry list per spring")
            for spring_entries in table:
                for m, _, _ in spring_entries:
                    if m < 1:
                        raise ScheduleDomain("harmonic multipliers must be integers >= 1")
            object.__setattr__(self, "table", table)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.angular_frequency

    def with_amplitude(self, epsilon: float) -> "RestLengthSchedule":
        return replace(self, amplitude=float(epsilon))


def schedule_eval(t, schedule: RestLengthSchedule) -> np.ndarray:
    """Rest lengths at time ``t``.  At amplitude 0 this is exactly the base."""
    tau = float(t) - schedule.phase_origin
    base = np.array(schedule.base_lengths, dtype=float)
    eps = schedule.amplitude
    w = schedule.angular_frequency
    if eps == 0.0:
        return base
    if schedule.mode == "standard":
        total = base[0] + base[1] + base[2]
        l1 = base[0] + eps * math.cos(w * tau)
        l2 = base[1] - eps * math.sin(w * (tau - 0.5))
        out = np.array([l1, l2, total - l1 - l2])
    else:
        out = base.copy()
        for k, spring_entries in enumerate(schedule.table):
            for m, a, p in spring_entries:
                out[k] += eps * a * math.cos(m * w * tau + p)
    if not np.all(np.isfinite(out)):
        raise ScheduleDomain(f"schedule produced non-finite rest lengths at t={t}")
    return out


def spring_pairs(n_coords: int):
    """Spring connectivity for a configuration vector of the given size."""
    if n_coords == 6:
        return SPRING_PAIRS_2D, 2
    if n_coords == 12:
        return SPRING_PAIRS_3D, 3
    raise ValueError(f"configuration must have 6 or 12 coordinates, got {n_coords}")


def _positions(q):
    q = np.asarray(q, dtype=float).ravel()
    pairs, sdim = spring_pairs(q.size)
    return q.reshape(-1, sdim), pairs, sdim


def _spring_geometry(q):
    """Lengths and unit direction vectors (mass i -> away from mass j) per spring.

    Raises DegenerateConfiguration when any pair sits closer than L_MIN.
    """
    pos, pairs, sdim = _positions(q)
    diffs = np.array([pos[i] - pos[j] for i, j in pairs])
    lengths = np.sqrt(np.sum(diffs * diffs, axis=1))
    if np.any(lengths < L_MIN):
        raise DegenerateConfiguration(
            f"particle pair distance below L_MIN={L_MIN}: lengths={lengths}"
        )
    units = diffs / lengths[:, None]
    return lengths, units, pairs, sdim


def spring_lengths(q) -> np.ndarray:
    """Current spring lengths (3 planar / 6 spatial entries)."""
    lengths, _, _, _ = _spring_geometry(q)
    return lengths


def shape_potential(q, rest, params: CrawlerParams) -> float:
    """Elastic energy (kappa_s/2) * sum_k (l_k - rest_k)**2."""
    lengths = spring_lengths(q)
    d = lengths - np.asarray(rest, dtype=float)
    return 0.5 * params.kappa_s * float(d @ d)


def _length_rates(q, u):
    """d/dt of every spring length, plus cached geometry."""
    lengths, units, pairs, sdim = _spring_geometry(q)
    vel = np.asarray(u, dtype=float).reshape(-1, sdim)
    rates = np.array([units[k] @ (vel[i] - vel[j]) for k, (i, j) in enumerate(pairs)])
    return rates, lengths, units, pairs, sdim


def shape_damping_force(q, u, params: CrawlerParams) -> np.ndarray:
    """Axial dashpot force covector: -nu_s * ldot_k along each spring."""
    rates, _, units, pairs, sdim = _length_rates(q, u)
    force = np.zeros((np.asarray(q).size // sdim, sdim))
    for k, (i, j) in enumerate(pairs):
        f = -params.nu_s * rates[k] * units[k]
        force[i] += f
        force[j] -= f
    return force.ravel()


def ground_potential(q, params: CrawlerParams) -> float:
    """Penalty energy kappa_np * sum_i chi(z_i)."""
    pos, _, sdim = _positions(q)
    z = pos[:, sdim - 1]
    return params.kappa_np * float(np.sum(chi(z, params.profile)))


def gravity_potential(q, params: CrawlerParams) -> float:
    """g * sum_i z_i (unit masses)."""
    pos, _, sdim = _positions(q)
    return params.gravity * float(np.sum(pos[:, sdim - 1]))


def noslip_force(q, u, params: CrawlerParams) -> np.ndarray:
    """Horizontal damping of penetrating masses: -nu_ns*|chi'(z_i)| * xdot_i.

    Acts on the horizontal components only (x planar; x and y spatial); the
    absolute value keeps the force dissipative for any height.
    """
    pos, _, sdim = _positions(q)
    vel = np.asarray(u, dtype=float).reshape(-1, sdim)
    weight = np.abs(chi_prime(pos[:, sdim - 1], params.profile))
    force = np.zeros_like(pos)
    force[:, : sdim - 1] = -params.nu_ns * weight[:, None] * vel[:, : sdim - 1]
    return force.ravel()


def _debounce_weight(z, params: CrawlerParams):
    if params.debounce_chi_prime:
        return np.abs(chi_prime(z, params.profile))
    return chi(z, params.profile)


def debounce_force(q, u, params: CrawlerParams) -> np.ndarray:
    """Vertical damping of penetrating masses: -nu_db * chi(z_i) * zdot_i."""
    pos, _, sdim = _positions(q)
    vel = np.asarray(u, dtype=float).reshape(-1, sdim)
    weight = _debounce_weight(pos[:, sdim - 1], params)
    force = np.zeros_like(pos)
    force[:, sdim - 1] = -params.nu_db * weight * vel[:, sdim - 1]
    return force.ravel()


def total_potential(q, rest, params: CrawlerParams) -> float:
    """Elastic + ground-penalty + gravity energy."""
    return (
        shape_potential(q, rest, params)
        + ground_potential(q, params)
        + gravity_potential(q, params)
    )


def potential_gradient(q, rest, params: CrawlerParams) -> np.ndarray:
    """Analytic gradient of :func:`total_potential` with respect to ``q``."""
    lengths, units, pairs, sdim = _spring_geometry(q)
    rest = np.asarray(rest, dtype=float)
    pos, _, _ = _positions(q)
    grad = np.zeros_like(pos)
    for k, (i, j) in enumerate(pairs):
        g = params.kappa_s * (lengths[k] - rest[k]) * units[k]
        grad[i] += g
        grad[j] -= g
    z = pos[:, sdim - 1]
    grad[:, sdim - 1] += params.kappa_np * chi_prime(z, params.profile)
    grad[:, sdim - 1] += params.gravity
    return grad.ravel()


def potential_hessian(q, rest, params: CrawlerParams) -> np.ndarray:
    """Analytic Hessian of :func:`total_potential` with respect to ``q``."""
    lengths, units, pairs, sdim = _spring_geometry(q)
    rest = np.asarray(rest, dtype=float)
    n = np.asarray(q).size
    hess = np.zeros((n, n))
    eye = np.eye(sdim)
    for k, (i, j) in enumerate(pairs):
        nk = units[k][:, None]
        block = params.kappa_s * (
            nk @ nk.T + (1.0 - rest[k] / lengths[k]) * (eye - nk @ nk.T)
        )
        si, sj = slice(i * sdim, (i + 1) * sdim), slice(j * sdim, (j + 1) * sdim)
        hess[si, si] += block
        hess[sj, sj] += block
        hess[si, sj] -= block
        hess[sj, si] -= block
    pos, _, _ = _positions(q)
    z = pos[:, sdim - 1]
    curv = params.kappa_np * chi_double_prime(z, params.profile)
    for i in range(pos.shape[0]):
        idx = i * sdim + sdim - 1
        hess[idx, idx] += curv[i]
    return hess


def rayleigh_blocks(q, params: CrawlerParams):
    """The three PSD blocks (shape, no-slip, de-bounce) of nu(q).

    Returned as full (n, n) matrices whose sum is :func:`rayleigh_matrix`.
    """
    lengths, units, pairs, sdim = _spring_geometry(q)
    n = np.asarray(q).size
    nu_shape = np.zeros((n, n))
    for k, (i, j) in enumerate(pairs):
        w = np.zeros(n)
        w[i * sdim : (i + 1) * sdim] = units[k]
        w[j * sdim : (j + 1) * sdim] = -units[k]
        nu_shape += params.nu_s * np.outer(w, w)
    pos, _, _ = _positions(q)
    z = pos[:, sdim - 1]
    nu_ns = np.zeros((n, n))
    ns_weight = params.nu_ns * np.abs(chi_prime(z, params.profile))
    nu_db = np.zeros((n, n))
    db_weight = params.nu_db * _debounce_weight(z, params)
    for i in range(pos.shape[0]):
        for axis in range(sdim - 1):
            idx = i * sdim + axis
            nu_ns[idx, idx] = ns_weight[i]
        idx = i * sdim + sdim - 1
        nu_db[idx, idx] = db_weight[i]
    return nu_shape, nu_ns, nu_db


def rayleigh_matrix(q, params: CrawlerParams) -> np.ndarray:
    """Symmetric PSD matrix nu(q) with R(q, u) = u' nu(q) u / 2."""
    nu_shape, nu_ns, nu_db = rayleigh_blocks(q, params)
    return nu_shape + nu_ns + nu_db


def rayleigh_value(q, u, params: CrawlerParams) -> float:
    """Rayleigh dissipation R(q, u); the viscous force is -dR/du = -nu(q) u."""
    rates, _, _, _, sdim = _length_rates(q, u)
    pos, _, _ = _positions(q)
    vel = np.asarray(u, dtype=float).reshape(-1, sdim)
    z = pos[:, sdim - 1]
    r_shape = 0.5 * params.nu_s * float(rates @ rates)
    horiz2 = np.sum(vel[:, : sdim - 1] ** 2, axis=1)
    r_ns = 0.5 * params.nu_ns * float(
        np.sum(np.abs(chi_prime(z, params.profile)) * horiz2)
    )
    r_db = 0.5 * params.nu_db * float(
        np.sum(_debounce_weight(z, params) * vel[:, sdim - 1] ** 2)
    )
    return r_shape + r_ns + r_db


def _acceleration(t, q, u, schedule, params: CrawlerParams) -> np.ndarray:
    rest = params.rest_lengths if schedule is None else schedule_eval(t, schedule)
    acc = -potential_gradient(q, rest, params)
    acc += shape_damping_force(q, u, params)
    acc += noslip_force(q, u, params)
    acc += debounce_force(q, u, params)
    return acc


def eom_rhs(state: PhaseState, schedule, params: CrawlerParams):
    """Right-hand side of the equations of motion: returns (u, q_ddot).

    ``schedule=None`` means constant rest lengths ``params.rest_lengths``.
    Unit masses, so accelerations equal net force covectors componentwise.
    """
    acc = _acceleration(state.t, state.q, state.u, schedule, params)
    return state.u.copy(), acc


def make_rhs(params: CrawlerParams, schedule=None):
    """Packed-vector right-hand side ``f(t, y)`` with ``y = [q, u]``."""
    n = params.n_coords

    def rhs(t, y):
        q = y[:n]
        u = y[n:]
        out = np.empty_like(y)
        out[:n] = u
        out[n:] = _acceleration(t, q, u, schedule, params)
        return out

    return rhs


def total_energy(state: PhaseState, rest, params: CrawlerParams) -> float:
    """Kinetic + potential energy (unit masses)."""
    return 0.5 * float(state.u @ state.u) + total_potential(state.q, rest, params)
