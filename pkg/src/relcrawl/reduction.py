"""Symmetry reduction: quotient charts, group actions, and phase reconstruction.

The planar (3-mass) model is invariant under horizontal translation; the
spatial (4-mass) model is invariant under planar rigid motions SE(2).  This
module provides

* the group actions on phase states (:func:`act_r`, :func:`act_se2`),
* charts on the quotient — planar shape coordinates ``(z1, z2, l1, l2, l3)``
  with fiber ``x3``, spatial shape coordinates ``(l1..l6, z1, z2, z3)`` with
  fiber ``(phi, x, y)`` in SE(2),
* projection/lift between full states and reduced states, and
* reconstruction of the group shift accumulated over a cycle from the
  retained fiber velocity (``v3`` in the plane; body-frame ``(omega, xi_x,
  xi_y)`` in space).

Reduced-state packing conventions used throughout the package:

* planar (11): ``[z1, z2, l1, l2, l3, vz1, vz2, vl1, vl2, vl3, v3]``
* spatial (21): ``[l1..l6, z1, z2, z3, vl1..vl6, vz1, vz2, vz3, omega,
  xi_x, xi_y]``
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import ChartDomain
from .integrate import IntegratorConfig, integrate
from .model import PhaseState, SPRING_PAIRS_2D, SPRING_PAIRS_3D, spring_lengths

__all__ = [
    "ReducedPoint2D",
    "FiberCoordinate2D",
    "ReducedPoint3D",
    "SE2Element",
    "Se2Velocity",
    "SE2_IDENTITY",
    "act_r",
    "act_se2",
    "se2_compose",
    "se2_inverse",
    "se2_exp",
    "mass3_height",
    "mass3_height_gradient",
    "project_2d",
    "lift_2d",
    "project_state_2d",
    "lift_state_2d",
    "chart_jacobian_2d",
    "lift_3d",
    "project_state_3d",
    "lift_state_3d",
    "chart_jacobian_3d",
    "reconstruct_shift_2d",
    "reconstruct_shift_3d",
]


# --------------------------------------------------------------------------
# chart/domain types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedPoint2D:
    """Planar shape point: ground heights and the three spring lengths."""

    z1: float
    z2: float
    l1: float
    l2: float
    l3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.l1, self.l2, self.l3])


@dataclass(frozen=True)
class FiberCoordinate2D:
    """Horizontal position of the apex mass (coordinatizes translation orbits)."""

    x3: float


@dataclass(frozen=True)
class ReducedPoint3D:
    """Spatial shape point: six spring lengths and the three ground heights."""

    lengths: tuple  # (l1..l6)
    heights: tuple  # (z1, z2, z3)

    def as_array(self) -> np.ndarray:
        return np.array(list(self.lengths) + list(self.heights))


def _wrap_angle(phi: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.fmod(float(phi) + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


@dataclass(frozen=True)
class SE2Element:
    """Planar rigid motion: rotation by ``phi`` then translation by ``(x, y)``.

    Acting on a point p: ``g . p = R(phi) p + (x, y)``.  The angle is wrapped
    to (-pi, pi] at construction.
    """

    phi: float
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "phi", _wrap_angle(self.phi))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.x, self.y])


SE2_IDENTITY = SE2Element(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Se2Velocity:
    """Body-frame SE(2) velocity: angular rate and translational rates."""

    omega: float
    xi_x: float
    xi_y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.omega, self.xi_x, self.xi_y])


# --------------------------------------------------------------------------
# group arithmetic and actions
# --------------------------------------------------------------------------


def se2_compose(a: SE2Element, b: SE2Element) -> SE2Element:
    """Group product a*b (apply b first, then a)."""
    c, s = math.cos(a.phi), math.sin(a.phi)
    return SE2Element(
        a.phi + b.phi,
        a.x + c * b.x - s * b.y,
        a.y + s * b.x + c * b.y,
    )


def se2_inverse(a: SE2Element) -> SE2Element:
    c, s = math.cos(a.phi), math.sin(a.phi)
    return SE2Element(-a.phi, -(c * a.x + s * a.y), -(-s * a.x + c * a.y))


def se2_exp(omega: float, xi_x: float, xi_y: float, t: float = 1.0) -> SE2Element:
    """Exponential of the constant body velocity ``(omega, xi_x, xi_y)`` for time t."""
    th = omega * t
    if abs(th) < 1e-12:
        return SE2Element(th, xi_x * t, xi_y * t)
    s, c = math.sin(th), math.cos(th)
    # V(th) = (1/th) [[s, -(1-c)], [1-c, s]]
    vx = (s * xi_x - (1.0 - c) * xi_y) / omega
    vy = ((1.0 - c) * xi_x + s * xi_y) / omega
    return SE2Element(th, vx, vy)


def act_r(g: float, state: PhaseState) -> PhaseState:
    """Translate a planar state horizontally by ``g``; velocities unchanged."""
    q = np.array(state.q, dtype=float)
    if q.size != 6:
        raise ValueError("act_r applies to planar (3-mass) states")
    q[0::2] += float(g)
    return PhaseState(q=q, u=state.u, t=state.t)


def act_se2(g: SE2Element, state: PhaseState) -> PhaseState:
    """Apply a planar rigid motion to a spatial state.

    Rotates/translates each ``(x_i, y_i)`` and rotates each planar velocity;
    all z components (positions and velocities) are untouched.
    """
    q = np.array(state.q, dtype=float)
    u = np.array(state.u, dtype=float)
    if q.size != 12:
        raise ValueError("act_se2 applies to spatial (4-mass) states")
    c, s = math.cos(g.phi), math.sin(g.phi)
    for i in range(4):
        b = 3 * i
        x, y = q[b], q[b + 1]
        q[b] = c * x - s * y + g.x
        q[b + 1] = s * x + c * y + g.y
        vx, vy = u[b], u[b + 1]
        u[b] = c * vx - s * vy
        u[b + 1] = s * vx + c * vy
    return PhaseState(q=q, u=u, t=state.t)


# --------------------------------------------------------------------------
# planar chart
# --------------------------------------------------------------------------


def _csqrt(x):
    """sqrt usable for real or complex scalars (complex-step differentiation)."""
    if isinstance(x, complex) or (hasattr(x, "dtype") and np.iscomplexobj(x)):
        return np.sqrt(x + 0j)
    return math.sqrt(x)


def mass3_height(z1, z2, l1, l2, l3):
    """Height of the apex mass for the rigid triangle over base heights z1, z2.

    The base endpoints sit at heights ``z1`` (left) and ``z2`` (right) with
    horizontal gap ``sqrt(l3**2 - (z1 - z2)**2)``; the upward branch of the
    apex is selected.  Accepts complex inputs (used for derivative checks).
    """
    delta = z1 - z2
    w2 = l3 * l3 - delta * delta
    if np.real(w2) <= 0.0:
        raise ChartDomain(
            f"ground masses cannot be |z1-z2|={abs(np.real(delta)):.6g} apart "
            f"in height with spring length l3={np.real(l3):.6g}"
        )
    w = _csqrt(w2)
    a = (l2 * l2 + l3 * l3 - l1 * l1) / (2.0 * l3)
    h2 = l2 * l2 - a * a
    if np.real(h2) <= 0.0:
        raise ChartDomain(
            f"lengths ({np.real(l1):.6g}, {np.real(l2):.6g}, {np.real(l3):.6g}) "
            "leave no room for the apex (triangle inequality violated)"
        )
    h = _csqrt(h2)
    return z1 - a * delta / l3 + h * w / l3


def mass3_height_gradient(z1, z2, l1, l2, l3):
    """Analytic (d z3 / d z1, d z3 / d z2) at fixed spring lengths.

    The two entries always sum to 1 (raising both base points one unit raises
    the apex one unit).
    """
    delta = z1 - z2
    w2 = l3 * l3 - delta * delta
    if np.real(w2) <= 0.0:
        raise ChartDomain("|z1 - z2| >= l3: no horizontal gap")
    w = _csqrt(w2)
    a = (l2 * l2 + l3 * l3 - l1 * l1) / (2.0 * l3)
    h2 = l2 * l2 - a * a
    if np.real(h2) <= 0.0:
        raise ChartDomain("triangle inequality violated for the apex")
    h = _csqrt(h2)
    g1 = 1.0 - a / l3 - h * delta / (l3 * w)
    g2 = a / l3 + h * delta / (l3 * w)
    return g1, g2


def lift_2d(rp: ReducedPoint2D, fiber: FiberCoordinate2D) -> np.ndarray:
    """Unique configuration with mass 1 left of mass 2, apex up, and x3 as given."""
    z1, z2, l1, l2, l3 = rp.z1, rp.z2, rp.l1, rp.l2, rp.l3
    delta = z1 - z2
    w2 = l3 * l3 - delta * delta
    if np.real(w2) <= 0.0:
        raise ChartDomain(
            f"|z1-z2|={abs(np.real(delta)):.6g} is not smaller than l3={np.real(l3):.6g}"
        )
    w = _csqrt(w2)
    a = (l2 * l2 + l3 * l3 - l1 * l1) / (2.0 * l3)
    h2 = l2 * l2 - a * a
    if np.real(h2) <= 0.0:
        raise ChartDomain(
            f"lengths ({np.real(l1):.6g}, {np.real(l2):.6g}, {np.real(l3):.6g}) "
            "violate the strict triangle inequality"
        )
    h = _csqrt(h2)
    x3 = fiber.x3
    x1 = x3 - (a * w + h * delta) / l3
    x2 = x1 + w
    z3 = z1 - a * delta / l3 + h * w / l3
    dtype = complex if any(
        isinstance(v, complex) for v in (z1, z2, l1, l2, l3, x3)
    ) else float
    return np.array([x1, z1, x2, z2, x3, z3], dtype=dtype)


def project_2d(state: PhaseState):
    """Project a planar state to (shape point, reduced velocity, fiber).

    The reduced velocity is ``[vz1, vz2, vl1, vl2, vl3, v3]`` — the fiber
    coordinate is dropped but its velocity ``v3 = dx3/dt`` is retained.
    Raises ChartDomain when the configuration leaves the chart (mass 2 not
    strictly right of mass 1, or the apex on the lower branch).
    """
    q = np.asarray(state.q, dtype=float)
    u = np.asarray(state.u, dtype=float)
    x1, z1, x2, z2, x3, z3 = q
    w = x2 - x1
    if w <= 0.0:
        raise ChartDomain(f"mass 2 must lie strictly right of mass 1 (x2-x1={w:.6g})")
    lengths = spring_lengths(q)
    l3 = lengths[2]
    # apex side: signed height of mass 3 over the directed base line 1->2
    h = (-(z2 - z1) * (x3 - x1) + w * (z3 - z1)) / l3
    if h <= 0.0:
        raise ChartDomain(f"apex mass lies on the lower branch (signed height {h:.6g})")
    rp = ReducedPoint2D(z1=z1, z2=z2, l1=lengths[0], l2=lengths[1], l3=lengths[2])
    vel = np.empty(6)
    vel[0] = u[1]
    vel[1] = u[3]
    for k, (i, j) in enumerate(SPRING_PAIRS_2D):
        dxv = q[2 * i : 2 * i + 2] - q[2 * j : 2 * j + 2]
        duv = u[2 * i : 2 * i + 2] - u[2 * j : 2 * j + 2]
        vel[2 + k] = float(dxv @ duv) / lengths[k]
    vel[5] = u[4]
    return rp, vel, FiberCoordinate2D(x3=float(x3))


def chart_jacobian_2d(q: np.ndarray) -> np.ndarray:
    """6x6 derivative of the chart map (z1, z2, l1, l2, l3, x3) w.r.t. q.

    q is packed ``(x1, z1, x2, z2, x3, z3)``.  The matrix is invertible on
    the chart domain; its inverse converts chart velocities to Cartesian
    velocities.
    """
    q = np.asarray(q, dtype=float)
    J = np.zeros((6, 6))
    J[0, 1] = 1.0
    J[1, 3] = 1.0
    for k, (i, j) in enumerate(SPRING_PAIRS_2D):
        d = q[2 * i : 2 * i + 2] - q[2 * j : 2 * j + 2]
        l = math.hypot(d[0], d[1])
        J[2 + k, 2 * i : 2 * i + 2] = d / l
        J[2 + k, 2 * j : 2 * j + 2] = -d / l
    J[5, 4] = 1.0
    return J


def project_state_2d(state: PhaseState):
    """Full planar state -> (reduced 11-vector, fiber x3)."""
    rp, vel, fib = project_2d(state)
    return np.concatenate([rp.as_array(), vel]), fib.x3


def lift_state_2d(reduced: np.ndarray, fiber: float = 0.0, t: float = 0.0) -> PhaseState:
    """Reduced 11-vector (+ fiber) -> full planar state.

    Chart velocities are converted to Cartesian ones with the inverse chart
    Jacobian, so ``project_state_2d(lift_state_2d(r, f)) == (r, f)`` on the
    chart domain.
    """
    reduced = np.asarray(reduced, dtype=float)
    if reduced.shape != (11,):
        raise ValueError("planar reduced state must have 11 entries")
    rp = ReducedPoint2D(*reduced[:5])
    q = lift_2d(rp, FiberCoordinate2D(x3=float(fiber)))
    J = chart_jacobian_2d(q)
    u = np.linalg.solve(J, reduced[5:])
    return PhaseState(q=q, u=u, t=t)


def reconstruct_shift_2d(cycle_v3, period: float, times=None) -> float:
    """Net horizontal shift of the apex over one period from sampled v3.

    ``x3(T) - x3(0)`` equals the time integral of ``v3``; when only samples
    are available the integral is evaluated with composite Simpson quadrature
    (uniform grid spanning [0, period] unless ``times`` is given).
    """
    v3 = np.asarray(cycle_v3, dtype=float)
    if v3.size < 2:
        raise ValueError("need at least two samples of v3")
    if times is not None:
        return float(simpson(v3, x=np.asarray(times, dtype=float)))
    return float(simpson(v3, dx=float(period) / (v3.size - 1)))


# --------------------------------------------------------------------------
# spatial chart
# --------------------------------------------------------------------------

# spring index (0-based) joining ground masses / apex, matching
# SPRING_PAIRS_3D = ((0,1), (0,2), (0,3), (1,2), (1,3), (2,3)):
#   l1=|q1-q2|, l2=|q1-q3|, l3=|q1-q4|, l4=|q2-q3|, l5=|q2-q4|, l6=|q3-q4|


def lift_3d(shape9, g: SE2Element = SE2_IDENTITY) -> np.ndarray:
    """Shape coordinates (l1..l6, z1, z2, z3) -> configuration q (12 entries).

    The canonical placement (identity fiber) puts mass 1 at planar origin,
    mass 2 on the +x half-axis, mass 3 in the upper half-plane, and selects
    the upper (larger z) branch for the apex mass 4; the fiber element ``g``
    then acts on the result.  Accepts complex shape input for complex-step
    differentiation (branch decisions use real parts only).

    Raises ChartDomain when the lengths/heights are inconsistent with a
    non-degenerate grounded tetrad.
    """
    shape9 = np.asarray(shape9)
    if shape9.shape != (9,):
        raise ValueError("spatial shape point must have 9 entries (l1..l6, z1..z3)")
    l1, l2, l3, l4, l5, l6 = shape9[:6]
    z1, z2, z3 = shape9[6:]
    cplx = np.iscomplexobj(shape9)

    def sqrt_dom(val, what):
        if np.real(val) <= 0.0:
            raise ChartDomain(what)
        return _csqrt(val)

    d12 = sqrt_dom(l1 * l1 - (z1 - z2) ** 2, "l1 smaller than the height gap |z1-z2|")
    d13 = sqrt_dom(l2 * l2 - (z1 - z3) ** 2, "l2 smaller than the height gap |z1-z3|")
    d23 = sqrt_dom(l4 * l4 - (z2 - z3) ** 2, "l4 smaller than the height gap |z2-z3|")

    p1 = np.array([0.0, 0.0, z1], dtype=complex if cplx else float)
    p2 = np.array([d12, 0.0, z2], dtype=complex if cplx else float)
    x3p = (d12 * d12 + d13 * d13 - d23 * d23) / (2.0 * d12)
    y3p2 = d13 * d13 - x3p * x3p
    y3p = sqrt_dom(y3p2, "ground triangle degenerate (planar distances are collinear)")
    p3 = np.array([x3p, y3p, z3], dtype=complex if cplx else float)

    # trilaterate the apex from p1, p2, p3 with radii l3, l5, l6
    ex = (p2 - p1) / _csqrt(np.sum((p2 - p1) ** 2))
    v13 = p3 - p1
    i_comp = ex @ v13
    ey_raw = v13 - i_comp * ex
    ey_norm = sqrt_dom(np.sum(ey_raw**2), "ground triangle degenerate for trilateration")
    ey = ey_raw / ey_norm
    ez = np.array(
        [
            ex[1] * ey[2] - ex[2] * ey[1],
            ex[2] * ey[0] - ex[0] * ey[2],
            ex[0] * ey[1] - ex[1] * ey[0],
        ]
    )
    d = _csqrt(np.sum((p2 - p1) ** 2))
    j_comp = ey @ v13
    xl = (l3 * l3 - l5 * l5 + d * d) / (2.0 * d)
    yl = (l3 * l3 - l6 * l6 + i_comp * i_comp + j_comp * j_comp) / (2.0 * j_comp) - (
        i_comp / j_comp
    ) * xl
    zl2 = l3 * l3 - xl * xl - yl * yl
    zl = sqrt_dom(zl2, "apex lengths (l3, l5, l6) unreachable from the ground triangle")
    cand_a = p1 + xl * ex + yl * ey + zl * ez
    cand_b = p1 + xl * ex + yl * ey - zl * ez
    p4 = cand_a if np.real(cand_a[2]) >= np.real(cand_b[2]) else cand_b

    q = np.concatenate([p1, p2, p3, p4])
    if g.phi != 0.0 or g.x != 0.0 or g.y != 0.0:
        c, s = math.cos(g.phi), math.sin(g.phi)
        for i in range(4):
            b = 3 * i
            x, y = q[b], q[b + 1]
            q[b] = c * x - s * y + g.x
            q[b + 1] = s * x + c * y + g.y
    return q


def chart_jacobian_3d(q: np.ndarray) -> np.ndarray:
    """12x12 derivative of (l1..l6, z1, z2, z3, phi, x1, y1) w.r.t. q."""
    q = np.asarray(q, dtype=float)
    J = np.zeros((12, 12))
    for k, (i, j) in enumerate(SPRING_PAIRS_3D):
        d = q[3 * i : 3 * i + 3] - q[3 * j : 3 * j + 3]
        l = math.sqrt(float(d @ d))
        J[k, 3 * i : 3 * i + 3] = d / l
        J[k, 3 * j : 3 * j + 3] = -d / l
    J[6, 2] = 1.0
    J[7, 5] = 1.0
    J[8, 8] = 1.0
    dx = q[3] - q[0]
    dy = q[4] - q[1]
    d2 = dx * dx + dy * dy
    J[9, 0] = dy / d2
    J[9, 1] = -dx / d2
    J[9, 3] = -dy / d2
    J[9, 4] = dx / d2
    J[10, 0] = 1.0
    J[11, 1] = 1.0
    return J


def fiber_3d(q: np.ndarray) -> SE2Element:
    """Fiber element of a spatial configuration: heading of the 1->2 ground
    edge and the planar position of mass 1."""
    q = np.asarray(q, dtype=float)
    phi = math.atan2(q[4] - q[1], q[3] - q[0])
    return SE2Element(phi, q[0], q[1])


def project_state_3d(state: PhaseState):
    """Full spatial state -> (reduced 21-vector, fiber SE2Element).

    Reduced packing: ``[l1..l6, z1, z2, z3, vl1..vl6, vz1, vz2, vz3, omega,
    xi_x, xi_y]`` with body-frame translational rates ``(xi_x, xi_y) =
    R(-phi) (dx1/dt, dy1/dt)``.
    """
    q = np.asarray(state.q, dtype=float)
    u = np.asarray(state.u, dtype=float)
    if q.size != 12:
        raise ValueError("project_state_3d applies to spatial (4-mass) states")
    lengths = spring_lengths(q)
    g = fiber_3d(q)
    red = np.empty(21)
    red[0:6] = lengths
    red[6] = q[2]
    red[7] = q[5]
    red[8] = q[8]
    for k, (i, j) in enumerate(SPRING_PAIRS_3D):
        dxv = q[3 * i : 3 * i + 3] - q[3 * j : 3 * j + 3]
        duv = u[3 * i : 3 * i + 3] - u[3 * j : 3 * j + 3]
        red[9 + k] = float(dxv @ duv) / lengths[k]
    red[15] = u[2]
    red[16] = u[5]
    red[17] = u[8]
    dx = q[3] - q[0]
    dy = q[4] - q[1]
    d2 = dx * dx + dy * dy
    red[18] = (dx * (u[4] - u[1]) - dy * (u[3] - u[0])) / d2
    c, s = math.cos(g.phi), math.sin(g.phi)
    red[19] = c * u[0] + s * u[1]
    red[20] = -s * u[0] + c * u[1]
    return red, g


def lift_state_3d(reduced: np.ndarray, g: SE2Element = SE2_IDENTITY, t: float = 0.0) -> PhaseState:
    """Reduced 21-vector (+ fiber element) -> full spatial state."""
    reduced = np.asarray(reduced, dtype=float)
    if reduced.shape != (21,):
        raise ValueError("spatial reduced state must have 21 entries")
    q0 = lift_3d(reduced[:9])
    J = chart_jacobian_3d(q0)
    ydot = np.empty(12)
    ydot[0:6] = reduced[9:15]
    ydot[6:9] = reduced[15:18]
    ydot[9] = reduced[18]
    ydot[10] = reduced[19]  # identity fiber: body frame == world frame
    ydot[11] = reduced[20]
    u0 = np.linalg.solve(J, ydot)
    st = PhaseState(q=q0, u=u0, t=t)
    if g.phi != 0.0 or g.x != 0.0 or g.y != 0.0:
        st = act_se2(g, st)
        st = PhaseState(q=st.q, u=st.u, t=t)
    return st


def reconstruct_shift_3d(times, omega, xi_x, xi_y, rtol: float = 1e-10, atol: float = 1e-13) -> SE2Element:
    """Net SE(2) displacement over one period from sampled body velocities.

    Solves ``dg/dt = g . xi(t)`` from the identity over [times[0], times[-1]]
    in coordinates ``(phi, x, y)`` (the angle parametrization keeps the
    rotation part exactly orthogonal, so no renormalization is needed) and
    returns ``delta_g``; a trajectory starting at fiber ``h`` satisfies
    ``g(T) = h . delta_g`` (right action).  Inputs are interpolated with a
    cubic spline, so samples should resolve the velocity (dense output of the
    trajectory integrator is appropriate).
    """
    times = np.asarray(times, dtype=float)
    sp_o = CubicSpline(times, np.asarray(omega, dtype=float))
    sp_x = CubicSpline(times, np.asarray(xi_x, dtype=float))
    sp_y = CubicSpline(times, np.asarray(xi_y, dtype=float))

    def rhs(t, y):
        c, s = math.cos(y[0]), math.sin(y[0])
        ox = sp_x(t)
        oy = sp_y(t)
        return np.array([sp_o(t), c * ox - s * oy, s * ox + c * oy])

    cfg = IntegratorConfig(rtol=rtol, atol=atol, dense_output=False)
    traj = integrate(rhs, np.zeros(3), (times[0], times[-1]), cfg)
    phi, x, y = traj.y[-1]
    return SE2Element(phi, x, y)
