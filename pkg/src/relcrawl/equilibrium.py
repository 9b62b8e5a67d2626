"""Equilibrium construction and robust-stability certification.

The crawler rests on springs pressed into a soft ground layer.  This module

* evaluates the reduced potential on the quotient chart (shape coordinates
  only — the symmetry direction is cyclic),
* finds the resting shape constructively by a two-stage homotopy (first an
  infinitely stiff skeleton whose ground penetration solves per-mass scalar
  equations, then a continuation in the spring compliance 1/kappa_s),
* certifies the equilibrium: gradient residual, positive-definite reduced
  Hessian, positive-definite Rayleigh (damping) matrix on the fiber, and a
  strictly negative spectral abscissa of the reduced linearization,
* assembles the reduced linearization in orthonormal fiber-adapted
  coordinates so that it takes the block form [[0, p], [-K p', -nu]].

All constructions work for both the planar (3-mass) and spatial (4-mass)
models; the spatial apex height is differentiated by complex-step through
the chart lift.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eig, eigh, null_space
from scipy.optimize import brentq

from .errors import (
    AssumptionViolated,
    ChartDomain,
    ContinuationFailed,
    DegenerateConfiguration,
)
from .model import (
    CrawlerParams,
    PhaseState,
    potential_hessian,
    rayleigh_blocks,
    rayleigh_matrix,
)
from .reduction import (
    FiberCoordinate2D,
    ReducedPoint2D,
    ReducedPoint3D,
    lift_2d,
    lift_3d,
    mass3_height,
)
from .smoothing import chi, chi_prime, chi_double_prime

__all__ = [
    "TOL_GRAD",
    "TOL_EIG",
    "RayleighCertificate",
    "StabilityReport",
    "reduced_potential",
    "reduced_gradient",
    "reduced_hessian",
    "homotopy_equilibrium",
    "equilibrium_state",
    "rayleigh_kernels",
    "kernel_intersection_dims",
    "certify_rayleigh",
    "reduced_linearization",
    "full_linearization",
    "certify_stability",
]

TOL_GRAD = 1e-10
TOL_EIG = 1e-10
_ZERO_ABSCISSA = 1e-9  # dead band around 0 for the marginal verdict
_CS_H = 1e-30  # complex-step size (exact to machine precision)
_HYBRID_H = 1e-5  # real step of the complex/central second-derivative hybrid


# --------------------------------------------------------------------------
# report types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RayleighCertificate:
    """Definiteness certificate for the damping matrix on the reduced fiber."""

    eigenvalues: np.ndarray
    min_eigenvalue: float
    positive_definite: bool


@dataclass(frozen=True)
class StabilityReport:
    """Everything the robust-stability verdict rests on.

    ``verdict`` is one of ``robustly_stable`` (gradient residual at most
    TOL_GRAD, reduced Hessian and fiber Rayleigh matrix positive definite,
    spectral abscissa strictly negative), ``marginal`` (abscissa numerically
    zero), ``unstable`` (abscissa positive), or ``indefinite_inputs`` (the
    inputs do not support the certificate; ``failure_reason`` says why when
    construction itself failed).
    """

    reduced_equilibrium: object
    gradient_norm: float
    hessian_eigenvalues: np.ndarray
    rayleigh_eigenvalues: np.ndarray
    linearization_spectrum: np.ndarray
    spectral_abscissa: float
    verdict: str
    failure_reason: str = None


# --------------------------------------------------------------------------
# shape-vector plumbing
# --------------------------------------------------------------------------


def _shape_vector(point, params: CrawlerParams) -> np.ndarray:
    """Normalize a reduced point / shape array to the packed shape vector."""
    if isinstance(point, ReducedPoint2D):
        return point.as_array()
    if isinstance(point, ReducedPoint3D):
        return point.as_array()
    arr = np.asarray(point, dtype=float)
    n_shape = 5 if params.n_masses == 3 else 9
    if arr.shape == (n_shape,):
        return arr.copy()
    raise ValueError(
        f"expected a reduced point or a shape vector of length {n_shape}"
    )


def _as_point(shape: np.ndarray, params: CrawlerParams):
    if params.n_masses == 3:
        return ReducedPoint2D(*(float(v) for v in shape))
    return ReducedPoint3D(
        lengths=tuple(float(v) for v in shape[:6]),
        heights=tuple(float(v) for v in shape[6:]),
    )


def _lift_configuration(point, params: CrawlerParams) -> np.ndarray:
    """Reduced point / shape vector / configuration -> configuration q."""
    if isinstance(point, PhaseState):
        return np.asarray(point.q, dtype=float)
    arr = np.asarray(point, dtype=float) if not isinstance(
        point, (ReducedPoint2D, ReducedPoint3D)
    ) else None
    if arr is not None and arr.shape == (params.n_coords,):
        return arr.copy()
    shape = _shape_vector(point, params)
    if params.n_masses == 3:
        return lift_2d(ReducedPoint2D(*shape), FiberCoordinate2D(0.0))
    return lift_3d(shape)


def _apex_height(shape, params: CrawlerParams):
    """Height of the free apex mass as a function of the shape vector.

    Accepts complex entries (complex-step differentiation).
    """
    if params.n_masses == 3:
        z1, z2, l1, l2, l3 = shape
        return mass3_height(z1, z2, l1, l2, l3)
    return lift_3d(np.asarray(shape))[11]


def _apex_gradient(shape: np.ndarray, params: CrawlerParams) -> np.ndarray:
    """d(apex height)/d(shape) by complex step (machine precision)."""
    n = shape.size
    grad = np.empty(n)
    for i in range(n):
        zc = shape.astype(complex)
        zc[i] += 1j * _CS_H
        grad[i] = np.imag(_apex_height(zc, params)) / _CS_H
    return grad


def _apex_hessian(shape: np.ndarray, params: CrawlerParams) -> np.ndarray:
    """Second derivatives of the apex height by the complex/central hybrid.

    H[i, j] = Im[f(x + i*hc*e_i + hr*e_j) - f(x + i*hc*e_i - hr*e_j)]
              / (2 hc hr):
    the inner derivative is complex-step exact, so the only error is the
    O(hr^2) central difference of an already-exact first derivative.
    """
    n = shape.size
    H = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            zp = shape.astype(complex)
            zp[i] += 1j * _CS_H
            zp[j] += _HYBRID_H
            zm = shape.astype(complex)
            zm[i] += 1j * _CS_H
            zm[j] -= _HYBRID_H
            H[i, j] = (
                np.imag(_apex_height(zp, params)) - np.imag(_apex_height(zm, params))
            ) / (2.0 * _CS_H * _HYBRID_H)
    return 0.5 * (H + H.T)


def _split_indices(params: CrawlerParams):
    """Index arrays (grounded-height slots, length slots) in the shape vector."""
    if params.n_masses == 3:
        return np.array([0, 1]), np.array([2, 3, 4])
    return np.array([6, 7, 8]), np.array([0, 1, 2, 3, 4, 5])


# --------------------------------------------------------------------------
# reduced potential, gradient, Hessian (chart coordinates)
# --------------------------------------------------------------------------


def reduced_potential(rp, params: CrawlerParams) -> float:
    """Potential energy on the quotient chart.

    Equals ``total_potential`` of the lifted configuration: elastic energy of
    the springs against the rest lengths in ``params``, gravity of every mass
    (the apex height is a function of the shape), and the ground penalty of
    every mass.  Raises ChartDomain off the chart.
    """
    shape = _shape_vector(rp, params)
    z_idx, l_idx = _split_indices(params)
    lengths = shape[l_idx]
    z = shape[z_idx]
    rest = np.asarray(params.rest_lengths, dtype=float)
    z_apex = _apex_height(shape, params)
    d = lengths - rest
    energy = 0.5 * params.kappa_s * float(d @ d)
    energy += params.gravity * (float(np.sum(z)) + z_apex)
    energy += params.kappa_np * float(
        np.sum(chi(z, params.profile)) + chi(z_apex, params.profile)
    )
    return float(energy)


def reduced_gradient(rp, params: CrawlerParams) -> np.ndarray:
    """Gradient of :func:`reduced_potential` in chart coordinates.

    Heights enter analytically; the apex-height dependence is differentiated
    by complex step, so the result is exact to machine precision.
    """
    shape = _shape_vector(rp, params)
    z_idx, l_idx = _split_indices(params)
    rest = np.asarray(params.rest_lengths, dtype=float)
    z_apex = _apex_height(shape, params)
    dz_apex = _apex_gradient(shape, params)
    w_prime = params.gravity + params.kappa_np * chi_prime(z_apex, params.profile)
    grad = w_prime * dz_apex
    grad[l_idx] += params.kappa_s * (shape[l_idx] - rest)
    grad[z_idx] += params.gravity + params.kappa_np * chi_prime(
        shape[z_idx], params.profile
    )
    return grad


def reduced_hessian(rp, params: CrawlerParams) -> np.ndarray:
    """Symmetric chart-coordinate Hessian of the reduced potential.

    Diagonal stiffness terms (ground curvature on the heights, kappa_s on the
    lengths) plus the apex-height curvature contribution
    ``W'' dz (x) dz + W' D2z`` with ``W(h) = gravity*h + kappa_np*chi(h)``.
    """
    shape = _shape_vector(rp, params)
    z_idx, l_idx = _split_indices(params)
    n = shape.size
    z_apex = _apex_height(shape, params)
    dz_apex = _apex_gradient(shape, params)
    d2z_apex = _apex_hessian(shape, params)
    w_prime = params.gravity + params.kappa_np * chi_prime(z_apex, params.profile)
    w_second = params.kappa_np * chi_double_prime(z_apex, params.profile)
    H = w_second * np.outer(dz_apex, dz_apex) + w_prime * d2z_apex
    H[l_idx, l_idx] += params.kappa_s
    H[z_idx, z_idx] += params.kappa_np * chi_double_prime(
        shape[z_idx], params.profile
    )
    return 0.5 * (H + H.T)


# --------------------------------------------------------------------------
# constructive equilibrium (two-stage homotopy)
# --------------------------------------------------------------------------


def _stage1_heights(params: CrawlerParams) -> np.ndarray:
    """Ground penetrations of the rigid (infinitely stiff) skeleton.

    With the lengths pinned at their rest values, each grounded mass must
    satisfy ``gravity * (1 + d z_apex / d z_i) + kappa_np * chi'(z_i) = 0``;
    the equations couple only through the apex-height partials, which a
    Gauss-Seidel sweep with bracketed 1D root finds resolves quickly.
    """
    rest = np.asarray(params.rest_lengths, dtype=float)
    n_ground = params.n_masses - 1
    z = np.zeros(n_ground)

    def shape_for(zvals):
        if params.n_masses == 3:
            return np.concatenate([zvals, rest])
        return np.concatenate([rest, zvals])

    def residual(i, zi):
        zv = z.copy()
        zv[i] = zi
        shape = shape_for(zv)
        z_idx, _ = _split_indices(params)
        sc = shape.astype(complex)
        sc[z_idx[i]] += 1j * _CS_H
        dz = np.imag(_apex_height(sc, params)) / _CS_H
        return params.gravity * (1.0 + dz) + params.kappa_np * float(
            chi_prime(zi, params.profile)
        )

    for sweep in range(200):
        z_prev = z.copy()
        for i in range(n_ground):
            f0 = residual(i, 0.0)
            if f0 <= 0.0:
                z[i] = 0.0
                continue
            lo = -params.gravity / params.kappa_np
            found = False
            for _ in range(80):
                try:
                    flo = residual(i, lo)
                except ChartDomain:
                    # stepped past the chart edge; back off toward zero
                    lo *= 0.75
                    if abs(lo) < 1e-300:
                        break
                    continue
                if flo < 0.0:
                    found = True
                    break
                lo *= 2.0
            if not found:
                raise ContinuationFailed(
                    "rigid-skeleton stage: no bracket for the penetration equation"
                )
            z[i] = brentq(
                lambda zi: residual(i, zi), lo, 0.0, xtol=1e-15, rtol=8.9e-16
            )
        if np.max(np.abs(z - z_prev)) < 1e-15:
            break
    else:
        raise ContinuationFailed("rigid-skeleton stage: Gauss-Seidel did not settle")
    return z


def _newton_polish(shape, params_eff, scale, tol, max_iter=30):
    """Damped Newton on the scaled gradient; returns (shape, residual)."""
    shape = shape.copy()

    def scaled_norm(g):
        return float(np.linalg.norm(scale * g))

    g = reduced_gradient(shape, params_eff)
    res = scaled_norm(g)
    for _ in range(max_iter):
        if res <= tol:
            return shape, res
        H = reduced_hessian(shape, params_eff)
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            raise ContinuationFailed("Newton step: singular reduced Hessian")
        t = 1.0
        for _ in range(25):
            cand = shape + t * step
            try:
                g_new = reduced_gradient(cand, params_eff)
            except (ChartDomain, DegenerateConfiguration):
                t *= 0.5
                continue
            res_new = scaled_norm(g_new)
            if res_new < res:
                shape, g, res = cand, g_new, res_new
                break
            t *= 0.5
        else:
            return shape, res  # stalled; caller decides
    return shape, res


def homotopy_equilibrium(params: CrawlerParams, check_hessian: bool = True):
    """Constructive resting shape via the rigidity homotopy.

    Stage 1 pins the spring lengths at their rest values and solves the
    per-mass penetration equations (a rigid skeleton pressed into the
    ground).  Stage 2 restores compliance by continuing in eps = 1/kappa_s
    over 8 geometric steps (Newton at each, step halving on failure) and
    polishes until the gradient norm is at most 1e-13.

    Returns a ReducedPoint2D (planar) or ReducedPoint3D (spatial).  Raises
    ContinuationFailed when the path cannot be completed and, when
    ``check_hessian`` is set, AssumptionViolated when the reduced Hessian at
    the solution is not positive definite.
    """
    rest = np.asarray(params.rest_lengths, dtype=float)
    z0 = _stage1_heights(params)
    if params.n_masses == 3:
        shape = np.concatenate([z0, rest])
    else:
        shape = np.concatenate([rest, z0])

    z_idx, l_idx = _split_indices(params)
    eps_target = 1.0 / params.kappa_s
    eps_list = [eps_target * 2.0 ** (j - 8) for j in range(1, 9)]

    def solve_at(eps, start, tol):
        params_eff = dataclasses.replace(params, kappa_s=1.0 / eps)
        scale = np.ones_like(start)
        scale[l_idx] = eps
        return _newton_polish(start, params_eff, scale, tol)

    halvings = 0
    eps_prev = 0.0
    pending = list(eps_list)
    while pending:
        eps = pending[0]
        tol = 1e-13 if len(pending) == 1 else 1e-10
        try:
            cand, res = solve_at(eps, shape, tol)
            ok = res <= tol
        except (ChartDomain, DegenerateConfiguration, ContinuationFailed):
            ok = False
        if ok:
            shape = cand
            eps_prev = eps
            pending.pop(0)
            continue
        halvings += 1
        if halvings > 40:
            raise ContinuationFailed(
                "compliance continuation: step-halving budget exhausted"
            )
        pending.insert(0, 0.5 * (eps_prev + eps))

    # final polish on the true (unscaled) gradient
    shape, res = _newton_polish(shape, params, np.ones_like(shape), 1e-13)
    if res > TOL_GRAD:
        raise ContinuationFailed(
            f"final polish stalled at gradient norm {res:.3e} (target {TOL_GRAD:g})"
        )
    if check_hessian:
        eigs = eigh(reduced_hessian(shape, params), eigvals_only=True)
        if eigs[0] <= 0.0:
            raise AssumptionViolated(
                f"reduced Hessian not positive definite at the homotopy solution "
                f"(min eigenvalue {eigs[0]:.3e}); stiffnesses too small"
            )
    return _as_point(shape, params)


def equilibrium_state(params: CrawlerParams, point=None) -> PhaseState:
    """Resting phase state (zero velocity) at the canonical fiber.

    Computes the equilibrium if ``point`` is not supplied.  The planar state
    has the apex at x = 0; the spatial one has mass 1 at the planar origin
    with the 1->2 edge along +x.
    """
    if point is None:
        point = homotopy_equilibrium(params)
    q = _lift_configuration(point, params)
    return PhaseState(q=q, u=np.zeros_like(q), t=0.0)


# --------------------------------------------------------------------------
# Rayleigh (damping) certificates
# --------------------------------------------------------------------------


def rayleigh_kernels(q, params: CrawlerParams):
    """Null-space bases of the three PSD damping blocks at configuration q.

    Returns ``(ker_debounce, ker_noslip, ker_shape)`` as (n, k) matrices with
    orthonormal columns.  At the planar equilibrium the dimensions are
    4, 4, 3: the de-bounce damper ignores every horizontal motion and the
    apex; the no-slip damper ignores heights and the apex; the shape damper
    ignores the rigid motions (two translations and the rotation).
    """
    q = _lift_configuration(q, params)
    nu_shape, nu_ns, nu_db = rayleigh_blocks(q, params)
    scale = max(float(np.linalg.norm(m, 2)) for m in (nu_shape, nu_ns, nu_db))
    rcond = 1e-10 * max(scale, 1.0)

    def ker(m):
        return null_space(m, rcond=rcond / max(float(np.linalg.norm(m, 2)), rcond))

    return ker(nu_db), ker(nu_ns), ker(nu_shape)


def kernel_intersection_dims(q, params: CrawlerParams) -> dict:
    """Dimensions of the pairwise and triple damping-kernel intersections.

    For PSD matrices ker(A) ∩ ker(B) = ker(A + B), so the dimensions come
    from null spaces of sums — no subspace-angle machinery needed.
    """
    q = _lift_configuration(q, params)
    nu_shape, nu_ns, nu_db = rayleigh_blocks(q, params)
    scale = max(float(np.linalg.norm(m, 2)) for m in (nu_shape, nu_ns, nu_db))
    rcond = 1e-10

    def kdim(m):
        s = float(np.linalg.norm(m, 2))
        return null_space(m, rcond=rcond * max(scale / max(s, 1e-300), 1.0)).shape[1]

    return {
        "debounce": kdim(nu_db),
        "noslip": kdim(nu_ns),
        "shape": kdim(nu_shape),
        "debounce_noslip": kdim(nu_db + nu_ns),
        "debounce_shape": kdim(nu_db + nu_shape),
        "noslip_shape": kdim(nu_ns + nu_shape),
        "triple": kdim(nu_db + nu_ns + nu_shape),
    }


def certify_rayleigh(point, params: CrawlerParams) -> RayleighCertificate:
    """Eigenvalues of the full damping matrix on the reduced fiber.

    The quotient drops a position coordinate but keeps every velocity, so
    the fiber carries the full n-by-n matrix nu(q); positive definiteness
    (min eigenvalue > TOL_EIG) is what the robust verdict needs.
    """
    q = _lift_configuration(point, params)
    eigs = eigh(rayleigh_matrix(q, params), eigvals_only=True)
    return RayleighCertificate(
        eigenvalues=eigs,
        min_eigenvalue=float(eigs[0]),
        positive_definite=bool(eigs[0] > TOL_EIG),
    )


# --------------------------------------------------------------------------
# linearizations
# --------------------------------------------------------------------------


def _symmetry_frame(q: np.ndarray, params: CrawlerParams) -> np.ndarray:
    """Orthogonal basis of configuration space, orbit directions last.

    Planar: a Householder reflection swapping e_last with the uniform
    x-translation direction.  Spatial: [null-space complement | orthonormal
    (x-translation, y-translation, z-rotation) generators].
    """
    n = q.size
    if params.n_masses == 3:
        s = np.zeros(n)
        s[0::2] = 1.0
        s /= np.linalg.norm(s)
        v = s - np.eye(n)[:, n - 1]
        nv = float(v @ v)
        if nv < 1e-30:
            return np.eye(n)
        return np.eye(n) - 2.0 * np.outer(v, v) / nv
    tx = np.zeros(n)
    tx[0::3] = 1.0
    ty = np.zeros(n)
    ty[1::3] = 1.0
    rot = np.zeros(n)
    for i in range(4):
        rot[3 * i] = -q[3 * i + 1]
        rot[3 * i + 1] = q[3 * i]
    G, _ = np.linalg.qr(np.column_stack([tx, ty, rot]))
    W = null_space(G.T)
    return np.column_stack([W, G])


def reduced_linearization(point, params: CrawlerParams) -> np.ndarray:
    """Linearization of the reduced dynamics at the equilibrium.

    Assembled in orthonormal fiber-adapted coordinates (orbit directions
    last), where it takes the exact block form ``[[0, p], [-K p', -nu]]``
    with ``p = [I 0]`` dropping the cyclic position coordinate(s), K the
    full potential Hessian at the lifted equilibrium, and nu the damping
    matrix — 11x11 for the planar model, 21x21 for the spatial one.  Because
    the frame is orthonormal the spectrum is the true reduced spectrum, and
    it is independent of the choice of right inverse for p (any two differ
    by kernel directions of K).

    Raises AssumptionViolated when the Hessian kernel is not exactly the
    symmetry-orbit tangent space.
    """
    q = _lift_configuration(point, params)
    rest = np.asarray(params.rest_lengths, dtype=float)
    K = potential_hessian(q, rest, params)
    nu = rayleigh_matrix(q, params)
    n = q.size
    n_orbit = 1 if params.n_masses == 3 else 3
    n_shape = n - n_orbit

    eigs = eigh(K, eigvals_only=True)
    kscale = max(abs(eigs[0]), abs(eigs[-1]), 1.0)
    n_zero = int(np.sum(np.abs(eigs) <= 1e-9 * kscale))
    if n_zero != n_orbit:
        raise AssumptionViolated(
            f"potential Hessian has a {n_zero}-dimensional numerical kernel; "
            f"expected exactly {n_orbit} symmetry direction(s)"
        )
    B = _symmetry_frame(q, params)
    K_ad = B.T @ K @ B
    if float(np.max(np.abs(K_ad[:, n_shape:]))) > 1e-8 * kscale:
        raise AssumptionViolated(
            "potential Hessian kernel is not aligned with the symmetry orbit"
        )
    nu_ad = B.T @ nu @ B
    p = np.zeros((n_shape, n))
    p[:, :n_shape] = np.eye(n_shape)
    A = np.zeros((n_shape + n, n_shape + n))
    A[:n_shape, n_shape:] = p
    A[n_shape:, :n_shape] = -K_ad @ p.T
    A[n_shape:, n_shape:] = -nu_ad
    return A


def full_linearization(point, params: CrawlerParams) -> np.ndarray:
    """Unreduced phase-space linearization [[0, I], [-K, -nu]] at a point."""
    q = _lift_configuration(point, params)
    rest = np.asarray(params.rest_lengths, dtype=float)
    K = potential_hessian(q, rest, params)
    nu = rayleigh_matrix(q, params)
    n = q.size
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = np.eye(n)
    A[n:, :n] = -K
    A[n:, n:] = -nu
    return A


# --------------------------------------------------------------------------
# the certificate
# --------------------------------------------------------------------------


def certify_stability(params: CrawlerParams) -> StabilityReport:
    """End-to-end robust-stability certificate for the resting crawler.

    Runs the homotopy, evaluates the gradient residual, the reduced-Hessian
    and fiber-Rayleigh eigenvalues, and the reduced-linearization spectrum,
    then issues the verdict.  Construction failures are reported as the
    ``indefinite_inputs`` verdict with ``failure_reason`` set, never as
    exceptions.
    """
    empty = np.array([])

    def failed(reason: str) -> StabilityReport:
        return StabilityReport(
            reduced_equilibrium=None,
            gradient_norm=float("nan"),
            hessian_eigenvalues=empty,
            rayleigh_eigenvalues=empty,
            linearization_spectrum=empty.astype(complex),
            spectral_abscissa=float("nan"),
            verdict="indefinite_inputs",
            failure_reason=reason,
        )

    try:
        point = homotopy_equilibrium(params, check_hessian=False)
    except ContinuationFailed as exc:
        return failed(f"continuation failed: {exc}")
    except (AssumptionViolated, ChartDomain, DegenerateConfiguration) as exc:
        return failed(f"assumption violated: {exc}")

    grad_norm = float(np.linalg.norm(reduced_gradient(point, params)))
    hess_eigs = eigh(reduced_hessian(point, params), eigvals_only=True)
    ray = certify_rayleigh(point, params)
    try:
        A = reduced_linearization(point, params)
    except AssumptionViolated as exc:
        return failed(f"assumption violated: {exc}")
    spectrum = eig(A, right=False)
    abscissa = float(np.max(spectrum.real))

    grad_ok = grad_norm <= TOL_GRAD
    hess_ok = bool(hess_eigs[0] > TOL_EIG)
    ray_ok = ray.positive_definite
    if grad_ok and hess_ok and ray_ok and abscissa < -_ZERO_ABSCISSA:
        verdict = "robustly_stable"
    elif abscissa > _ZERO_ABSCISSA:
        verdict = "unstable"
    elif abs(abscissa) <= _ZERO_ABSCISSA:
        verdict = "marginal"
    else:
        verdict = "indefinite_inputs"
    return StabilityReport(
        reduced_equilibrium=point,
        gradient_norm=grad_norm,
        hessian_eigenvalues=hess_eigs,
        rayleigh_eigenvalues=ray.eigenvalues,
        linearization_spectrum=np.sort_complex(spectrum),
        spectral_abscissa=abscissa,
        verdict=verdict,
        failure_reason=None,
    )
