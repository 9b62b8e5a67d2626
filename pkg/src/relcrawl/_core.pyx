# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled accelerator: crawler right-hand sides + the adaptive RK5(4) loop.

This is a performance twin of the pure-Python path (`integrate.integrate`
driving `model.make_rhs`): same tableau, same PI controller, same error norm,
same dense-output coefficients.  `relcrawl.backend` selects it at import time
when available; RELCRAWL_FORCE_PYTHON=1 forces the Python path.

The public functions exchange flat float arrays so no Python objects are
touched inside the hot loop.
"""

import numpy as np

from libc.math cimport cos, sin, sqrt, fabs, pow, fmin, fmax, isfinite


cdef double L_MIN = 1e-8

# Dormand-Prince 5(4) tableau (same constants as relcrawl.integrate).
cdef double[7] C_ = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0]
cdef double[6][6] A_ = [
    [0, 0, 0, 0, 0, 0],
    [1.0 / 5.0, 0, 0, 0, 0, 0],
    [3.0 / 40.0, 9.0 / 40.0, 0, 0, 0, 0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0, 0, 0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0, 0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0],
]
cdef double[6] B_ = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0]
cdef double[7] E_ = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0]
cdef double[7][4] P_ = [
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
]

cdef double SAFETY = 0.9
cdef double ALPHA = 0.7 / 5.0
cdef double BETA = 0.4 / 5.0
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0


cdef struct Model:
    double kappa_s, nu_s, kappa_np, nu_ns, nu_db, gravity, width
    int profile        # 0 raw_c1, 1 mollified
    int db_chiprime    # de-bounce weight: 0 -> chi, 1 -> |chi'|
    int n_masses, sdim, n_springs, n_coords
    int pairs_i[6]
    int pairs_j[6]
    # schedule
    int mode           # 0 constant, 1 standard, 2 user_table
    double eps, omega, phase_origin
    double base[6]
    int tab_count[6]
    int tab_off[6]
    double tab_m[48]
    double tab_a[48]
    double tab_p[48]


cdef inline double c_chi(double x, Model* M) noexcept nogil:
    cdef double w, u, s
    if M.profile == 0:
        return 0.5 * x * x if x < 0.0 else 0.0
    w = M.width
    if x <= -w:
        return 0.5 * x * x
    if x >= w:
        return 0.0
    u = (x + w) / (2.0 * w)
    s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    return (1.0 - s) * 0.5 * x * x


cdef inline double c_chi_prime(double x, Model* M) noexcept nogil:
    cdef double w, u, s, sp
    if M.profile == 0:
        return x if x < 0.0 else 0.0
    w = M.width
    if x <= -w:
        return x
    if x >= w:
        return 0.0
    u = (x + w) / (2.0 * w)
    s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    sp = 30.0 * u * u * (1.0 - u) * (1.0 - u)
    return (1.0 - s) * x - sp / (2.0 * w) * 0.5 * x * x


cdef int c_schedule(double t, Model* M, double* rest) noexcept nogil:
    cdef double tau = t - M.phase_origin
    cdef double total, l1, l2, acc
    cdef int k, h
    if M.mode == 0 or M.eps == 0.0:
        for k in range(M.n_springs):
            rest[k] = M.base[k]
        return 0
    if M.mode == 1:
        total = M.base[0] + M.base[1] + M.base[2]
        l1 = M.base[0] + M.eps * cos(M.omega * tau)
        l2 = M.base[1] - M.eps * sin(M.omega * (tau - 0.5))
        rest[0] = l1
        rest[1] = l2
        rest[2] = total - l1 - l2
    else:
        for k in range(M.n_springs):
            acc = M.base[k]
            for h in range(M.tab_count[k]):
                acc += M.eps * M.tab_a[M.tab_off[k] + h] * cos(
                    M.tab_m[M.tab_off[k] + h] * M.omega * tau + M.tab_p[M.tab_off[k] + h]
                )
            rest[k] = acc
    for k in range(M.n_springs):
        if not isfinite(rest[k]):
            return 2
    return 0


cdef int c_rhs(double t, double* y, double* out, Model* M) noexcept nogil:
    """out = [u, accelerations].  Returns 0 ok, 1 degenerate, 2 bad schedule."""
    cdef double rest[6]
    cdef double dx[3]
    cdef int rc = c_schedule(t, M, rest)
    if rc != 0:
        return rc
    cdef int n = M.n_coords
    cdef int sdim = M.sdim
    cdef int i, j, k, s, bi, bj
    cdef double l, ldot, coef, f, zi, cp, cw, dbw
    for i in range(n):
        out[i] = y[n + i]
        out[n + i] = 0.0
    for k in range(M.n_springs):
        i = M.pairs_i[k]
        j = M.pairs_j[k]
        bi = i * sdim
        bj = j * sdim
        l = 0.0
        for s in range(sdim):
            dx[s] = y[bi + s] - y[bj + s]
            l += dx[s] * dx[s]
        l = sqrt(l)
        if l < L_MIN:
            return 1
        ldot = 0.0
        for s in range(sdim):
            ldot += dx[s] * (y[n + bi + s] - y[n + bj + s])
        ldot /= l
        coef = -(M.kappa_s * (l - rest[k]) + M.nu_s * ldot) / l
        for s in range(sdim):
            f = coef * dx[s]
            out[n + bi + s] += f
            out[n + bj + s] -= f
    for i in range(M.n_masses):
        bi = i * sdim
        zi = y[bi + sdim - 1]
        cp = c_chi_prime(zi, M)
        cw = fabs(cp)
        for s in range(sdim - 1):
            out[n + bi + s] += -M.nu_ns * cw * y[n + bi + s]
        dbw = cw if M.db_chiprime else c_chi(zi, M)
        out[n + bi + sdim - 1] += (
            -M.kappa_np * cp - M.gravity - M.nu_db * dbw * y[n + bi + sdim - 1]
        )
    return 0


cdef void _unpack(double[::1] pvec, double[::1] svec, Model* M):
    M.kappa_s = pvec[0]
    M.nu_s = pvec[1]
    M.kappa_np = pvec[2]
    M.nu_ns = pvec[3]
    M.nu_db = pvec[4]
    M.gravity = pvec[5]
    M.profile = <int> pvec[6]
    M.width = pvec[7]
    M.db_chiprime = <int> pvec[8]
    M.n_masses = <int> pvec[9]
    cdef int k
    if M.n_masses == 3:
        M.sdim = 2
        M.n_springs = 3
        M.pairs_i[0] = 1; M.pairs_j[0] = 2
        M.pairs_i[1] = 0; M.pairs_j[1] = 2
        M.pairs_i[2] = 0; M.pairs_j[2] = 1
    else:
        M.sdim = 3
        M.n_springs = 6
        M.pairs_i[0] = 0; M.pairs_j[0] = 1
        M.pairs_i[1] = 0; M.pairs_j[1] = 2
        M.pairs_i[2] = 0; M.pairs_j[2] = 3
        M.pairs_i[3] = 1; M.pairs_j[3] = 2
        M.pairs_i[4] = 1; M.pairs_j[4] = 3
        M.pairs_i[5] = 2; M.pairs_j[5] = 3
    M.n_coords = M.n_masses * M.sdim
    M.mode = <int> svec[0]
    M.eps = svec[1]
    M.omega = svec[2]
    M.phase_origin = svec[3]
    cdef int off = 4
    for k in range(M.n_springs):
        M.base[k] = svec[off + k]
    off += M.n_springs
    cdef int pos = 0
    cdef int cnt, h
    for k in range(M.n_springs):
        if M.mode == 2:
            cnt = <int> svec[off]
            off += 1
            M.tab_count[k] = cnt
            M.tab_off[k] = pos
            for h in range(cnt):
                M.tab_m[pos] = svec[off]
                M.tab_a[pos] = svec[off + 1]
                M.tab_p[pos] = svec[off + 2]
                off += 3
                pos += 1
        else:
            M.tab_count[k] = 0
            M.tab_off[k] = 0


def rhs_eval(double t, double[::1] y, double[::1] pvec, double[::1] svec):
    """Single right-hand-side evaluation (cross-checking against the Python path)."""
    cdef Model M
    _unpack(pvec, svec, &M)
    out = np.empty(2 * M.n_coords)
    cdef double[::1] out_v = out
    cdef int rc = c_rhs(t, &y[0], &out_v[0], &M)
    if rc == 1:
        raise ValueError("degenerate configuration")
    if rc == 2:
        raise ValueError("schedule produced non-finite rest lengths")
    return out


cdef inline double _err_norm(double* ev, double* y_old, double* y_new,
                             double rtol, double atol, int n) noexcept nogil:
    cdef double acc = 0.0
    cdef double scale, r, ai, bi
    cdef int i
    for i in range(n):
        ai = fabs(y_old[i])
        bi = fabs(y_new[i])
        scale = atol + rtol * (ai if ai > bi else bi)
        r = ev[i] / scale
        acc += r * r
    return sqrt(acc / n)


def _grow1(arr, int n_valid):
    out = np.empty(arr.shape[0] * 2)
    out[:n_valid] = arr[:n_valid]
    return out


def _grow2(arr, int n_valid):
    out = np.empty((arr.shape[0] * 2, arr.shape[1]))
    out[:n_valid] = arr[:n_valid]
    return out


def _grow3(arr, int n_valid):
    out = np.empty((arr.shape[0] * 2, arr.shape[1], arr.shape[2]))
    out[:n_valid] = arr[:n_valid]
    return out


def integrate_crawler(double[::1] y0, double t0, double t1,
                      double rtol, double atol, double max_step,
                      double initial_step, bint dense,
                      double[::1] pvec, double[::1] svec):
    """Adaptive RK5(4) run over [t0, t1] for the crawler system.

    Returns (status, ts, ys, coeffs, step_log); status 0 = ok, 1 = degenerate
    configuration, 2 = bad schedule, 3 = step-size underflow.  coeffs is None
    when ``dense`` is false.
    """
    cdef Model M
    _unpack(pvec, svec, &M)
    cdef int d = 2 * M.n_coords

    if t1 < t0:
        raise ValueError("t1 must be >= t0")

    cdef int cap = 1024
    ts_arr = np.empty(cap)
    ys_arr = np.empty((cap, d))
    qs_arr = np.empty((cap, d, 4)) if dense else np.empty((1, d, 4))
    log_arr = np.empty((cap, 4))
    cdef double[::1] ts = ts_arr
    cdef double[:, ::1] ys = ys_arr
    cdef double[:, :, ::1] qs = qs_arr
    cdef double[:, ::1] slog = log_arr

    y_arr = np.array(y0, dtype=float)
    cdef double[::1] y = y_arr
    cdef double K[7][24]
    cdef double ystage[24]
    cdef double ynew[24]
    cdef double evec[24]
    cdef double t = t0, h, err, err_prev = 1.0, factor, acc_sum
    cdef int i, s, sj, rc, nacc = 0, nlog = 0
    cdef bint accepted

    ts[0] = t0
    for i in range(d):
        ys[0, i] = y[i]

    if t1 == t0:
        return 0, ts_arr[:1].copy(), ys_arr[:1].copy(), (np.empty((0, d, 4)) if dense else None), np.empty((0, 4))

    cdef double f0[24]
    rc = c_rhs(t0, &y[0], f0, &M)
    if rc != 0:
        return rc, ts_arr[:1].copy(), ys_arr[:1].copy(), None, np.empty((0, 4))

    # Initial step: same heuristic as the Python path.
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, scale, h0, h1, r0
    if initial_step > 0.0:
        h = initial_step
    else:
        for i in range(d):
            scale = atol + rtol * fabs(y[i])
            r0 = y[i] / scale
            d0 += r0 * r0
            r0 = f0[i] / scale
            d1 += r0 * r0
        d0 = sqrt(d0 / d)
        d1 = sqrt(d1 / d)
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        for i in range(d):
            ystage[i] = y[i] + h0 * f0[i]
        rc = c_rhs(t0 + h0, ystage, ynew, &M)
        if rc != 0:
            return rc, ts_arr[:1].copy(), ys_arr[:1].copy(), None, np.empty((0, 4))
        for i in range(d):
            scale = atol + rtol * fabs(y[i])
            r0 = (ynew[i] - f0[i]) / scale
            d2 += r0 * r0
        d2 = sqrt(d2 / d) / h0
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = fmax(1e-6, h0 * 1e-3)
        else:
            h1 = pow(0.01 / fmax(d1, d2), 0.2)
        h = fmin(fmin(100.0 * h0, h1), max_step)
    h = fmin(fmin(h, max_step), t1 - t0)

    for i in range(d):
        K[0][i] = f0[i]

    while t < t1:
        h = fmin(fmin(h, max_step), t1 - t)
        if h < 1e-14 * fmax(1.0, fabs(t)):
            return 3, ts_arr[: nacc + 1].copy(), ys_arr[: nacc + 1].copy(), (qs_arr[:nacc].copy() if dense else None), log_arr[:nlog].copy()
        for s in range(1, 6):
            for i in range(d):
                acc_sum = 0.0
                for sj in range(s):
                    acc_sum += A_[s][sj] * K[sj][i]
                ystage[i] = y[i] + h * acc_sum
            rc = c_rhs(t + C_[s] * h, ystage, K[s], &M)
            if rc != 0:
                return rc, ts_arr[: nacc + 1].copy(), ys_arr[: nacc + 1].copy(), (qs_arr[:nacc].copy() if dense else None), log_arr[:nlog].copy()
        for i in range(d):
            acc_sum = 0.0
            for sj in range(6):
                acc_sum += B_[sj] * K[sj][i]
            ynew[i] = y[i] + h * acc_sum
        rc = c_rhs(t + h, ynew, K[6], &M)
        if rc != 0:
            return rc, ts_arr[: nacc + 1].copy(), ys_arr[: nacc + 1].copy(), (qs_arr[:nacc].copy() if dense else None), log_arr[:nlog].copy()
        for i in range(d):
            acc_sum = 0.0
            for sj in range(7):
                acc_sum += E_[sj] * K[sj][i]
            evec[i] = h * acc_sum
        err = _err_norm(evec, &y[0], ynew, rtol, atol, d)
        accepted = err <= 1.0

        if nlog >= slog.shape[0]:
            log_arr = _grow2(log_arr, nlog)
            slog = log_arr
        slog[nlog, 0] = t
        slog[nlog, 1] = h
        slog[nlog, 2] = err
        slog[nlog, 3] = 1.0 if accepted else 0.0
        nlog += 1

        if accepted:
            if nacc + 1 >= ts.shape[0]:
                ts_arr = _grow1(ts_arr, nacc + 1)
                ts = ts_arr
                ys_arr = _grow2(ys_arr, nacc + 1)
                ys = ys_arr
                if dense:
                    qs_arr = _grow3(qs_arr, nacc)
                    qs = qs_arr
            if dense:
                for i in range(d):
                    for s in range(4):
                        acc_sum = 0.0
                        for sj in range(7):
                            acc_sum += K[sj][i] * P_[sj][s]
                        qs[nacc, i, s] = acc_sum
            t = t + h
            for i in range(d):
                y[i] = ynew[i]
                K[0][i] = K[6][i]
            nacc += 1
            ts[nacc] = t
            for i in range(d):
                ys[nacc, i] = y[i]
            if err == 0.0:
                factor = FAC_MAX
            else:
                factor = SAFETY * pow(err, -ALPHA) * pow(err_prev, BETA)
            err_prev = fmax(err, 1e-10)
        else:
            factor = fmax(FAC_MIN, SAFETY * pow(err, -0.2))
            factor = fmin(factor, 1.0)
        h = h * fmin(FAC_MAX, fmax(FAC_MIN, factor))

    return (
        0,
        ts_arr[: nacc + 1].copy(),
        ys_arr[: nacc + 1].copy(),
        (qs_arr[:nacc].copy() if dense else None),
        log_arr[:nlog].copy(),
    )
