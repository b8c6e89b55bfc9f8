# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels (Cython backend).

Same contract, arithmetic, and operation order as `_kernels_py`, which is
the documented reference implementation; the two backends are expected to
produce bitwise-identical trajectories (the extension is compiled with FP
contraction disabled for that reason).
"""

from libc.math cimport M_PI, ceil, fabs, floor, isfinite, pow, sqrt

import numpy as np

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_NOT_FINITE = 2

METHOD_RK45 = 0
METHOD_RK4 = 1
METHOD_EULER_MARUYAMA = 2

ORDER_DET = 0
ORDER_STOCH1 = 1
ORDER_STOCH2 = 2

SMASS_CONST = 0
SMASS_SHELL = 1

cdef double FOUR_PI = 4.0 * M_PI
cdef double TWO_PI = 2.0 * M_PI
cdef double THIRD = 1.0 / 3.0

cdef double SAFETY = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 5.0

cdef int C_OK = 0
cdef int C_UNDERFLOW = 1
cdef int C_NOT_FINITE = 2
cdef int C_RK45 = 0
cdef int C_RK4 = 1
cdef int C_EM = 2
cdef int C_DET = 0
cdef int C_S1 = 1
cdef int C_S2 = 2
cdef int C_CONST = 0

# Dormand-Prince 5(4) tableau; row s-1 of _A carries the stage-s weights
# and row 5 the 5th-order propagation weights.
cdef double[6][6] _A
cdef double[7] _C
cdef double[7] _D

_A[0][0] = 1.0 / 5.0
_A[1][0] = 3.0 / 40.0
_A[1][1] = 9.0 / 40.0
_A[2][0] = 44.0 / 45.0
_A[2][1] = -56.0 / 15.0
_A[2][2] = 32.0 / 9.0
_A[3][0] = 19372.0 / 6561.0
_A[3][1] = -25360.0 / 2187.0
_A[3][2] = 64448.0 / 6561.0
_A[3][3] = -212.0 / 729.0
_A[4][0] = 9017.0 / 3168.0
_A[4][1] = -355.0 / 33.0
_A[4][2] = 46732.0 / 5247.0
_A[4][3] = 49.0 / 176.0
_A[4][4] = -5103.0 / 18656.0
_A[5][0] = 35.0 / 384.0
_A[5][1] = 0.0
_A[5][2] = 500.0 / 1113.0
_A[5][3] = 125.0 / 192.0
_A[5][4] = -2187.0 / 6784.0
_A[5][5] = 11.0 / 84.0
_C[0] = 0.0
_C[1] = 1.0 / 5.0
_C[2] = 3.0 / 10.0
_C[3] = 4.0 / 5.0
_C[4] = 8.0 / 9.0
_C[5] = 1.0
_C[6] = 1.0
_D[0] = 71.0 / 57600.0
_D[1] = 0.0
_D[2] = -71.0 / 16695.0
_D[3] = 71.0 / 1920.0
_D[4] = -17253.0 / 339200.0
_D[5] = 22.0 / 525.0
_D[6] = -1.0 / 40.0


cdef struct GuardLog:
    double* times
    long long* balls
    double* values
    long long n
    long long total
    long long cap


cdef inline void _guard_add(GuardLog* g, double t, long long ball,
                            double value) nogil:
    g.total += 1
    if g.n < g.cap:
        g.times[g.n] = t
        g.balls[g.n] = ball
        g.values[g.n] = value
        g.n += 1


cdef struct Recorder:
    double* times
    double* v
    double* z
    long long n
    long long cap
    long long nb


cdef inline void _rec_record(Recorder* r, double t, double v,
                             double* z) nogil:
    cdef long long i
    if r.n > 0 and t <= r.times[r.n - 1]:
        return
    if r.n >= r.cap:
        return
    r.times[r.n] = t
    r.v[r.n] = v
    for i in range(r.nb):
        r.z[r.n * r.nb + i] = z[i]
    r.n += 1


cdef double _sigma_mass_flat(double* z, unsigned char* active, int nb,
                             int smode, double c0, double qa,
                             double qb) nogil:
    cdef double acc, zi, r
    cdef int i
    if smode == C_CONST:
        return c0
    acc = 0.0
    for i in range(nb):
        if active[i]:
            zi = z[i]
            r = pow(zi, THIRD) if zi > 0.0 else 0.0
            acc += r * r + qb * r + qa
    return FOUR_PI * c0 * acc


cdef double _eval_rhs(int order, double t, double v, double* z,
                      unsigned char* active, int nb, double lead_coef,
                      double noise_coef, double inv_cs3, double forcing,
                      int smode, double c0, double qa, double qb,
                      double eps_den, double* dz, GuardLog* glog) nogil:
    cdef double s = 0.0
    cdef double corr = 0.0
    cdef double zi, r, u, den, term, dv, mass
    cdef int i
    for i in range(nb):
        if not active[i]:
            dz[i] = 0.0
            continue
        zi = z[i]
        r = pow(zi, THIRD) if zi > 0.0 else 0.0
        s += 1.0 - r * v
        dz[i] = 3.0 * v * r - 3.0
        if order == C_S2 and r > 0.0:
            u = v - 1.0 / r
            corr -= FOUR_PI * inv_cs3 * u
            corr -= FOUR_PI * inv_cs3 * (u * u)
            corr -= TWO_PI * inv_cs3 * (u * u * u) / r
            den = u + r * r
            if den > eps_den or den < -eps_den:
                term = u * u / den
            else:
                term = u * u / eps_den if den >= 0.0 else -(u * u) / eps_den
                _guard_add(glog, t, i, term)
            corr += FOUR_PI * inv_cs3 * term
    dv = lead_coef * s
    if order == C_S2:
        dv += corr
    if order != C_DET and forcing != 0.0:
        mass = _sigma_mass_flat(z, active, nb, smode, c0, qa, qb)
        dv += noise_coef * forcing * mass
    return dv


cdef void _stages(double t, double h, double v, double* z,
                  unsigned char* active, int nb, int order,
                  double lead_coef, double noise_coef, double inv_cs3,
                  double forcing, int smode, double c0, double qa,
                  double qb, double eps_den, GuardLog* glog, double* kv,
                  double* kz, double* tz, bint with_error, double* v5_out,
                  double* z5, double* ev_out, double* ez) nogil:
    cdef double acc, tv
    cdef int s, j, i
    kv[0] = _eval_rhs(order, t, v, z, active, nb, lead_coef, noise_coef,
                      inv_cs3, forcing, smode, c0, qa, qb, eps_den,
                      &kz[0], glog)
    for s in range(1, 6):
        acc = 0.0
        for j in range(s):
            acc += _A[s - 1][j] * kv[j]
        tv = v + h * acc
        for i in range(nb):
            acc = 0.0
            for j in range(s):
                acc += _A[s - 1][j] * kz[j * nb + i]
            tz[i] = z[i] + h * acc
        kv[s] = _eval_rhs(order, t + _C[s] * h, tv, tz, active, nb,
                          lead_coef, noise_coef, inv_cs3, forcing, smode,
                          c0, qa, qb, eps_den, &kz[s * nb], glog)
    acc = 0.0
    for j in range(6):
        acc += _A[5][j] * kv[j]
    v5_out[0] = v + h * acc
    for i in range(nb):
        acc = 0.0
        for j in range(6):
            acc += _A[5][j] * kz[j * nb + i]
        z5[i] = z[i] + h * acc
    if not with_error:
        ev_out[0] = 0.0
        return
    kv[6] = _eval_rhs(order, t + h, v5_out[0], z5, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, &kz[6 * nb], glog)
    acc = 0.0
    for j in range(7):
        acc += _D[j] * kv[j]
    ev_out[0] = h * acc
    for i in range(nb):
        acc = 0.0
        for j in range(7):
            acc += _D[j] * kz[j * nb + i]
        ez[i] = h * acc


cdef double _error_norm(double v, double v5, double ev, double* z,
                        double* z5, double* ez, int nb, double rel_tol,
                        double abs_tol) nogil:
    cdef double sc, total, av, az
    cdef int i
    av = fabs(v)
    az = fabs(v5)
    sc = abs_tol + rel_tol * (av if av > az else az)
    total = (ev / sc) * (ev / sc)
    for i in range(nb):
        av = fabs(z[i])
        az = fabs(z5[i])
        sc = abs_tol + rel_tol * (av if av > az else az)
        total += (ez[i] / sc) * (ez[i] / sc)
    return sqrt(total / (nb + 1.0))


cdef bint _all_finite(double v, double* z, int nb) nogil:
    cdef int i
    if not isfinite(v):
        return False
    for i in range(nb):
        if not isfinite(z[i]):
            return False
    return True


cdef int _run_adaptive(int order, double t0, double t_end, double span,
                       double* vp, double* z, unsigned char* active,
                       int nb, double lead_coef, double noise_coef,
                       double inv_cs3, double rel_tol, double abs_tol,
                       double eps_vanish, double eps_den, int smode,
                       double c0, double qa, double qb, double* inc,
                       long long nbins, double noise_dt, bint has_noise,
                       double out_stride, long long n_strides,
                       Recorder* rec, long long* vanish_ball,
                       double* vanish_time, long long* n_vanish,
                       GuardLog* glog, double* err_t, long long* n_steps,
                       long long* n_rej, double* kv, double* kz,
                       double* tz, double* z5, double* ez, double* zm,
                       double* zh) nogil:
    cdef double t = t0
    cdef double v = vp[0]
    cdef double h = 0.01 * span
    cdef double err_prev = 1e-4
    cdef bint last_rejected = False
    cdef long long bin_idx = 0
    cdef long long out_k = 1
    cdef int status = C_OK
    cdef double t_eps = 1e-14 * span
    cdef double event_tol = 1e-10 * t_end
    cdef double forcing, bin_end, t_cap, next_out, h_allow, h_try
    cdef double v5, ev, err, err_eff, fac, lo, hi, mid, vm, vh, t_ev, dummy
    cdef bint capped, crossed, finite, hit
    cdef long long j
    cdef int i, it

    err_t[0] = t_end
    while t < t_end - t_eps:
        if has_noise:
            j = bin_idx if bin_idx < nbins else nbins - 1
            forcing = inc[j] / noise_dt
            bin_end = t0 + (bin_idx + 1) * noise_dt
            if bin_end > t_end:
                bin_end = t_end
        else:
            forcing = 0.0
            bin_end = t_end
        t_cap = bin_end
        next_out = t_end
        if out_k <= n_strides:
            next_out = t0 + out_k * out_stride
            if next_out < t_cap:
                t_cap = next_out
        h_allow = t_cap - t
        if h_allow <= t_eps:
            t = t_cap
            if out_k <= n_strides and t_cap == next_out:
                _rec_record(rec, t, v, z)
                out_k += 1
            if has_noise and t_cap == bin_end:
                bin_idx += 1
            continue
        capped = h >= h_allow
        h_try = h_allow if capped else h
        if h_try < t_eps:
            status = C_UNDERFLOW
            err_t[0] = t
            break
        _stages(t, h_try, v, z, active, nb, order, lead_coef, noise_coef,
                inv_cs3, forcing, smode, c0, qa, qb, eps_den, glog, kv, kz,
                tz, True, &v5, z5, &ev, ez)
        n_steps[0] += 1
        finite = _all_finite(v5, z5, nb) and isfinite(ev)
        if finite:
            err = _error_norm(v, v5, ev, z, z5, ez, nb, rel_tol, abs_tol)
        else:
            err = 2.0
        if finite and err <= 1.0:
            crossed = False
            for i in range(nb):
                if active[i] and z5[i] <= eps_vanish:
                    crossed = True
                    break
            if crossed:
                lo = 0.0
                hi = 1.0
                it = 0
                while (hi - lo) * h_try > event_tol and it < 80:
                    mid = 0.5 * (lo + hi)
                    _stages(t, mid * h_try, v, z, active, nb, order,
                            lead_coef, noise_coef, inv_cs3, forcing, smode,
                            c0, qa, qb, eps_den, glog, kv, kz, tz, False,
                            &vm, zm, &dummy, ez)
                    hit = False
                    for i in range(nb):
                        if active[i] and zm[i] <= eps_vanish:
                            hit = True
                            break
                    if hit:
                        hi = mid
                    else:
                        lo = mid
                    it += 1
                _stages(t, hi * h_try, v, z, active, nb, order, lead_coef,
                        noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                        eps_den, glog, kv, kz, tz, False, &vh, zh, &dummy,
                        ez)
                t_ev = t + hi * h_try
                for i in range(nb):
                    if active[i] and zh[i] <= eps_vanish:
                        active[i] = 0
                        zh[i] = 0.0
                        vanish_ball[n_vanish[0]] = i
                        vanish_time[n_vanish[0]] = t_ev
                        n_vanish[0] += 1
                v = vh
                for i in range(nb):
                    z[i] = zh[i]
                t = t_ev
                _rec_record(rec, t, v, z)
                err_prev = 1e-4
                last_rejected = False
                continue
            v = v5
            for i in range(nb):
                z[i] = z5[i]
            if capped:
                t = t_cap
                if out_k <= n_strides and t_cap == next_out:
                    _rec_record(rec, t, v, z)
                    out_k += 1
                if has_noise and t_cap == bin_end:
                    bin_idx += 1
            else:
                t = t + h_try
            err_eff = err if err > 1e-10 else 1e-10
            fac = SAFETY * pow(err_eff, -0.14) * pow(err_prev, 0.08)
            if fac > FAC_MAX:
                fac = FAC_MAX
            if fac < FAC_MIN:
                fac = FAC_MIN
            if last_rejected and fac > 1.0:
                fac = 1.0
            h = h_try * fac
            err_prev = err_eff
            last_rejected = False
        else:
            n_rej[0] += 1
            if not finite:
                fac = 0.1
            else:
                err_eff = err if err > 1e-10 else 1e-10
                fac = SAFETY * pow(err_eff, -0.2)
                if fac < FAC_MIN:
                    fac = FAC_MIN
                if fac > 1.0:
                    fac = 1.0
            h = h_try * fac
            last_rejected = True
            if h < t_eps:
                status = C_UNDERFLOW
                err_t[0] = t
                break
    if status == C_OK:
        _rec_record(rec, t_end, v, z)
    else:
        _rec_record(rec, err_t[0], v, z)
    vp[0] = v
    return status


cdef void _rk4_step(double t, double h, double* vp, double* z,
                    unsigned char* active, int nb, int order,
                    double lead_coef, double noise_coef, double inv_cs3,
                    double forcing, int smode, double c0, double qa,
                    double qb, double eps_den, GuardLog* glog, double* kv,
                    double* kz, double* tz, double* z_new) nogil:
    cdef double v = vp[0]
    cdef double half = 0.5 * h
    cdef double sixth, tv
    cdef int i
    kv[0] = _eval_rhs(order, t, v, z, active, nb, lead_coef, noise_coef,
                      inv_cs3, forcing, smode, c0, qa, qb, eps_den,
                      &kz[0], glog)
    tv = v + half * kv[0]
    for i in range(nb):
        tz[i] = z[i] + half * kz[i]
    kv[1] = _eval_rhs(order, t + half, tv, tz, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, &kz[nb], glog)
    tv = v + half * kv[1]
    for i in range(nb):
        tz[i] = z[i] + half * kz[nb + i]
    kv[2] = _eval_rhs(order, t + half, tv, tz, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, &kz[2 * nb], glog)
    tv = v + h * kv[2]
    for i in range(nb):
        tz[i] = z[i] + h * kz[2 * nb + i]
    kv[3] = _eval_rhs(order, t + h, tv, tz, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, &kz[3 * nb], glog)
    sixth = h / 6.0
    vp[0] = v + sixth * (kv[0] + 2.0 * kv[1] + 2.0 * kv[2] + kv[3])
    for i in range(nb):
        z_new[i] = z[i] + sixth * (kz[i] + 2.0 * kz[nb + i]
                                   + 2.0 * kz[2 * nb + i] + kz[3 * nb + i])


cdef int _run_fixed(int method, int order, double t0, double t_end,
                    double span, double* vp, double* z,
                    unsigned char* active, int nb, double lead_coef,
                    double noise_coef, double inv_cs3, double dt_fixed,
                    double eps_vanish, double eps_den, int smode,
                    double c0, double qa, double qb, double* inc,
                    long long n_inc, double noise_dt, bint has_noise,
                    double out_stride, Recorder* rec,
                    long long* vanish_ball, double* vanish_time,
                    long long* n_vanish, GuardLog* glog, double* err_t,
                    long long* n_steps, double* kv, double* kz,
                    double* tz, double* dz, double* z_new) nogil:
    cdef int status = C_OK
    cdef long long nbins, out_every, gstep, b, nsub, j
    cdef double bt0, bt1, forcing, dw, width, hsub, t, t_new, dv, mass
    cdef double v = vp[0]
    cdef bint em = method == C_EM
    cdef bint done = False
    cdef bint vanished_now
    cdef int i

    err_t[0] = t_end
    if has_noise:
        nbins = <long long>ceil(span / noise_dt - 1e-9)
        if nbins < 1:
            nbins = 1
    else:
        nbins = 1
    out_every = <long long>floor(out_stride / dt_fixed + 0.5)
    if em and has_noise:
        out_every = <long long>floor(out_stride / noise_dt + 0.5)
    if out_every < 1:
        out_every = 1
    gstep = 0
    for b in range(nbins):
        if has_noise:
            bt0 = t0 + b * noise_dt
            bt1 = t0 + (b + 1) * noise_dt
            if bt1 > t_end or b == nbins - 1:
                bt1 = t_end
            forcing = inc[b] / noise_dt
            dw = inc[b]
        else:
            bt0 = t0
            bt1 = t_end
            forcing = 0.0
            dw = 0.0
        width = bt1 - bt0
        if width <= 0.0:
            continue
        if em and has_noise:
            nsub = 1
        else:
            nsub = <long long>floor(width / dt_fixed + 0.5)
            if nsub < 1:
                nsub = 1
        hsub = width / nsub
        for j in range(nsub):
            t = bt0 + j * hsub
            if em:
                dv = _eval_rhs(order, t, v, z, active, nb, lead_coef,
                               noise_coef, inv_cs3, 0.0, smode, c0, qa, qb,
                               eps_den, dz, glog)
                mass = _sigma_mass_flat(z, active, nb, smode, c0, qa, qb)
                v = v + hsub * dv + noise_coef * mass * dw
                for i in range(nb):
                    z[i] = z[i] + hsub * dz[i]
            else:
                vp[0] = v
                _rk4_step(t, hsub, vp, z, active, nb, order, lead_coef,
                          noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                          eps_den, glog, kv, kz, tz, z_new)
                v = vp[0]
                for i in range(nb):
                    z[i] = z_new[i]
            t_new = bt1 if j == nsub - 1 else bt0 + (j + 1) * hsub
            gstep += 1
            n_steps[0] += 1
            if not _all_finite(v, z, nb):
                status = C_NOT_FINITE
                err_t[0] = t_new
                done = True
                break
            vanished_now = False
            for i in range(nb):
                if active[i] and z[i] <= eps_vanish:
                    active[i] = 0
                    z[i] = 0.0
                    vanish_ball[n_vanish[0]] = i
                    vanish_time[n_vanish[0]] = t_new
                    n_vanish[0] += 1
                    vanished_now = True
            if vanished_now or gstep % out_every == 0:
                _rec_record(rec, t_new, v, z)
        if done:
            break
    if status == C_OK:
        _rec_record(rec, t_end, v, z)
    else:
        _rec_record(rec, err_t[0], v, z)
    vp[0] = v
    return status


def run_path(int method, int order, double t0, double t_end, double v0,
             z0, active0, double alpha, double cs3, double rel_tol,
             double abs_tol, double dt_fixed, double eps_vanish,
             double eps_den, int smode, double c0, double qa, double qb,
             increments, double noise_dt, double out_stride,
             int max_guard=256):
    """Advance one trajectory from t0 to t_end; see `_kernels_py.run_path`."""
    cdef int nb = len(z0)
    cdef double span = t_end - t0
    cdef double[::1] z = np.ascontiguousarray(z0, dtype=np.float64).copy()
    cdef unsigned char[::1] active = \
        np.ascontiguousarray(active0, dtype=np.uint8).copy()
    cdef double[::1] inc = np.ascontiguousarray(increments, dtype=np.float64)
    cdef long long nbins = inc.shape[0]
    cdef bint has_noise = nbins > 0 and order != ORDER_DET
    cdef double v = v0
    cdef double lead_coef, noise_coef, inv_cs3

    if order == C_S2:
        lead_coef = FOUR_PI * alpha / cs3
        noise_coef = 1.0 / cs3
    elif order == C_S1:
        lead_coef = FOUR_PI * pow(alpha, -THIRD)
        noise_coef = pow(alpha, -4.0 / 3.0)
    else:
        lead_coef = FOUR_PI * pow(alpha, -THIRD)
        noise_coef = 0.0
    inv_cs3 = 1.0 / cs3

    cdef long long n_strides = <long long>(span / out_stride + 1e-9)
    cdef long long max_rows = n_strides + nb + 8

    times_arr = np.zeros(max_rows)
    vout_arr = np.zeros(max_rows)
    zout_arr = np.zeros((max_rows, nb))
    vanish_ball_arr = np.zeros(nb, dtype=np.int64)
    vanish_time_arr = np.zeros(nb)
    guard_time_arr = np.zeros(max_guard)
    guard_ball_arr = np.zeros(max_guard, dtype=np.int64)
    guard_value_arr = np.zeros(max_guard)
    kv_arr = np.zeros(7)
    kz_arr = np.zeros(7 * nb)
    scratch = np.zeros((5, max(nb, 1)))

    cdef double[::1] times_mv = times_arr
    cdef double[::1] vout_mv = vout_arr
    cdef double[:, ::1] zout_mv = zout_arr
    cdef long long[::1] vb_mv = vanish_ball_arr
    cdef double[::1] vt_mv = vanish_time_arr
    cdef double[::1] gt_mv = guard_time_arr
    cdef long long[::1] gb_mv = guard_ball_arr
    cdef double[::1] gv_mv = guard_value_arr
    cdef double[::1] kv_mv = kv_arr
    cdef double[::1] kz_mv = kz_arr
    cdef double[:, ::1] sc_mv = scratch

    cdef Recorder rec
    rec.times = &times_mv[0]
    rec.v = &vout_mv[0]
    rec.z = &zout_mv[0, 0]
    rec.n = 0
    rec.cap = max_rows
    rec.nb = nb

    cdef GuardLog glog
    glog.times = &gt_mv[0]
    glog.balls = &gb_mv[0]
    glog.values = &gv_mv[0]
    glog.n = 0
    glog.total = 0
    glog.cap = max_guard

    cdef long long n_vanish = 0
    cdef long long n_steps = 0
    cdef long long n_rej = 0
    cdef double err_t = t_end
    cdef int status = C_OK
    cdef double* inc_ptr = &inc[0] if nbins > 0 else NULL

    _rec_record(&rec, t0, v, &z[0])
    if method == C_RK45:
        with nogil:
            status = _run_adaptive(
                order, t0, t_end, span, &v, &z[0], &active[0], nb,
                lead_coef, noise_coef, inv_cs3, rel_tol, abs_tol,
                eps_vanish, eps_den, smode, c0, qa, qb, inc_ptr, nbins,
                noise_dt, has_noise, out_stride, n_strides, &rec,
                &vb_mv[0], &vt_mv[0], &n_vanish, &glog, &err_t, &n_steps,
                &n_rej, &kv_mv[0], &kz_mv[0], &sc_mv[0, 0], &sc_mv[1, 0],
                &sc_mv[2, 0], &sc_mv[3, 0], &sc_mv[4, 0])
    else:
        with nogil:
            status = _run_fixed(
                method, order, t0, t_end, span, &v, &z[0], &active[0], nb,
                lead_coef, noise_coef, inv_cs3, dt_fixed, eps_vanish,
                eps_den, smode, c0, qa, qb, inc_ptr, nbins, noise_dt,
                has_noise, out_stride, &rec, &vb_mv[0], &vt_mv[0],
                &n_vanish, &glog, &err_t, &n_steps, &kv_mv[0], &kz_mv[0],
                &sc_mv[0, 0], &sc_mv[1, 0], &sc_mv[2, 0])

    n_out = rec.n
    return (status, err_t,
            times_arr[:n_out].copy(), vout_arr[:n_out].copy(),
            zout_arr[:n_out].copy(),
            vanish_ball_arr[:n_vanish].copy(),
            vanish_time_arr[:n_vanish].copy(),
            guard_time_arr[:glog.n].copy(),
            guard_ball_arr[:glog.n].copy(),
            guard_value_arr[:glog.n].copy(),
            int(glog.total), int(n_steps), int(n_rej))
