"""Pure-Python integration kernels (fallback backend).

Flat-array time steppers for the ball dynamics: embedded Dormand-Prince
5(4) with PI step-size control and vanish-event bisection, classical
fixed-step RK4 with per-step vanish clamping, and an Euler-Maruyama
stepper.  The compiled backend in ``_kernels.pyx`` implements the same
contract with the same arithmetic, in the same order, so the two backends
produce bitwise-identical trajectories.

Stochastic runs receive the Brownian increments as an array; the forcing
(dW/dt) is held constant inside each increment bin and steps never
straddle a bin boundary.
"""

import math

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

FOUR_PI = 4.0 * math.pi
TWO_PI = 2.0 * math.pi
THIRD = 1.0 / 3.0

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0

# Dormand-Prince 5(4) tableau; D holds the (5th - 4th order) error weights.
A2 = (1.0 / 5.0,)
A3 = (3.0 / 40.0, 9.0 / 40.0)
A4 = (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0)
A5 = (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0)
A6 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
      -5103.0 / 18656.0)
B5 = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
      11.0 / 84.0)
C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
D = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
     -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


def _sigma_mass_flat(z, active, nb, smode, c0, qa, qb):
    if smode == SMASS_CONST:
        return c0
    acc = 0.0
    for i in range(nb):
        if active[i]:
            zi = z[i]
            r = zi ** THIRD if zi > 0.0 else 0.0
            acc += r * r + qb * r + qa
    return FOUR_PI * c0 * acc


def _eval_rhs(order, t, v, z, active, nb, lead_coef, noise_coef, inv_cs3,
              forcing, smode, c0, qa, qb, eps_den, dz, glog):
    """Fill dz and return dv for the state (v, z); records guard clamps."""
    s = 0.0
    corr = 0.0
    for i in range(nb):
        if not active[i]:
            dz[i] = 0.0
            continue
        zi = z[i]
        r = zi ** THIRD if zi > 0.0 else 0.0
        s += 1.0 - r * v
        dz[i] = 3.0 * v * r - 3.0
        if order == ORDER_STOCH2 and r > 0.0:
            u = v - 1.0 / r
            corr -= FOUR_PI * inv_cs3 * u
            corr -= FOUR_PI * inv_cs3 * (u * u)
            corr -= TWO_PI * inv_cs3 * (u * u * u) / r
            den = u + r * r
            if den > eps_den or den < -eps_den:
                term = u * u / den
            else:
                term = u * u / eps_den if den >= 0.0 else -(u * u) / eps_den
                glog.add(t, i, term)
            corr += FOUR_PI * inv_cs3 * term
    dv = lead_coef * s
    if order == ORDER_STOCH2:
        dv += corr
    if order != ORDER_DET and forcing != 0.0:
        mass = _sigma_mass_flat(z, active, nb, smode, c0, qa, qb)
        dv += noise_coef * forcing * mass
    return dv


class _GuardLog:
    """Bounded log of singular-guard clamps in the rational correction."""

    def __init__(self, cap):
        self.cap = cap
        self.times = []
        self.balls = []
        self.values = []
        self.total = 0

    def add(self, t, ball, value):
        self.total += 1
        if len(self.times) < self.cap:
            self.times.append(t)
            self.balls.append(ball)
            self.values.append(value)


class _Recorder:
    def __init__(self, max_rows, nb):
        self.times = np.zeros(max_rows)
        self.v = np.zeros(max_rows)
        self.z = np.zeros((max_rows, nb))
        self.n = 0
        self.nb = nb

    def record(self, t, v, z):
        if self.n > 0 and t <= self.times[self.n - 1]:
            return
        if self.n >= len(self.times):
            return
        self.times[self.n] = t
        self.v[self.n] = v
        for i in range(self.nb):
            self.z[self.n, i] = z[i]
        self.n += 1


def _stages(t, h, v, z, active, nb, order, lead_coef, noise_coef, inv_cs3,
            forcing, smode, c0, qa, qb, eps_den, glog, kv, kz, tz,
            with_error):
    """One Dormand-Prince step from (t, v, z); returns (v5, z5, err_raw).

    ``err_raw`` is the unscaled per-component error vector folded into
    (err_v, err_z list); caller applies the tolerance norm.  When
    ``with_error`` is false the 7th stage is skipped and errors are None.
    """
    kv[0] = _eval_rhs(order, t, v, z, active, nb, lead_coef, noise_coef,
                      inv_cs3, forcing, smode, c0, qa, qb, eps_den, kz[0],
                      glog)
    a_rows = (A2, A3, A4, A5, A6, B5)
    for s in range(1, 6):
        row = a_rows[s - 1]
        acc = 0.0
        for j in range(s):
            acc += row[j] * kv[j]
        tv = v + h * acc
        for i in range(nb):
            acc = 0.0
            for j in range(s):
                acc += row[j] * kz[j][i]
            tz[i] = z[i] + h * acc
        kv[s] = _eval_rhs(order, t + C[s] * h, tv, tz, active, nb, lead_coef,
                          noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                          eps_den, kz[s], glog)
    acc = 0.0
    for j in range(6):
        acc += B5[j] * kv[j]
    v5 = v + h * acc
    z5 = [0.0] * nb
    for i in range(nb):
        acc = 0.0
        for j in range(6):
            acc += B5[j] * kz[j][i]
        z5[i] = z[i] + h * acc
    if not with_error:
        return v5, z5, None, None
    kv[6] = _eval_rhs(order, t + h, v5, z5, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, kz[6], glog)
    acc = 0.0
    for j in range(7):
        acc += D[j] * kv[j]
    ev = h * acc
    ez = [0.0] * nb
    for i in range(nb):
        acc = 0.0
        for j in range(7):
            acc += D[j] * kz[j][i]
        ez[i] = h * acc
    return v5, z5, ev, ez


def _error_norm(v, v5, ev, z, z5, ez, nb, rel_tol, abs_tol):
    sc = abs_tol + rel_tol * max(abs(v), abs(v5))
    total = (ev / sc) ** 2
    for i in range(nb):
        sc = abs_tol + rel_tol * max(abs(z[i]), abs(z5[i]))
        total += (ez[i] / sc) ** 2
    return math.sqrt(total / (nb + 1.0))


def _all_finite(v, z, nb):
    if not math.isfinite(v):
        return False
    for i in range(nb):
        if not math.isfinite(z[i]):
            return False
    return True


def run_path(method, order, t0, t_end, v0, z0, active0, alpha, cs3,
             rel_tol, abs_tol, dt_fixed, eps_vanish, eps_den,
             smode, c0, qa, qb, increments, noise_dt, out_stride,
             max_guard=256):
    """Advance one trajectory from t0 to t_end; see kernels.KernelResult.

    ``increments`` is an empty array for noise-free runs.  Output rows are
    written at t0, at every ``out_stride``, at each vanish event, and at
    t_end; times are strictly increasing.
    """
    nb = len(z0)
    span = t_end - t0
    z = [float(z0[i]) for i in range(nb)]
    active = [int(active0[i]) for i in range(nb)]
    v = float(v0)
    has_noise = len(increments) > 0 and order != ORDER_DET
    inc = increments

    if order == ORDER_STOCH2:
        lead_coef = FOUR_PI * alpha / cs3
        noise_coef = 1.0 / cs3
    elif order == ORDER_STOCH1:
        lead_coef = FOUR_PI * alpha ** (-THIRD)
        noise_coef = alpha ** (-4.0 / 3.0)
    else:
        lead_coef = FOUR_PI * alpha ** (-THIRD)
        noise_coef = 0.0
    inv_cs3 = 1.0 / cs3

    glog = _GuardLog(max_guard)
    n_strides = int(span / out_stride + 1e-9)
    rec = _Recorder(n_strides + nb + 8, nb)
    rec.record(t0, v, z)
    vanish_ball = []
    vanish_time = []
    n_steps = 0
    n_rej = 0
    status = STATUS_OK
    err_t = t_end

    if method == METHOD_RK45:
        status, err_t, n_steps, n_rej = _run_adaptive(
            order, t0, t_end, span, v, z, active, nb, lead_coef, noise_coef,
            inv_cs3, rel_tol, abs_tol, eps_vanish, eps_den, smode, c0, qa,
            qb, inc, noise_dt, has_noise, out_stride, n_strides, rec,
            vanish_ball, vanish_time, glog)
    else:
        status, err_t, n_steps = _run_fixed(
            method, order, t0, t_end, span, v, z, active, nb, lead_coef,
            noise_coef, inv_cs3, dt_fixed, eps_vanish, eps_den, smode, c0,
            qa, qb, inc, noise_dt, has_noise, out_stride, rec, vanish_ball,
            vanish_time, glog)

    return (status, err_t,
            rec.times[:rec.n].copy(), rec.v[:rec.n].copy(),
            rec.z[:rec.n].copy(),
            np.array(vanish_ball, dtype=np.int64),
            np.array(vanish_time, dtype=float),
            np.array(glog.times, dtype=float),
            np.array(glog.balls, dtype=np.int64),
            np.array(glog.values, dtype=float),
            glog.total, n_steps, n_rej)


def _run_adaptive(order, t0, t_end, span, v, z, active, nb, lead_coef,
                  noise_coef, inv_cs3, rel_tol, abs_tol, eps_vanish,
                  eps_den, smode, c0, qa, qb, inc, noise_dt, has_noise,
                  out_stride, n_strides, rec, vanish_ball, vanish_time,
                  glog):
    kv = [0.0] * 7
    kz = [[0.0] * nb for _ in range(7)]
    tz = [0.0] * nb
    nbins = len(inc)
    event_tol = 1e-10 * t_end
    t = t0
    h = 0.01 * span
    err_prev = 1e-4
    last_rejected = False
    bin_idx = 0
    out_k = 1
    n_steps = 0
    n_rej = 0
    status = STATUS_OK
    err_t = t_end
    t_eps = 1e-14 * span

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
            # sitting on a cap boundary: advance bookkeeping, no step
            t = t_cap
            if out_k <= n_strides and t_cap == next_out:
                rec.record(t, v, z)
                out_k += 1
            if has_noise and t_cap == bin_end:
                bin_idx += 1
            continue
        capped = h >= h_allow
        h_try = h_allow if capped else h
        if h_try < t_eps:
            status = STATUS_STEP_UNDERFLOW
            err_t = t
            break
        v5, z5, ev, ez = _stages(t, h_try, v, z, active, nb, order,
                                 lead_coef, noise_coef, inv_cs3, forcing,
                                 smode, c0, qa, qb, eps_den, glog, kv, kz,
                                 tz, True)
        n_steps += 1
        finite = _all_finite(v5, z5, nb) and math.isfinite(ev)
        if finite:
            err = _error_norm(v, v5, ev, z, z5, ez, nb, rel_tol, abs_tol)
        else:
            err = float("inf")
        if err <= 1.0:
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
                    vm, zm, _, _ = _stages(t, mid * h_try, v, z, active, nb,
                                           order, lead_coef, noise_coef,
                                           inv_cs3, forcing, smode, c0, qa,
                                           qb, eps_den, glog, kv, kz, tz,
                                           False)
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
                vh, zh, _, _ = _stages(t, hi * h_try, v, z, active, nb,
                                       order, lead_coef, noise_coef,
                                       inv_cs3, forcing, smode, c0, qa, qb,
                                       eps_den, glog, kv, kz, tz, False)
                t_ev = t + hi * h_try
                for i in range(nb):
                    if active[i] and zh[i] <= eps_vanish:
                        active[i] = 0
                        zh[i] = 0.0
                        vanish_ball.append(i)
                        vanish_time.append(t_ev)
                v = vh
                for i in range(nb):
                    z[i] = zh[i]
                t = t_ev
                rec.record(t, v, z)
                err_prev = 1e-4
                last_rejected = False
                continue
            v = v5
            for i in range(nb):
                z[i] = z5[i]
            if capped:
                t = t_cap
                if out_k <= n_strides and t_cap == next_out:
                    rec.record(t, v, z)
                    out_k += 1
                if has_noise and t_cap == bin_end:
                    bin_idx += 1
            else:
                t = t + h_try
            err_eff = err if err > 1e-10 else 1e-10
            fac = SAFETY * err_eff ** -0.14 * err_prev ** 0.08
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
            n_rej += 1
            if not finite:
                fac = 0.1
            else:
                err_eff = err if err > 1e-10 else 1e-10
                fac = SAFETY * err_eff ** -0.2
                if fac < FAC_MIN:
                    fac = FAC_MIN
                if fac > 1.0:
                    fac = 1.0
            h = h_try * fac
            last_rejected = True
            if h < t_eps:
                status = STATUS_STEP_UNDERFLOW
                err_t = t
                break
    if status == STATUS_OK:
        rec.record(t_end, v, z)
    else:
        rec.record(err_t, v, z)
    return status, err_t, n_steps, n_rej


def _rk4_step(t, h, v, z, active, nb, order, lead_coef, noise_coef,
              inv_cs3, forcing, smode, c0, qa, qb, eps_den, glog, kv, kz,
              tz):
    kv[0] = _eval_rhs(order, t, v, z, active, nb, lead_coef, noise_coef,
                      inv_cs3, forcing, smode, c0, qa, qb, eps_den, kz[0],
                      glog)
    half = 0.5 * h
    tv = v + half * kv[0]
    for i in range(nb):
        tz[i] = z[i] + half * kz[0][i]
    kv[1] = _eval_rhs(order, t + half, tv, tz, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, kz[1], glog)
    tv = v + half * kv[1]
    for i in range(nb):
        tz[i] = z[i] + half * kz[1][i]
    kv[2] = _eval_rhs(order, t + half, tv, tz, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, kz[2], glog)
    tv = v + h * kv[2]
    for i in range(nb):
        tz[i] = z[i] + h * kz[2][i]
    kv[3] = _eval_rhs(order, t + h, tv, tz, active, nb, lead_coef,
                      noise_coef, inv_cs3, forcing, smode, c0, qa, qb,
                      eps_den, kz[3], glog)
    sixth = h / 6.0
    v_new = v + sixth * (kv[0] + 2.0 * kv[1] + 2.0 * kv[2] + kv[3])
    z_new = [0.0] * nb
    for i in range(nb):
        z_new[i] = z[i] + sixth * (kz[0][i] + 2.0 * kz[1][i]
                                   + 2.0 * kz[2][i] + kz[3][i])
    return v_new, z_new


def _run_fixed(method, order, t0, t_end, span, v, z, active, nb, lead_coef,
               noise_coef, inv_cs3, dt_fixed, eps_vanish, eps_den, smode,
               c0, qa, qb, inc, noise_dt, has_noise, out_stride, rec,
               vanish_ball, vanish_time, glog):
    kv = [0.0] * 4
    kz = [[0.0] * nb for _ in range(4)]
    tz = [0.0] * nb
    dz = [0.0] * nb
    status = STATUS_OK
    err_t = t_end
    n_steps = 0
    if has_noise:
        nbins = max(1, int(math.ceil(span / noise_dt - 1e-9)))
    else:
        nbins = 1
    em = method == METHOD_EULER_MARUYAMA
    out_every = max(1, int(math.floor(out_stride / dt_fixed + 0.5)))
    if em and has_noise:
        out_every = max(1, int(math.floor(out_stride / noise_dt + 0.5)))
    gstep = 0
    done = False
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
            nsub = max(1, int(math.floor(width / dt_fixed + 0.5)))
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
                v, z = _rk4_step(t, hsub, v, z, active, nb, order,
                                 lead_coef, noise_coef, inv_cs3, forcing,
                                 smode, c0, qa, qb, eps_den, glog, kv, kz,
                                 tz)
            t_new = bt1 if j == nsub - 1 else bt0 + (j + 1) * hsub
            gstep += 1
            n_steps += 1
            if not _all_finite(v, z, nb):
                status = STATUS_NOT_FINITE
                err_t = t_new
                done = True
                break
            vanished_now = False
            for i in range(nb):
                if active[i] and z[i] <= eps_vanish:
                    active[i] = 0
                    z[i] = 0.0
                    vanish_ball.append(i)
                    vanish_time.append(t_new)
                    vanished_now = True
            if vanished_now or gstep % out_every == 0:
                rec.record(t_new, v, z)
        if done:
            break
    if status == STATUS_OK:
        rec.record(t_end, v, z)
    else:
        rec.record(err_t, v, z)
    return status, err_t, n_steps
