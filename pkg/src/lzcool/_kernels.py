"""Compiled inner loops: rate formulas, right-hand sides and the RK stepper.

Everything here works on plain floats and 1-D arrays so that numba can
compile it in nopython mode. The public dataclass API lives in
:mod:`lzcool.model`, :mod:`lzcool.baths` and :mod:`lzcool.dynamics`.

Parameter vector layout (``params``)::

    0 velocity   1 eps0   2 static   3 temperature
    4 alpha_x    5 cutoff_x          6 alpha_z      7 cutoff_z

With ``static != 0`` the drive is frozen at ``eps0`` and the inertial term
is dropped.
"""
import math

import numpy as np
from numba import njit

MODEL_QME = 0
MODEL_LAB = 1

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_NONFINITE = 2

COTH_SWITCH = 20.0

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
# difference between 5th- and embedded 4th-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)

# Shampine's 4th-order continuous extension, rows = stages 1,3,4,5,6,7
_P = np.array([
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0],
])

_SAFETY = 0.9
_UNDERFLOW = 16.0 * 2.220446049250313e-16
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@njit(cache=True)
def safe_coth(x):
    """coth(x) for x > 0; switches to 1 + 2 exp(-2x) above ``COTH_SWITCH``."""
    if x > COTH_SWITCH:
        return 1.0 + 2.0 * math.exp(-2.0 * x)
    return 1.0 / math.tanh(x)


@njit(cache=True)
def ohmic(alpha, cutoff, omega):
    return alpha * omega * math.exp(-omega / cutoff)


@njit(cache=True)
def frame(velocity, eps0, static, t):
    """Return (eps, splitting, phi_dot, f1, f2) at time t (gap = 1)."""
    if static != 0.0:
        eps = eps0
    else:
        eps = velocity * t + eps0
    splitting = math.sqrt(1.0 + eps * eps)
    if static != 0.0:
        phi_dot = 0.0
    else:
        phi_dot = velocity / (splitting * splitting)
    return eps, splitting, phi_dot, eps / splitting, 1.0 / splitting


@njit(cache=True)
def rates(temperature, alpha_x, cutoff_x, alpha_z, cutoff_z, splitting, f1,
          f2):
    """Return (gamma_r, gamma_d, gamma_xz, gamma_zx, r_bar_x)."""
    jx = ohmic(alpha_x, cutoff_x, splitting) if alpha_x != 0.0 else 0.0
    jz = ohmic(alpha_z, cutoff_z, splitting) if alpha_z != 0.0 else 0.0
    if temperature > 0.0:
        half = 0.5 * splitting / temperature
        r_bar = math.tanh(half)
        if half > COTH_SWITCH:
            coth = 1.0 + 2.0 * math.exp(-2.0 * half)
        else:
            coth = 1.0 / r_bar
    else:
        coth = 1.0
        r_bar = 1.0
    two_pi = 2.0 * math.pi
    gamma_r = two_pi * coth * (f1 * f1 * jx + f2 * f2 * jz)
    # zero-frequency limit of n(w) J(w) for the ohmic form is alpha * T
    gamma_d = 2.0 * two_pi * (alpha_z + alpha_x) * temperature
    gamma_xz = 2.0 * two_pi * f1 * f2 * (alpha_x - alpha_z) * temperature
    gamma_zx = two_pi * f1 * f2 * coth * (jx - jz)
    return gamma_r, gamma_d, gamma_xz, gamma_zx, r_bar


@njit(cache=True)
def bloch_rhs(rx, ry, rz, splitting, phi_dot, gamma_r, gamma_d, gamma_xz,
              gamma_zx, r_bar):
    dx = (phi_dot - gamma_xz) * rz - gamma_r * (rx - r_bar)
    dy = splitting * rz - (gamma_d + gamma_r) * ry
    dz = (-phi_dot * rx - splitting * ry - gamma_d * rz
          - gamma_zx * (rx - r_bar))
    return dx, dy, dz


@njit(cache=True)
def _rhs(model, t, y, params, out):
    if model == MODEL_QME:
        _, e, phi_dot, f1, f2 = frame(params[0], params[1], params[2], t)
        gr, gd, gxz, gzx, rb = rates(params[3], params[4], params[5],
                                     params[6], params[7], e, f1, f2)
        dx, dy, dz = bloch_rhs(y[0], y[1], y[2], e, phi_dot, gr, gd, gxz,
                               gzx, rb)
        out[0] = dx
        out[1] = dy
        out[2] = dz
    else:
        # i d(psi)/dt = H psi, H = -(eps sz + sx)/2, psi = (a, b) as
        # (Re a, Im a, Re b, Im b)
        eps = params[0] * t + params[1]
        ar, ai, br, bi = y[0], y[1], y[2], y[3]
        # H psi
        har = 0.5 * (-eps * ar - br)
        hai = 0.5 * (-eps * ai - bi)
        hbr = 0.5 * (-ar + eps * br)
        hbi = 0.5 * (-ai + eps * bi)
        # -i (x + i y) = y - i x
        out[0] = hai
        out[1] = -har
        out[2] = hbi
        out[3] = -hbr


@njit(cache=True)
def _norm_excess(model, y):
    """How far the state's norm exceeds 1 (Bloch norm or |psi|)."""
    s = 0.0
    for i in range(y.shape[0]):
        s += y[i] * y[i]
    return math.sqrt(s) - 1.0


@njit(cache=True, nogil=True)
def integrate_dp5(model, params, y0, t_start, t_end, rtol, atol, max_step,
                  sample_times):
    """Adaptive Dormand-Prince 5(4) from ``t_start`` to ``t_end``.

    ``sample_times`` must be sorted within [t_start, t_end]; the returned
    ``samples`` array holds the dense-output state at each. The last step
    is clipped to land exactly on ``t_end``.

    Returns (samples, y_end, n_accepted, n_rejected, n_rhs,
    max_norm_excess, status, t_fail).
    """
    n = y0.shape[0]
    n_samples = sample_times.shape[0]
    samples = np.empty((n_samples, n))
    y = y0.copy()
    y_new = np.empty(n)
    y_tmp = np.empty(n)
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    k5 = np.empty(n)
    k6 = np.empty(n)
    k7 = np.empty(n)

    t = t_start
    _rhs(model, t, y, params, k1)
    n_rhs = 1
    h = max_step
    n_acc = 0
    n_rej = 0
    max_excess = _norm_excess(model, y)
    i_sample = 0
    while i_sample < n_samples and sample_times[i_sample] <= t_start:
        for j in range(n):
            samples[i_sample, j] = y[j]
        i_sample += 1

    status = STATUS_OK
    t_fail = math.nan
    while t < t_end:
        if h > max_step:
            h = max_step
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        if h < _UNDERFLOW * max(abs(t), 1.0):
            status = STATUS_STEP_UNDERFLOW
            t_fail = t
            break

        for j in range(n):
            y_tmp[j] = y[j] + h * _A21 * k1[j]
        _rhs(model, t + _C2 * h, y_tmp, params, k2)
        for j in range(n):
            y_tmp[j] = y[j] + h * (_A31 * k1[j] + _A32 * k2[j])
        _rhs(model, t + _C3 * h, y_tmp, params, k3)
        for j in range(n):
            y_tmp[j] = y[j] + h * (_A41 * k1[j] + _A42 * k2[j]
                                   + _A43 * k3[j])
        _rhs(model, t + _C4 * h, y_tmp, params, k4)
        for j in range(n):
            y_tmp[j] = y[j] + h * (_A51 * k1[j] + _A52 * k2[j]
                                   + _A53 * k3[j] + _A54 * k4[j])
        _rhs(model, t + _C5 * h, y_tmp, params, k5)
        for j in range(n):
            y_tmp[j] = y[j] + h * (_A61 * k1[j] + _A62 * k2[j]
                                   + _A63 * k3[j] + _A64 * k4[j]
                                   + _A65 * k5[j])
        t_next = t_end if last else t + h
        _rhs(model, t_next, y_tmp, params, k6)
        for j in range(n):
            y_new[j] = y[j] + h * (_B1 * k1[j] + _B3 * k3[j] + _B4 * k4[j]
                                   + _B5 * k5[j] + _B6 * k6[j])
        _rhs(model, t_next, y_new, params, k7)
        n_rhs += 6

        err = 0.0
        finite = True
        for j in range(n):
            e = h * (_E1 * k1[j] + _E3 * k3[j] + _E4 * k4[j] + _E5 * k5[j]
                     + _E6 * k6[j] + _E7 * k7[j])
            scale = atol + rtol * max(abs(y[j]), abs(y_new[j]))
            err += (e / scale) ** 2
            if not math.isfinite(y_new[j]):
                finite = False
        if not finite:
            status = STATUS_NONFINITE
            t_fail = t
            break
        err = math.sqrt(err / n)

        if err <= 1.0:
            # dense output for every sample inside (t, t_next]
            while (i_sample < n_samples
                   and sample_times[i_sample] <= t_next):
                if sample_times[i_sample] == t_next:
                    for j in range(n):
                        samples[i_sample, j] = y_new[j]
                    i_sample += 1
                    continue
                theta = (sample_times[i_sample] - t) / h
                th2 = theta * theta
                th3 = th2 * theta
                th4 = th3 * theta
                for j in range(n):
                    acc = 0.0
                    acc += k1[j] * (_P[0, 0] * theta + _P[0, 1] * th2
                                    + _P[0, 2] * th3 + _P[0, 3] * th4)
                    acc += k3[j] * (_P[1, 1] * th2 + _P[1, 2] * th3
                                    + _P[1, 3] * th4)
                    acc += k4[j] * (_P[2, 1] * th2 + _P[2, 2] * th3
                                    + _P[2, 3] * th4)
                    acc += k5[j] * (_P[3, 1] * th2 + _P[3, 2] * th3
                                    + _P[3, 3] * th4)
                    acc += k6[j] * (_P[4, 1] * th2 + _P[4, 2] * th3
                                    + _P[4, 3] * th4)
                    acc += k7[j] * (_P[5, 1] * th2 + _P[5, 2] * th3
                                    + _P[5, 3] * th4)
                    samples[i_sample, j] = y[j] + h * acc
                i_sample += 1
            t = t_next
            for j in range(n):
                y[j] = y_new[j]
                k1[j] = k7[j]
            n_acc += 1
            excess = _norm_excess(model, y)
            if excess > max_excess:
                max_excess = excess
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = min(_MAX_FACTOR, _SAFETY * err ** -0.2)
            h = h * factor
        else:
            n_rej += 1
            h = h * max(_MIN_FACTOR, _SAFETY * err ** -0.2)

    # samples at exactly t_end (rounding) are taken from the final state
    while status == STATUS_OK and i_sample < n_samples:
        for j in range(n):
            samples[i_sample, j] = y[j]
        i_sample += 1
    return samples, y, n_acc, n_rej, n_rhs, max_excess, status, t_fail
