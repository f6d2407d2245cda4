"""Compiled numerical kernels.

Adaptive Dormand-Prince 5(4) with the standard quartic dense interpolant,
specialized to the planar system

    u' = |v|^(q-2) v,      v' = -(full right-hand side)

with packed coefficient data so everything stays inside nopython mode.
Validation, object construction and anything user-facing live in the plain
Python modules; this layer only evaluates, steps and interpolates.
"""

import math

import numpy as np
from numba import njit

# coefficient kinds
K_CONST = 0
K_AFFINE = 1
K_POLY = 2
K_PWL = 3

# nonlinearity kinds
F_NONE = 0
F_HOMOGENEOUS = 1
F_RATIONAL = 2
F_OSCILLATORY = 3
F_POWER = 4

# integration status
OK = 0
STEP_UNDERFLOW = 1
MAX_STEPS = 2
NONFINITE = 3

_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_SAFETY = 0.9


@njit(cache=True, inline="always")
def phi(s, p):
    # odd power |s|^(p-1)*sign(s), via exp/log so fractional p is exact enough
    if s == 0.0:
        return 0.0
    out = math.exp((p - 1.0) * math.log(abs(s)))
    return out if s > 0.0 else -out


@njit(cache=True, inline="always")
def coef_eval(kind, par, x):
    if kind == K_CONST:
        return par[0]
    if kind == K_AFFINE:
        return par[0] + par[1] * x
    if kind == K_POLY:
        acc = 0.0
        for i in range(par.shape[0] - 1, -1, -1):
            acc = acc * x + par[i]
        return acc
    # K_PWL: par = [length, y0, ..., y_{m-1}] sampled uniformly on [0, length]
    m = par.shape[0] - 1
    t = x * (m - 1) / par[0]
    if t <= 0.0:
        return par[1]
    i = int(t)
    if i >= m - 1:
        return par[m]
    w = t - i
    return par[1 + i] * (1.0 - w) + par[2 + i] * w


@njit(cache=True, inline="always")
def f_eval(kind, par, p, u, du):
    # autonomous nonlinearities; the oscillatory family reads the phase off
    # (u, u') so the perturbation stays coherent along a trajectory
    if kind == F_HOMOGENEOUS:
        return par[0] * phi(u, p)
    if kind == F_RATIONAL:
        if u == 0.0:
            return 0.0
        t = math.exp(par[2] * math.log(abs(u)))
        return phi(u, p) * (par[0] + par[1] * t) / (1.0 + t)
    if kind == F_OSCILLATORY:
        if u == 0.0:
            return 0.0
        e = u * u + du * du
        if e == 0.0:
            return 0.0
        return par[0] * phi(u, p) * math.sin(1.0 / math.sqrt(e))
    if kind == F_POWER:
        if u == 0.0:
            return 0.0
        out = par[0] * math.exp((p - 1.0 + par[1]) * math.log(abs(u)))
        return out if u > 0.0 else -out
    return 0.0


@njit(cache=True, inline="always")
def rhs_full(x, u, v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar):
    a = coef_eval(kinds[0], wpar, x)
    al = coef_eval(kinds[1], apar, x)
    be = coef_eval(kinds[2], bpar, x)
    jump = 0.0
    if u > 0.0:
        jump = al * phi(u, p)
    elif u < 0.0:
        # +beta*phi(u_minus): negative arches see lam*a - beta
        jump = be * phi(-u, p)
    fk = kinds[3]
    if fk == F_NONE:
        core = lam * a * phi(u, p)
    elif fk == F_OSCILLATORY:
        du = phi(v, q)
        core = lam * a * phi(u, p) + f_eval(F_OSCILLATORY, fpar, p, u, du)
    else:
        core = lam * r * a * f_eval(fk, fpar, p, u, 0.0)
    if kinds[4] != F_NONE:
        core = core + f_eval(kinds[4], gpar, p, u, 0.0)
    return core + jump


@njit(cache=True, inline="always")
def deriv(x, u, v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar):
    du = phi(v, q)
    dv = -rhs_full(x, u, v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)
    return du, dv


@njit(cache=True)
def integrate(p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar,
              x0, x1, u0, v0, rtol, atol, max_steps):
    """March the shooting system across [x0, x1].

    Returns (status, n, xs, ys, Q) where xs[0..n] are accepted nodes,
    ys[i] = (u, v) at xs[i], and Q[i] holds the quartic dense coefficients
    of step i: y(x_i + t*h) = y_i + h*(Q[i,:,0]*t + ... + Q[i,:,3]*t^4).
    """
    span = x1 - x0
    hmin = 1e-14 * span

    cap = 1024
    xs = np.empty(cap + 1)
    ys = np.empty((cap + 1, 2))
    Q = np.empty((cap, 2, 4))

    x = x0
    u = u0
    v = v0
    xs[0] = x
    ys[0, 0] = u
    ys[0, 1] = v

    k1u, k1v = deriv(x, u, v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)

    # starting step: standard two-sample heuristic
    s0 = atol + rtol * abs(u)
    s1 = atol + rtol * abs(v)
    d0 = math.sqrt(0.5 * ((u / s0) ** 2 + (v / s1) ** 2))
    d1 = math.sqrt(0.5 * ((k1u / s0) ** 2 + (k1v / s1) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6 * span
    else:
        h = 0.01 * d0 / d1
    ue = u + h * k1u
    ve = v + h * k1v
    k2u, k2v = deriv(x + h, ue, ve, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)
    d2 = math.sqrt(0.5 * (((k2u - k1u) / s0) ** 2 + ((k2v - k1v) / s1) ** 2)) / h
    dm = max(d1, d2)
    if dm > 1e-15:
        h1 = (0.01 / dm) ** 0.2
        h = min(100.0 * h, h1)
    h = min(h, span)

    n = 0
    while x < x1:
        if h < hmin:
            return STEP_UNDERFLOW, n, xs, ys, Q
        if n >= max_steps:
            return MAX_STEPS, n, xs, ys, Q
        if x + h > x1:
            h = x1 - x

        # Dormand-Prince stages (FSAL: k1 carried over)
        y2u = u + h * (0.2 * k1u)
        y2v = v + h * (0.2 * k1v)
        k2u, k2v = deriv(x + 0.2 * h, y2u, y2v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)

        y3u = u + h * (0.075 * k1u + 0.225 * k2u)
        y3v = v + h * (0.075 * k1v + 0.225 * k2v)
        k3u, k3v = deriv(x + 0.3 * h, y3u, y3v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)

        y4u = u + h * ((44.0 / 45.0) * k1u - (56.0 / 15.0) * k2u + (32.0 / 9.0) * k3u)
        y4v = v + h * ((44.0 / 45.0) * k1v - (56.0 / 15.0) * k2v + (32.0 / 9.0) * k3v)
        k4u, k4v = deriv(x + 0.8 * h, y4u, y4v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)

        y5u = u + h * ((19372.0 / 6561.0) * k1u - (25360.0 / 2187.0) * k2u
                       + (64448.0 / 6561.0) * k3u - (212.0 / 729.0) * k4u)
        y5v = v + h * ((19372.0 / 6561.0) * k1v - (25360.0 / 2187.0) * k2v
                       + (64448.0 / 6561.0) * k3v - (212.0 / 729.0) * k4v)
        k5u, k5v = deriv(x + (8.0 / 9.0) * h, y5u, y5v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)

        y6u = u + h * ((9017.0 / 3168.0) * k1u - (355.0 / 33.0) * k2u
                       + (46732.0 / 5247.0) * k3u + (49.0 / 176.0) * k4u
                       - (5103.0 / 18656.0) * k5u)
        y6v = v + h * ((9017.0 / 3168.0) * k1v - (355.0 / 33.0) * k2v
                       + (46732.0 / 5247.0) * k3v + (49.0 / 176.0) * k4v
                       - (5103.0 / 18656.0) * k5v)
        k6u, k6v = deriv(x + h, y6u, y6v, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)

        unew = u + h * ((35.0 / 384.0) * k1u + (500.0 / 1113.0) * k3u + (125.0 / 192.0) * k4u
                        - (2187.0 / 6784.0) * k5u + (11.0 / 84.0) * k6u)
        vnew = v + h * ((35.0 / 384.0) * k1v + (500.0 / 1113.0) * k3v + (125.0 / 192.0) * k4v
                        - (2187.0 / 6784.0) * k5v + (11.0 / 84.0) * k6v)
        k7u, k7v = deriv(x + h, unew, vnew, p, q, lam, r, kinds, wpar, apar, bpar, fpar, gpar)

        if not (math.isfinite(unew) and math.isfinite(vnew)):
            return NONFINITE, n, xs, ys, Q

        erru = h * ((71.0 / 57600.0) * k1u - (71.0 / 16695.0) * k3u + (71.0 / 1920.0) * k4u
                    - (17253.0 / 339200.0) * k5u + (22.0 / 525.0) * k6u - (1.0 / 40.0) * k7u)
        errv = h * ((71.0 / 57600.0) * k1v - (71.0 / 16695.0) * k3v + (71.0 / 1920.0) * k4v
                    - (17253.0 / 339200.0) * k5v + (22.0 / 525.0) * k6v - (1.0 / 40.0) * k7v)
        su = atol + rtol * max(abs(u), abs(unew))
        sv = atol + rtol * max(abs(v), abs(vnew))
        enorm = math.sqrt(0.5 * ((erru / su) ** 2 + (errv / sv) ** 2))

        if enorm <= 1.0:
            # accept; build dense coefficients Q = K^T P
            if n >= cap:
                cap2 = cap * 2
                xs2 = np.empty(cap2 + 1)
                ys2 = np.empty((cap2 + 1, 2))
                Q2 = np.empty((cap2, 2, 4))
                xs2[: n + 1] = xs[: n + 1]
                ys2[: n + 1] = ys[: n + 1]
                Q2[:n] = Q[:n]
                xs, ys, Q, cap = xs2, ys2, Q2, cap2

            for j in range(2):
                if j == 0:
                    c1, c2, c3, c4, c5, c6, c7 = k1u, k2u, k3u, k4u, k5u, k6u, k7u
                else:
                    c1, c2, c3, c4, c5, c6, c7 = k1v, k2v, k3v, k4v, k5v, k6v, k7v
                Q[n, j, 0] = c1
                Q[n, j, 1] = (-8048581381.0 / 2820520608.0) * c1 + (131558114200.0 / 32700410799.0) * c3 \
                    + (-1754552775.0 / 470086768.0) * c4 + (127303824393.0 / 49829197408.0) * c5 \
                    + (-282668133.0 / 205662961.0) * c6 + (40617522.0 / 29380423.0) * c7
                Q[n, j, 2] = (8663915743.0 / 2820520608.0) * c1 + (-68118460800.0 / 10900136933.0) * c3 \
                    + (14199869525.0 / 1410260304.0) * c4 + (-318862633887.0 / 49829197408.0) * c5 \
                    + (2019193451.0 / 616988883.0) * c6 + (-110615467.0 / 29380423.0) * c7
                Q[n, j, 3] = (-12715105075.0 / 11282082432.0) * c1 + (87487479700.0 / 32700410799.0) * c3 \
                    + (-10690763975.0 / 1880347072.0) * c4 + (701980252875.0 / 199316789632.0) * c5 \
                    + (-1453857185.0 / 822651844.0) * c6 + (69997945.0 / 29380423.0) * c7

            x = x + h
            u = unew
            v = vnew
            n += 1
            xs[n] = x
            ys[n, 0] = u
            ys[n, 1] = v
            k1u, k1v = k7u, k7v

            if enorm == 0.0:
                fac = _MAX_FACTOR
            else:
                fac = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * enorm ** -0.2))
            h = h * fac
        else:
            h = h * max(_MIN_FACTOR, _SAFETY * enorm ** -0.2)

    return OK, n, xs, ys, Q


@njit(cache=True, inline="always")
def dense_eval(y0, h, q0, q1, q2, q3, t):
    return y0 + h * t * (q0 + t * (q1 + t * (q2 + t * q3)))


@njit(cache=True)
def find_zeros(n, xs, ys, Q, xlo, xhi, xtol):
    """Zeros of u strictly inside (xlo, xhi), bisected on the interpolant.

    Returns (m, zs, vz) with vz the dense value of v at each zero. Samples
    each accepted step at 8 interior points first, so a step would need
    three zeros packed inside an eighth of itself to fool the scan.
    """
    cap = 64
    zs = np.empty(cap)
    vz = np.empty(cap)
    m = 0
    nsub = 8
    for i in range(n):
        h = xs[i + 1] - xs[i]
        u0 = ys[i, 0]
        a0, a1, a2, a3 = Q[i, 0, 0], Q[i, 0, 1], Q[i, 0, 2], Q[i, 0, 3]
        tprev = 0.0
        uprev = u0
        for jj in range(1, nsub + 1):
            t = jj / nsub
            ucur = dense_eval(u0, h, a0, a1, a2, a3, t) if jj < nsub else ys[i + 1, 0]
            if (uprev < 0.0 and ucur > 0.0) or (uprev > 0.0 and ucur < 0.0):
                ta, tb = tprev, t
                fa = uprev
                while (tb - ta) * h > xtol:
                    tm = 0.5 * (ta + tb)
                    fm = dense_eval(u0, h, a0, a1, a2, a3, tm)
                    if fm == 0.0:
                        ta = tm
                        tb = tm
                        break
                    if (fa < 0.0) == (fm < 0.0):
                        ta = tm
                        fa = fm
                    else:
                        tb = tm
                tz = 0.5 * (ta + tb)
                z = xs[i] + tz * h
                if xlo < z < xhi:
                    if m >= cap:
                        zs2 = np.empty(cap * 2)
                        vz2 = np.empty(cap * 2)
                        zs2[:m] = zs[:m]
                        vz2[:m] = vz[:m]
                        zs, vz, cap = zs2, vz2, cap * 2
                    zs[m] = z
                    vz[m] = dense_eval(ys[i, 1], h, Q[i, 1, 0], Q[i, 1, 1], Q[i, 1, 2], Q[i, 1, 3], tz)
                    m += 1
            elif ucur == 0.0:
                # exact zero at a sample; the next interval cannot re-trigger
                # because a zero uprev passes neither sign test
                z = xs[i] + t * h
                if xlo < z < xhi:
                    if m >= cap:
                        zs2 = np.empty(cap * 2)
                        vz2 = np.empty(cap * 2)
                        zs2[:m] = zs[:m]
                        vz2[:m] = vz[:m]
                        zs, vz, cap = zs2, vz2, cap * 2
                    zs[m] = z
                    vz[m] = dense_eval(ys[i, 1], h, Q[i, 1, 0], Q[i, 1, 1], Q[i, 1, 2], Q[i, 1, 3], t)
                    m += 1
            tprev = t
            uprev = ucur
    return m, zs, vz
