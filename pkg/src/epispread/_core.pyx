# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled kernels for the integration and training inner loops.

Arithmetic mirrors epispread._purepy operation for operation so the two
backends produce bit-identical results; keep the two files in sync.
"""

from libc.math cimport INFINITY, NAN, floor, isfinite, pow, tanh
from libc.stdlib cimport free, malloc

STATUS_OK = 0
STATUS_STOPPED = 1
STATUS_NONFINITE = 2
STATUS_SINGULAR = 3

STOP_NONE = 0
STOP_X1_NONPOSITIVE = 1
STOP_CLAMP_AT_ZERO = 2


cdef inline double _pow(double b, double e) noexcept nogil:
    if b > 0.0:
        return pow(b, e)
    if b == 0.0:
        if e > 0.0:
            return 0.0
        if e == 0.0:
            return 1.0
        return INFINITY
    if e == floor(e):
        return pow(b, e)
    return NAN


cdef inline int _rhs(int transformed, int clamp_stages, double beta,
                     double gamma, double m1, double m2, int ck, double cu,
                     double cp, double cv, int rk, double rq, double ex1,
                     double ex2, double eu1, double eu2, double eu1n,
                     double eu2n, double a1, double a2, double* d1,
                     double* d2) noexcept nogil:
    cdef double w, sv, pv, xp, x1v, x2v
    if transformed:
        if a1 <= 0.0 or a2 <= 0.0:
            return -1
        x1v = _pow(a1, ex1)
        x2v = _pow(a2, ex2)
        if ck == 0:
            sv = 0.0
        elif ck == 1:
            sv = cu
        else:
            xp = _pow(x1v, cp)
            sv = xp / (cv + xp)
        if rk == 0:
            pv = x2v
        else:
            pv = _pow(x2v, rq)
        d1[0] = -(1.0 - m1) * (beta * _pow(a2, eu2) + _pow(a1, eu1n) * sv)
        d2[0] = (1.0 - m2) * (beta * _pow(a1, eu1) - gamma * (_pow(a2, eu2n) * pv))
        return 0
    if clamp_stages:
        if a1 < 0.0:
            a1 = 0.0
        if a2 < 0.0:
            a2 = 0.0
    w = beta * _pow(a1, m1) * _pow(a2, m2)
    if ck == 0:
        sv = 0.0
    elif ck == 1:
        sv = cu
    else:
        xp = _pow(a1, cp)
        sv = xp / (cv + xp)
    if rk == 0:
        pv = a2
    else:
        pv = _pow(a2, rq)
    d1[0] = -w - sv
    d2[0] = w - gamma * pv
    return 0


def integrate_si(double beta, double gamma, double m1, double m2,
                 int control_kind, double control_u, double control_p,
                 double control_v, int recovery_kind, double recovery_q,
                 double y1, double y2, double h, long n_steps,
                 long sample_every, int stop_rule, int transformed,
                 double[:] times, double[:, :] states):
    """See epispread._purepy.integrate_si."""
    cdef double ex1 = 0.0, ex2 = 0.0, eu1 = 0.0, eu2 = 0.0
    cdef double eu1n = 0.0, eu2n = 0.0
    cdef double h2, h6, ka1, ka2, kb1, kb2, kc1, kc2, kd1, kd2, ny1, ny2
    cdef long i, count
    cdef int bad
    # stage inputs are projected onto the physical domain under the clamp
    # rule, otherwise a stage overshooting x=0 feeds a negative base to a
    # fractional power mid-step
    cdef int clamp_stages = 1 if (stop_rule == 2 and not transformed) else 0
    if transformed:
        ex1 = 1.0 / (1.0 - m1)
        ex2 = 1.0 / (1.0 - m2)
        eu1 = m1 / (1.0 - m1)
        eu2 = m2 / (1.0 - m2)
        eu1n = -m1 / (1.0 - m1)
        eu2n = -m2 / (1.0 - m2)
    times[0] = 0.0
    states[0, 0] = y1
    states[0, 1] = y2
    count = 1
    h2 = 0.5 * h
    h6 = h / 6.0
    with nogil:
        for i in range(1, n_steps + 1):
            bad = _rhs(transformed, clamp_stages, beta, gamma, m1, m2,
                       control_kind, control_u, control_p, control_v,
                       recovery_kind, recovery_q, ex1, ex2, eu1, eu2,
                       eu1n, eu2n, y1, y2, &ka1, &ka2)
            if bad == 0:
                bad = _rhs(transformed, clamp_stages, beta, gamma, m1, m2,
                           control_kind, control_u, control_p, control_v,
                           recovery_kind, recovery_q, ex1, ex2, eu1, eu2,
                           eu1n, eu2n, y1 + h2 * ka1, y2 + h2 * ka2,
                           &kb1, &kb2)
            if bad == 0:
                bad = _rhs(transformed, clamp_stages, beta, gamma, m1, m2,
                           control_kind, control_u, control_p, control_v,
                           recovery_kind, recovery_q, ex1, ex2, eu1, eu2,
                           eu1n, eu2n, y1 + h2 * kb1, y2 + h2 * kb2,
                           &kc1, &kc2)
            if bad == 0:
                bad = _rhs(transformed, clamp_stages, beta, gamma, m1, m2,
                           control_kind, control_u, control_p, control_v,
                           recovery_kind, recovery_q, ex1, ex2, eu1, eu2,
                           eu1n, eu2n, y1 + h * kc1, y2 + h * kc2,
                           &kd1, &kd2)
            if bad != 0:
                with gil:
                    return count, STATUS_SINGULAR, i
            ny1 = y1 + h6 * (ka1 + 2.0 * kb1 + 2.0 * kc1 + kd1)
            ny2 = y2 + h6 * (ka2 + 2.0 * kb2 + 2.0 * kc2 + kd2)
            if stop_rule == 1 and ny1 <= 0.0:
                with gil:
                    return count, STATUS_STOPPED, i
            if stop_rule == 2:
                if ny1 < 0.0:
                    ny1 = 0.0
                if ny2 < 0.0:
                    ny2 = 0.0
            if not (isfinite(ny1) and isfinite(ny2)):
                with gil:
                    return count, STATUS_NONFINITE, i
            y1 = ny1
            y2 = ny2
            if i % sample_every == 0:
                times[count] = i * h
                states[count, 0] = y1
                states[count, 1] = y2
                count += 1
    return count, STATUS_OK, 0


def mlp_epoch(double[:] wh, double[:] bh, double[:] wo, double[:] bo,
              double[:] vwh, double[:] vbh, double[:] vwo, double[:] vbo,
              double[:] xs, double[:] ys, long[:] order, double eta,
              double alpha, int out_tanh):
    """See epispread._purepy.mlp_epoch."""
    cdef long H = wh.shape[0]
    cdef long n = order.shape[0]
    cdef long s, j, idx
    cdef double x, yv, z, tj, pred, dz, gwo, gh
    cdef double* t = <double*> malloc(H * sizeof(double))
    if t == NULL:
        raise MemoryError()
    try:
        with nogil:
            for s in range(n):
                idx = order[s]
                x = xs[idx]
                yv = ys[idx]
                z = bo[0]
                for j in range(H):
                    tj = tanh(wh[j] * x + bh[j])
                    t[j] = tj
                    z += wo[j] * tj
                if out_tanh:
                    pred = tanh(z)
                    dz = (pred - yv) * (1.0 - pred * pred)
                else:
                    dz = z - yv
                for j in range(H):
                    tj = t[j]
                    gwo = dz * tj
                    gh = dz * wo[j] * (1.0 - tj * tj)
                    vwo[j] = alpha * vwo[j] - eta * gwo
                    wo[j] += vwo[j]
                    vwh[j] = alpha * vwh[j] - eta * (gh * x)
                    wh[j] += vwh[j]
                    vbh[j] = alpha * vbh[j] - eta * gh
                    bh[j] += vbh[j]
                vbo[0] = alpha * vbo[0] - eta * dz
                bo[0] += vbo[0]
    finally:
        free(t)


def mlp_mse(double[:] wh, double[:] bh, double[:] wo, double[:] bo,
            double[:] xs, double[:] ys, int out_tanh):
    """See epispread._purepy.mlp_mse."""
    cdef long H = wh.shape[0]
    cdef long n = xs.shape[0]
    cdef long i, j
    cdef double x, z, e
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            x = xs[i]
            z = bo[0]
            for j in range(H):
                z += wo[j] * tanh(wh[j] * x + bh[j])
            if out_tanh:
                z = tanh(z)
            e = z - ys[i]
            acc += e * e
    return acc / n
