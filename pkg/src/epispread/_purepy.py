"""Pure-Python fallback for the hot numerical kernels.

The compiled extension (epispread._core) implements exactly the same
operations in exactly the same floating-point order, so the two backends
produce bit-identical results; this module is the readable reference and
the fallback when the extension is not built.
"""

import math

STATUS_OK = 0
STATUS_STOPPED = 1
STATUS_NONFINITE = 2
STATUS_SINGULAR = 3

STOP_NONE = 0
STOP_X1_NONPOSITIVE = 1
STOP_CLAMP_AT_ZERO = 2


def _pow(b, e):
    # 0^positive is 0, never NaN; negative bases are only meaningful for
    # integer exponents (Python would promote to complex, C pow to NaN).
    if b > 0.0:
        return math.pow(b, e)
    if b == 0.0:
        if e > 0.0:
            return 0.0
        if e == 0.0:
            return 1.0
        return math.inf
    if e == math.floor(e):
        return math.pow(b, e)
    return math.nan


def integrate_si(beta, gamma, m1, m2, control_kind, control_u, control_p,
                 control_v, recovery_kind, recovery_q, y1, y2, h, n_steps,
                 sample_every, stop_rule, transformed, times, states):
    """Classical fixed-step RK4 over the epidemic system.

    With ``transformed`` falsy the state is (x1, x2) and the vector field is

        dx1/dt = -beta*x1^m1*x2^m2 - S(x1)
        dx2/dt =  beta*x1^m1*x2^m2 - gamma*P(x2)

    otherwise the state is the power-law-substituted pair
    (u1, u2) = (x1^(1-m1), x2^(1-m2)) and the field is the corresponding
    substituted system, which requires strictly positive coordinates.

    ``times`` and ``states`` are preallocated output arrays holding one row
    per emitted sample (step indices divisible by ``sample_every``, starting
    with the initial state).  Returns ``(count, status, event_step)`` where
    ``count`` rows were written and ``event_step`` is the step index at which
    a stop rule fired or a fault occurred (0 otherwise).
    """
    ck = control_kind
    rk = recovery_kind
    # under the clamp rule the stage inputs are projected onto the physical
    # domain as well, otherwise a stage overshooting x=0 feeds a negative
    # base to a fractional power mid-step
    clamp_stages = stop_rule == STOP_CLAMP_AT_ZERO and not transformed
    if transformed:
        ex1 = 1.0 / (1.0 - m1)
        ex2 = 1.0 / (1.0 - m2)
        eu1 = m1 / (1.0 - m1)
        eu2 = m2 / (1.0 - m2)
        eu1n = -m1 / (1.0 - m1)
        eu2n = -m2 / (1.0 - m2)

    def f(a1, a2):
        if transformed:
            if a1 <= 0.0 or a2 <= 0.0:
                return None
            x1v = _pow(a1, ex1)
            x2v = _pow(a2, ex2)
            if ck == 0:
                sv = 0.0
            elif ck == 1:
                sv = control_u
            else:
                xp = _pow(x1v, control_p)
                sv = xp / (control_v + xp)
            pv = x2v if rk == 0 else _pow(x2v, recovery_q)
            d1 = -(1.0 - m1) * (beta * _pow(a2, eu2) + _pow(a1, eu1n) * sv)
            d2 = (1.0 - m2) * (beta * _pow(a1, eu1) - gamma * (_pow(a2, eu2n) * pv))
            return d1, d2
        if clamp_stages:
            if a1 < 0.0:
                a1 = 0.0
            if a2 < 0.0:
                a2 = 0.0
        w = beta * _pow(a1, m1) * _pow(a2, m2)
        if ck == 0:
            sv = 0.0
        elif ck == 1:
            sv = control_u
        else:
            xp = _pow(a1, control_p)
            sv = xp / (control_v + xp)
        pv = a2 if rk == 0 else _pow(a2, recovery_q)
        return -w - sv, w - gamma * pv

    times[0] = 0.0
    states[0, 0] = y1
    states[0, 1] = y2
    count = 1
    h2 = 0.5 * h
    h6 = h / 6.0
    for i in range(1, n_steps + 1):
        ka = f(y1, y2)
        if ka is None:
            return count, STATUS_SINGULAR, i
        kb = f(y1 + h2 * ka[0], y2 + h2 * ka[1])
        if kb is None:
            return count, STATUS_SINGULAR, i
        kc = f(y1 + h2 * kb[0], y2 + h2 * kb[1])
        if kc is None:
            return count, STATUS_SINGULAR, i
        kd = f(y1 + h * kc[0], y2 + h * kc[1])
        if kd is None:
            return count, STATUS_SINGULAR, i
        ny1 = y1 + h6 * (ka[0] + 2.0 * kb[0] + 2.0 * kc[0] + kd[0])
        ny2 = y2 + h6 * (ka[1] + 2.0 * kb[1] + 2.0 * kc[1] + kd[1])
        if stop_rule == STOP_X1_NONPOSITIVE and ny1 <= 0.0:
            return count, STATUS_STOPPED, i
        if stop_rule == STOP_CLAMP_AT_ZERO:
            # explicit branches, not max(): NaN must survive to the
            # finiteness check below
            if ny1 < 0.0:
                ny1 = 0.0
            if ny2 < 0.0:
                ny2 = 0.0
        if not (math.isfinite(ny1) and math.isfinite(ny2)):
            return count, STATUS_NONFINITE, i
        y1 = ny1
        y2 = ny2
        if i % sample_every == 0:
            times[count] = i * h
            states[count, 0] = y1
            states[count, 1] = y2
            count += 1
    return count, STATUS_OK, 0


def mlp_epoch(wh, bh, wo, bo, vwh, vbh, vwo, vbo, xs, ys, order, eta, alpha,
              out_tanh):
    """One epoch of per-sample backpropagation with momentum, in place.

    ``wh, bh`` are the hidden weights/biases, ``wo, bo`` the output
    weights/bias (``bo`` a one-element array), ``v*`` the matching momentum
    accumulators.  Samples are visited in the order given by ``order``.
    """
    H = len(wh)
    n = len(order)
    lwh = [float(v) for v in wh]
    lbh = [float(v) for v in bh]
    lwo = [float(v) for v in wo]
    lvwh = [float(v) for v in vwh]
    lvbh = [float(v) for v in vbh]
    lvwo = [float(v) for v in vwo]
    lbo = float(bo[0])
    lvbo = float(vbo[0])
    lxs = [float(v) for v in xs]
    lys = [float(v) for v in ys]
    t = [0.0] * H
    for s in range(n):
        idx = order[s]
        x = lxs[idx]
        yv = lys[idx]
        z = lbo
        for j in range(H):
            tj = math.tanh(lwh[j] * x + lbh[j])
            t[j] = tj
            z += lwo[j] * tj
        if out_tanh:
            pred = math.tanh(z)
            dz = (pred - yv) * (1.0 - pred * pred)
        else:
            dz = z - yv
        for j in range(H):
            tj = t[j]
            gwo = dz * tj
            gh = dz * lwo[j] * (1.0 - tj * tj)
            lvwo[j] = alpha * lvwo[j] - eta * gwo
            lwo[j] += lvwo[j]
            lvwh[j] = alpha * lvwh[j] - eta * (gh * x)
            lwh[j] += lvwh[j]
            lvbh[j] = alpha * lvbh[j] - eta * gh
            lbh[j] += lvbh[j]
        lvbo = alpha * lvbo - eta * dz
        lbo += lvbo
    for j in range(H):
        wh[j] = lwh[j]
        bh[j] = lbh[j]
        wo[j] = lwo[j]
        vwh[j] = lvwh[j]
        vbh[j] = lvbh[j]
        vwo[j] = lvwo[j]
    bo[0] = lbo
    vbo[0] = lvbo


def mlp_mse(wh, bh, wo, bo, xs, ys, out_tanh):
    """Mean squared error of the network over the dataset."""
    H = len(wh)
    n = len(xs)
    lwh = [float(v) for v in wh]
    lbh = [float(v) for v in bh]
    lwo = [float(v) for v in wo]
    lbo = float(bo[0])
    acc = 0.0
    for i in range(n):
        x = float(xs[i])
        z = lbo
        for j in range(H):
            z += lwo[j] * math.tanh(lwh[j] * x + lbh[j])
        if out_tanh:
            z = math.tanh(z)
        e = z - float(ys[i])
        acc += e * e
    return acc / n
