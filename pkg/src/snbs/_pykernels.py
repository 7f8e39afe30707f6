"""Pure-Python reference kernels.

Mirrors ``_ckernels.pyx`` function for function. Used when the compiled
extension is unavailable or when ``SNBS_PURE_PYTHON=1`` is set.
"""

import math

import numpy as np

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_CF_TOL = 1e-14
_CF_MAXITER = 500
_RSQRT2 = 0.7071067811865476


# -- double-double arithmetic ---------------------------------------------------
# Values are unevaluated pairs (hi, lo). The helpers work elementwise on
# floats and on numpy arrays alike.

_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _fast_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    # Dekker's exact product
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    s, e = _fast_two_sum(s, e + t)
    return _fast_two_sum(s, e + f)


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    return _fast_two_sum(p, e + (ah * bl + al * bh))


def _dd_scale(ah, al, b):
    p, e = _two_prod(ah, b)
    return _fast_two_sum(p, e + al * b)


def prefix_scans(x, center):
    """Double-double prefix scans of ``y = x - center``.

    Returns ``(p_hi, p_lo, q_hi, q_lo, r_hi, r_lo, s_hi, s_lo)``, each of
    length ``len(x) + 1`` with a leading zero: ``p[k] = y_1 + ... + y_k``,
    ``q[k] = sum_{j<=k} p[j]``, ``r[k] = sum p[j]^2`` and ``s[k] = sum j*p[j]``.
    Every subtraction, product and running sum is carried in double-double.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    out = np.zeros((8, n + 1))
    c = float(center)
    ph = pl = qh = ql = rh = rl = sh = sl = 0.0
    for k, v in enumerate(x.tolist(), start=1):
        yh, yl = _two_sum(v, -c)
        ph, pl = _dd_add(ph, pl, yh, yl)
        qh, ql = _dd_add(qh, ql, ph, pl)
        th, tl = _dd_mul(ph, pl, ph, pl)
        rh, rl = _dd_add(rh, rl, th, tl)
        th, tl = _dd_scale(ph, pl, float(k))
        sh, sl = _dd_add(sh, sl, th, tl)
        out[:, k] = (ph, pl, qh, ql, rh, rl, sh, sl)
    return tuple(out)


def sliding_normalizers(p_hi, p_lo, q_hi, q_lo, r_hi, r_lo, s_hi, s_lo, b, start=0, stop=-1):
    """Normalizers ``D`` of the windows ``[i, i+b)`` for ``start <= i < stop``.

    ``stop=-1`` means every window. With ``u_j = p[i+j] - p[i]`` and
    ``T = u_b``, ``b^3 D^2 = b^2 sum u_j^2 - 2 b T sum j u_j + T^2 sum j^2``;
    the window sums come from the scans in O(1) and the whole combination is
    evaluated in double-double, so cancellation costs nothing visible.
    """
    arrs = [np.asarray(a, dtype=np.float64) for a in
            (p_hi, p_lo, q_hi, q_lo, r_hi, r_lo, s_hi, s_lo)]
    ph, pl, qh, ql, rh, rl, sh, sl = arrs
    n = ph.shape[0] - 1
    b = int(b)
    if stop < 0:
        stop = n - b + 1
    i = np.arange(start, stop)
    e = i + b
    fb = float(b)
    j1 = fb * (fb + 1.0) / 2.0
    j2 = fb * (fb + 1.0) * (2.0 * fb + 1.0) / 6.0

    def window(hi, lo):
        return _dd_add(hi[e], lo[e], -hi[i], -lo[i])

    p0h, p0l = ph[i], pl[i]
    th, tl = window(ph, pl)
    qwh, qwl = window(qh, ql)
    rwh, rwl = window(rh, rl)
    swh, swl = window(sh, sl)
    # u2 = R - 2 p0 Q + b p0^2
    ah, al = _dd_mul(p0h, p0l, qwh, qwl)
    ch, cl = _dd_mul(p0h, p0l, p0h, p0l)
    ch, cl = _dd_scale(ch, cl, fb)
    u2h, u2l = _dd_add(rwh, rwl, -2.0 * ah, -2.0 * al)
    u2h, u2l = _dd_add(u2h, u2l, ch, cl)
    # ju = S - i Q - j1 p0
    ah, al = _dd_scale(qwh, qwl, i.astype(np.float64))
    juh, jul = _dd_add(swh, swl, -ah, -al)
    ah, al = _dd_scale(p0h, p0l, j1)
    juh, jul = _dd_add(juh, jul, -ah, -al)
    # b^3 D^2 = b^2 u2 - 2 b T ju + j2 T^2
    xh, xl = _dd_scale(u2h, u2l, fb * fb)
    ah, al = _dd_mul(th, tl, juh, jul)
    ah, al = _dd_scale(ah, al, 2.0 * fb)
    xh, xl = _dd_add(xh, xl, -ah, -al)
    ah, al = _dd_mul(th, tl, th, tl)
    ah, al = _dd_scale(ah, al, j2)
    xh, xl = _dd_add(xh, xl, ah, al)
    d2 = (xh + xl) / (fb * fb * fb)
    return np.sqrt(np.maximum(d2, 0.0))


def tar_recursion(eps, rho, x0):
    """``x[i] = rho * |x[i-1]| + eps[i]`` started from ``x0``."""
    out = np.empty(len(eps))
    prev = float(x0)
    rho = float(rho)
    for i, v in enumerate(np.asarray(eps, dtype=np.float64).tolist()):
        prev = rho * abs(prev) + v
        out[i] = prev
    return out


# -- regularized incomplete beta and Student t ---------------------------------


def _betacf(x, a, b):
    # modified Lentz evaluation of the continued fraction for I_x(a, b)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            break
    return h


def ibeta(x, y, a, b):
    """``I_x(a, b)`` where ``y = 1 - x`` is supplied separately for accuracy."""
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    front = math.exp(a * math.log(x) + b * math.log(y) - lbeta)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - front * _betacf(y, b, a) / b


def t_lower_tail(x, df):
    """P(T <= x) for x <= 0."""
    x2 = x * x
    w = df / (df + x2)
    wc = x2 / (df + x2)
    return 0.5 * ibeta(w, wc, 0.5 * df, 0.5)


def t_cdf(x, df):
    if x <= 0.0:
        return t_lower_tail(x, df)
    return 1.0 - t_lower_tail(-x, df)


def _t_logpdf_const(df):
    return (math.lgamma(0.5 * (df + 1.0)) - math.lgamma(0.5 * df)
            - 0.5 * math.log(df * math.pi))


def t_lower_quantile(p, df):
    """x <= 0 with P(T <= x) = p, for 0 < p <= 0.5."""
    if p >= 0.5:
        return 0.0
    # bracket in u = log(-x): F(-exp(u_lo)) >= p >= F(-exp(u_hi))
    if t_lower_tail(-1.0, df) >= p:
        u_lo, u_hi = 0.0, 1.0
        while t_lower_tail(-math.exp(u_hi), df) > p:
            u_lo = u_hi
            u_hi *= 2.0
            if u_hi > 709.0:
                return -math.exp(709.0)
    else:
        u_lo, u_hi = -1.0, 0.0
        while t_lower_tail(-math.exp(u_lo), df) < p:
            u_hi = u_lo
            u_lo *= 2.0
            if u_lo < -745.0:
                return 0.0
    # coarse bisection in log scale
    for _ in range(60):
        if u_hi - u_lo < 1e-2:
            break
        mid = 0.5 * (u_lo + u_hi)
        if t_lower_tail(-math.exp(mid), df) > p:
            u_lo = mid
        else:
            u_hi = mid
    x_lo = -math.exp(u_hi)
    x_hi = -math.exp(u_lo)
    x = 0.5 * (x_lo + x_hi)
    const = _t_logpdf_const(df)
    for _ in range(100):
        f = t_lower_tail(x, df) - p
        if f > 0.0:
            x_hi = x
        else:
            x_lo = x
        dens = math.exp(const - 0.5 * (df + 1.0) * math.log1p(x * x / df))
        step = f / dens if dens > 0.0 else 0.0
        x_new = x - step
        if not (x_lo < x_new < x_hi) or dens <= 0.0:
            x_new = 0.5 * (x_lo + x_hi)
        if abs(x_new - x) <= 4.0 * _EPS * abs(x_new):
            return x_new
        x = x_new
    return x


def t_quantile(p, df):
    if p <= 0.5:
        return t_lower_quantile(p, df)
    return -t_lower_quantile(1.0 - p, df)


def t_cdf_array(x, df):
    return np.array([t_cdf(float(v), df) for v in np.ravel(x)]).reshape(np.shape(x))


def t_quantile_array(p, df):
    return np.array([t_quantile(float(v), df) for v in np.ravel(p)]).reshape(np.shape(p))


def t_from_normal(z, df):
    """``F_t^{-1}(Phi(z))`` elementwise, using the tail on the short side."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty(z.shape)
    flat = out.reshape(-1)
    for i, v in enumerate(z.reshape(-1).tolist()):
        tail = 0.5 * math.erfc(abs(v) * _RSQRT2)
        q = t_lower_quantile(tail, df) if tail < 0.5 else 0.0
        flat[i] = -q if v > 0.0 else q
    return out
