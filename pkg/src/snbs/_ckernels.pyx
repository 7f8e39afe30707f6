# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, exp, log, log1p, lgamma, erfc, M_PI

cnp.import_array()

cdef double _EPS = 2.220446049250313e-16
cdef double _TINY = 1e-300
cdef double _CF_TOL = 1e-14
cdef int _CF_MAXITER = 500


# -- double-double arithmetic ---------------------------------------------------

cdef struct dd:
    double hi
    double lo


cdef inline dd _two_sum(double a, double b) noexcept nogil:
    cdef dd r
    cdef double bb
    r.hi = a + b
    bb = r.hi - a
    r.lo = (a - (r.hi - bb)) + (b - bb)
    return r


cdef inline dd _fast_two_sum(double a, double b) noexcept nogil:
    cdef dd r
    r.hi = a + b
    r.lo = b - (r.hi - a)
    return r


cdef double _SPLITTER = 134217729.0  # 2^27 + 1


cdef inline dd _two_prod(double a, double b) noexcept nogil:
    # Dekker's exact product; libm fma is slow without hardware support
    cdef dd r
    cdef double t, ah, al, bh, bl
    r.hi = a * b
    t = _SPLITTER * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLITTER * b
    bh = t - (t - b)
    bl = b - bh
    r.lo = ((ah * bh - r.hi) + ah * bl + al * bh) + al * bl
    return r


cdef inline dd _dd_add(dd a, dd b) noexcept nogil:
    cdef dd s = _two_sum(a.hi, b.hi)
    cdef dd t = _two_sum(a.lo, b.lo)
    s = _fast_two_sum(s.hi, s.lo + t.hi)
    return _fast_two_sum(s.hi, s.lo + t.lo)


cdef inline dd _dd_neg(dd a) noexcept nogil:
    a.hi = -a.hi
    a.lo = -a.lo
    return a


cdef inline dd _dd_mul(dd a, dd b) noexcept nogil:
    cdef dd p = _two_prod(a.hi, b.hi)
    return _fast_two_sum(p.hi, p.lo + (a.hi * b.lo + a.lo * b.hi))


cdef inline dd _dd_scale(dd a, double b) noexcept nogil:
    cdef dd p = _two_prod(a.hi, b)
    return _fast_two_sum(p.hi, p.lo + a.lo * b)


cdef inline dd _dd(double hi, double lo) noexcept nogil:
    cdef dd r
    r.hi = hi
    r.lo = lo
    return r


def prefix_scans(x, double center):
    cdef double[::1] xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0], k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.zeros((8, n + 1))
    cdef double[:, ::1] out = out_arr
    cdef dd y, p, q, r, s, t
    p = _dd(0.0, 0.0)
    q = p
    r = p
    s = p
    with nogil:
        for k in range(1, n + 1):
            y = _two_sum(xa[k - 1], -center)
            p = _dd_add(p, y)
            q = _dd_add(q, p)
            r = _dd_add(r, _dd_mul(p, p))
            s = _dd_add(s, _dd_scale(p, <double> k))
            out[0, k] = p.hi
            out[1, k] = p.lo
            out[2, k] = q.hi
            out[3, k] = q.lo
            out[4, k] = r.hi
            out[5, k] = r.lo
            out[6, k] = s.hi
            out[7, k] = s.lo
    return tuple(out_arr)


def sliding_normalizers(p_hi, p_lo, q_hi, q_lo, r_hi, r_lo, s_hi, s_lo, b,
                        Py_ssize_t start=0, Py_ssize_t stop=-1):
    cdef double[::1] ph = np.ascontiguousarray(p_hi, dtype=np.float64)
    cdef double[::1] pl = np.ascontiguousarray(p_lo, dtype=np.float64)
    cdef double[::1] qh = np.ascontiguousarray(q_hi, dtype=np.float64)
    cdef double[::1] ql = np.ascontiguousarray(q_lo, dtype=np.float64)
    cdef double[::1] rh = np.ascontiguousarray(r_hi, dtype=np.float64)
    cdef double[::1] rl = np.ascontiguousarray(r_lo, dtype=np.float64)
    cdef double[::1] sh = np.ascontiguousarray(s_hi, dtype=np.float64)
    cdef double[::1] sl = np.ascontiguousarray(s_lo, dtype=np.float64)
    cdef Py_ssize_t bb = b
    cdef Py_ssize_t n = ph.shape[0] - 1
    if stop < 0:
        stop = n - bb + 1
    cdef Py_ssize_t i, e
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(stop - start)
    cdef double[::1] out = out_arr
    cdef double fb = <double> bb
    cdef double j1 = fb * (fb + 1.0) / 2.0
    cdef double j2 = fb * (fb + 1.0) * (2.0 * fb + 1.0) / 6.0
    cdef double d2
    cdef dd p0, t, qw, rw, sw, u2, ju, x, a
    with nogil:
        for i in range(start, stop):
            e = i + bb
            p0 = _dd(ph[i], pl[i])
            t = _dd_add(_dd(ph[e], pl[e]), _dd(-ph[i], -pl[i]))
            qw = _dd_add(_dd(qh[e], ql[e]), _dd(-qh[i], -ql[i]))
            rw = _dd_add(_dd(rh[e], rl[e]), _dd(-rh[i], -rl[i]))
            sw = _dd_add(_dd(sh[e], sl[e]), _dd(-sh[i], -sl[i]))
            a = _dd_mul(p0, qw)
            u2 = _dd_add(rw, _dd(-2.0 * a.hi, -2.0 * a.lo))
            u2 = _dd_add(u2, _dd_scale(_dd_mul(p0, p0), fb))
            ju = _dd_add(sw, _dd_neg(_dd_scale(qw, <double> i)))
            ju = _dd_add(ju, _dd_neg(_dd_scale(p0, j1)))
            x = _dd_scale(u2, fb * fb)
            x = _dd_add(x, _dd_neg(_dd_scale(_dd_mul(t, ju), 2.0 * fb)))
            x = _dd_add(x, _dd_scale(_dd_mul(t, t), j2))
            d2 = (x.hi + x.lo) / (fb * fb * fb)
            out[i - start] = sqrt(d2) if d2 > 0.0 else 0.0
    return out_arr


def tar_recursion(eps, double rho, double x0):
    cdef double[::1] e = np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double prev = x0
    for i in range(n):
        prev = rho * fabs(prev) + e[i]
        out[i] = prev
    return out


cdef double _betacf(double x, double a, double b) noexcept nogil:
    cdef double qab = a + b, qap = a + 1.0, qam = a - 1.0
    cdef double c = 1.0, d = 1.0 - qab * x / qap, h, aa, delta
    cdef int m, m2
    if fabs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if fabs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if fabs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _CF_TOL:
            break
    return h


cdef double _ibeta(double x, double y, double a, double b) noexcept nogil:
    cdef double lbeta, front
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    lbeta = lgamma(a) + lgamma(b) - lgamma(a + b)
    front = exp(a * log(x) + b * log(y) - lbeta)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(x, a, b) / a
    return 1.0 - front * _betacf(y, b, a) / b


cdef double _t_lower_tail(double x, double df) noexcept nogil:
    cdef double x2 = x * x
    return 0.5 * _ibeta(df / (df + x2), x2 / (df + x2), 0.5 * df, 0.5)


cdef double _t_cdf(double x, double df) noexcept nogil:
    if x <= 0.0:
        return _t_lower_tail(x, df)
    return 1.0 - _t_lower_tail(-x, df)


cdef double _t_lower_quantile(double p, double df) noexcept nogil:
    cdef double u_lo, u_hi, mid, x_lo, x_hi, x, x_new, f, dens, const
    cdef int it
    if p >= 0.5:
        return 0.0
    if _t_lower_tail(-1.0, df) >= p:
        u_lo = 0.0
        u_hi = 1.0
        while _t_lower_tail(-exp(u_hi), df) > p:
            u_lo = u_hi
            u_hi *= 2.0
            if u_hi > 709.0:
                return -exp(709.0)
    else:
        u_lo = -1.0
        u_hi = 0.0
        while _t_lower_tail(-exp(u_lo), df) < p:
            u_hi = u_lo
            u_lo *= 2.0
            if u_lo < -745.0:
                return 0.0
    for it in range(60):
        if u_hi - u_lo < 1e-2:
            break
        mid = 0.5 * (u_lo + u_hi)
        if _t_lower_tail(-exp(mid), df) > p:
            u_lo = mid
        else:
            u_hi = mid
    x_lo = -exp(u_hi)
    x_hi = -exp(u_lo)
    x = 0.5 * (x_lo + x_hi)
    const = lgamma(0.5 * (df + 1.0)) - lgamma(0.5 * df) - 0.5 * log(df * M_PI)
    for it in range(100):
        f = _t_lower_tail(x, df) - p
        if f > 0.0:
            x_hi = x
        else:
            x_lo = x
        dens = exp(const - 0.5 * (df + 1.0) * log1p(x * x / df))
        if dens > 0.0:
            x_new = x - f / dens
        else:
            x_new = 0.5 * (x_lo + x_hi)
        if not (x_lo < x_new < x_hi):
            x_new = 0.5 * (x_lo + x_hi)
        if fabs(x_new - x) <= 4.0 * _EPS * fabs(x_new):
            return x_new
        x = x_new
    return x


cdef double _t_quantile(double p, double df) noexcept nogil:
    if p <= 0.5:
        return _t_lower_quantile(p, df)
    return -_t_lower_quantile(1.0 - p, df)


def ibeta(double x, double y, double a, double b):
    return _ibeta(x, y, a, b)


def t_lower_tail(double x, double df):
    return _t_lower_tail(x, df)


def t_cdf(double x, double df):
    return _t_cdf(x, df)


def t_lower_quantile(double p, double df):
    return _t_lower_quantile(p, df)


def t_quantile(double p, double df):
    return _t_quantile(p, df)


def t_cdf_array(x, double df):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xa = np.ascontiguousarray(np.ravel(x), dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    for i in range(n):
        out[i] = _t_cdf(xa[i], df)
    return out.reshape(np.shape(x))


def t_quantile_array(p, double df):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pa = np.ascontiguousarray(np.ravel(p), dtype=np.float64)
    cdef Py_ssize_t n = pa.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    for i in range(n):
        out[i] = _t_quantile(pa[i], df)
    return out.reshape(np.shape(p))


def t_from_normal(z, double df):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] za = np.ascontiguousarray(np.ravel(z), dtype=np.float64)
    cdef Py_ssize_t n = za.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double v, tail, q
    cdef double rsqrt2 = 0.7071067811865476
    for i in range(n):
        v = za[i]
        tail = 0.5 * erfc(fabs(v) * rsqrt2)
        q = _t_lower_quantile(tail, df) if tail < 0.5 else 0.0
        out[i] = -q if v > 0.0 else q
    return out.reshape(np.shape(z))
