# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the numeric hot loops in ``_purekernels``."""
from libc.math cimport cos, sin, sqrt, erfc, exp, log1p, pow, isinf, fabs

cdef double _GOLDEN = (sqrt(5.0) - 1.0) / 2.0
cdef double _SQRT2 = sqrt(2.0)


cdef inline double _metric_on_arc(double t, double cx, double cy, double radius,
                                  double theta0, double sx, double sy,
                                  double dx, double dy, double a2, double b,
                                  double p) nogil:
    cdef double x = cx + radius * cos(theta0 + t)
    cdef double y = cy + radius * sin(theta0 + t)
    cdef double ds2 = (x - sx) * (x - sx) + (y - sy) * (y - sy)
    cdef double dd2 = (x - dx) * (x - dx) + (y - dy) * (y - dy)
    if p == 2.0:
        return a2 * ds2 + b * dd2
    return a2 * pow(sqrt(ds2), p) + b * pow(sqrt(dd2), p)


def arc_metric_max(double cx, double cy, double radius, double theta0,
                   double sweep, double sx, double sy, double dx, double dy,
                   double a2, double b, double p, long n_samples,
                   double rel_tol):
    cdef long n = n_samples if n_samples > 2 else 2
    cdef double step = sweep / (n - 1)
    cdef double best_t = 0.0, best_f = -1.0, t, f
    cdef long i
    for i in range(n):
        t = i * step
        f = _metric_on_arc(t, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
        if f > best_f:
            best_f = f
            best_t = t
    cdef double lo_t = sweep if sweep < 0.0 else 0.0
    cdef double hi_t = sweep if sweep > 0.0 else 0.0
    cdef double lo = best_t - fabs(step)
    cdef double hi = best_t + fabs(step)
    if lo < lo_t:
        lo = lo_t
    if hi > hi_t:
        hi = hi_t
    cdef double tol = rel_tol * (fabs(sweep) if fabs(sweep) > 1e-300 else 1e-300)
    cdef double c = hi - _GOLDEN * (hi - lo)
    cdef double d = lo + _GOLDEN * (hi - lo)
    cdef double fc = _metric_on_arc(c, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
    cdef double fd = _metric_on_arc(d, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
    while hi - lo > tol:
        if fc > fd:
            hi = d
            d = c
            fd = fc
            c = hi - _GOLDEN * (hi - lo)
            fc = _metric_on_arc(c, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + _GOLDEN * (hi - lo)
            fd = _metric_on_arc(d, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
    cdef double mid = 0.5 * (lo + hi)
    cdef double f_mid = _metric_on_arc(mid, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
    if f_mid >= best_f:
        return f_mid, mid
    return best_f, best_t


def proximity_matrix(double cx, double cy, xs, ys, double eps):
    cdef Py_ssize_t n = len(xs)
    cdef Py_ssize_t i, j
    cdef double mx, my, r
    cdef double[64] bx
    cdef double[64] by
    if n > 64:
        from coopgeo._purekernels import proximity_matrix as slow
        return slow(cx, cy, xs, ys, eps)
    for i in range(n):
        bx[i] = xs[i]
        by[i] = ys[i]
    out = []
    for i in range(n):
        mx = 0.5 * (cx + bx[i])
        my = 0.5 * (cy + by[i])
        r = 0.5 * sqrt((bx[i] - cx) * (bx[i] - cx) + (by[i] - cy) * (by[i] - cy))
        row = [False] * n
        for j in range(n):
            if j != i and sqrt((bx[j] - mx) * (bx[j] - mx) + (by[j] - my) * (by[j] - my)) < r - eps:
                row[j] = True
        out.append(row)
    return out


cdef inline double _ser(double snr, double m) nogil:
    cdef double q = 0.5 * erfc(sqrt(3.0 * snr / (m - 1.0)) / _SQRT2)
    cdef double p_axis = 2.0 * (1.0 - 1.0 / sqrt(m)) * q
    return 1.0 - (1.0 - p_axis) * (1.0 - p_axis)


def ser_mqam(double snr, double m):
    if snr < 0.0:
        raise ValueError("snr must be non-negative")
    if isinf(snr):
        return 0.0
    return _ser(snr, m)


def packet_success_snr(double snr, double m, double n_symbols):
    if snr < 0.0:
        raise ValueError("snr must be non-negative")
    if isinf(snr):
        return 1.0
    cdef double ser = _ser(snr, m)
    if ser >= 1.0:
        return 0.0
    return exp(n_symbols * log1p(-ser))
