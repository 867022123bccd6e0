"""Pure-Python implementations of the numeric hot loops.

These mirror ``_fastkernels.pyx`` one-to-one and are used when the compiled
extension is unavailable (or when ``COOPGEO_PURE_PYTHON=1``).
"""
import math

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SQRT2 = math.sqrt(2.0)


def _metric_on_arc(t, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p):
    x = cx + radius * math.cos(theta0 + t)
    y = cy + radius * math.sin(theta0 + t)
    ds = math.hypot(x - sx, y - sy)
    dd = math.hypot(x - dx, y - dy)
    if p == 2.0:
        return a2 * ds * ds + b * dd * dd
    return a2 * ds ** p + b * dd ** p


def arc_metric_max(cx, cy, radius, theta0, sweep, sx, sy, dx, dy, a2, b, p,
                   n_samples, rel_tol):
    """Maximize ``a2*|x-s|^p + b*|x-d|^p`` over a circular arc.

    The arc is ``c + radius*(cos, sin)(theta0 + t)`` for t between 0 and
    ``sweep`` (signed). Dense sampling followed by golden-section refinement
    around the best sample. Returns ``(f_max, t_best)``.
    """
    n = max(int(n_samples), 2)
    step = sweep / (n - 1)
    best_t = 0.0
    best_f = -1.0
    for i in range(n):
        t = i * step
        f = _metric_on_arc(t, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
        if f > best_f:
            best_f = f
            best_t = t
    lo_t = min(0.0, sweep)
    hi_t = max(0.0, sweep)
    lo = max(lo_t, best_t - abs(step))
    hi = min(hi_t, best_t + abs(step))
    tol = rel_tol * max(abs(sweep), 1e-300)
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc = _metric_on_arc(c, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
    fd = _metric_on_arc(d, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
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
    mid = 0.5 * (lo + hi)
    f_mid = _metric_on_arc(mid, cx, cy, radius, theta0, sx, sy, dx, dy, a2, b, p)
    if f_mid >= best_f:
        return f_mid, mid
    return best_f, best_t


def proximity_matrix(cx, cy, xs, ys, eps):
    """``m[i][j]`` is True iff node j lies strictly inside the circle whose
    diameter is the segment from the center to node i."""
    n = len(xs)
    out = [[False] * n for _ in range(n)]
    for i in range(n):
        mx = 0.5 * (cx + xs[i])
        my = 0.5 * (cy + ys[i])
        r = 0.5 * math.hypot(xs[i] - cx, ys[i] - cy)
        row = out[i]
        for j in range(n):
            if j != i and math.hypot(xs[j] - mx, ys[j] - my) < r - eps:
                row[j] = True
    return out


def ser_mqam(snr, m):
    if snr < 0.0:
        raise ValueError("snr must be non-negative")
    if math.isinf(snr):
        return 0.0
    q = 0.5 * math.erfc(math.sqrt(3.0 * snr / (m - 1.0)) / _SQRT2)
    p_axis = 2.0 * (1.0 - 1.0 / math.sqrt(m)) * q
    return 1.0 - (1.0 - p_axis) ** 2


def packet_success_snr(snr, m, n_symbols):
    """(1 - SER(snr))^n_symbols, evaluated in log space."""
    ser = ser_mqam(snr, m)
    if ser >= 1.0:
        return 0.0
    return math.exp(n_symbols * math.log1p(-ser))
