# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels.

Expression-for-expression mirror of ``incompat._kernels._pure``; both
backends must produce identical floating-point output.  Edit the pure
module first, then replicate here.
"""

from libc.math cimport sqrt, fabs, INFINITY

BACKEND = "compiled"

cdef double _CROSS_EPS2 = 1e-20
cdef double _PARALLEL_F = -1.0
cdef double _FEAS_EPS = 1e-12


cdef double _busch_f(double a10, double a1x, double a1y, double a1z,
                     double a20, double a2x, double a2y, double a2z) nogil:
    cdef double cx = a1y * a2z - a1z * a2y
    cdef double cy = a1z * a2x - a1x * a2z
    cdef double cz = a1x * a2y - a1y * a2x
    cdef double c2 = cx * cx + cy * cy + cz * cz
    cdef double dot, n1s, n2s, gamma, ca, cb, alpha, beta
    cdef double gx, gy, gz, sx, sy, sz, dx, dy, dz, t3, f, fb
    if c2 < _CROSS_EPS2:
        return _PARALLEL_F
    dot = a1x * a2x + a1y * a2y + a1z * a2z
    n1s = a1x * a1x + a1y * a1y + a1z * a1z
    n2s = a2x * a2x + a2y * a2y + a2z * a2z
    gamma = dot - (a10 - 1.0) * (a20 - 1.0)
    ca = a20 + gamma * a10 - gamma - 1.0
    cb = a10 + gamma * a20 - gamma - 1.0
    alpha = (ca * n2s - cb * dot) / c2
    beta = (cb * n1s - ca * dot) / c2
    gx = alpha * a1x + beta * a2x
    gy = alpha * a1y + beta * a2y
    gz = alpha * a1z + beta * a2z
    sx = a1x + a2x
    sy = a1y + a2y
    sz = a1z + a2z
    dx = a1x - a2x
    dy = a1y - a2y
    dz = a1z - a2z
    t3 = (sqrt((sx + gx) ** 2 + (sy + gy) ** 2 + (sz + gz) ** 2)
          + sqrt((sx - gx) ** 2 + (sy - gy) ** 2 + (sz - gz) ** 2)
          + sqrt((dx + gx) ** 2 + (dy + gy) ** 2 + (dz + gz) ** 2)
          + sqrt((dx - gx) ** 2 + (dy - gy) ** 2 + (dz - gz) ** 2)
          - 4.0)
    f = 1.0 - fabs(alpha)
    fb = 1.0 - fabs(beta)
    if fb < f:
        f = fb
    if t3 < f:
        f = t3
    return f


def busch_f_raw(double a10, double a1x, double a1y, double a1z,
                double a20, double a2x, double a2y, double a2z):
    """Compatibility functional F of a biased pair; F <= 0 iff compatible."""
    return _busch_f(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z)


cdef double _proj_slack(double a1x, double a1y, double a1z,
                        double a2x, double a2y, double a2z,
                        double nx, double ny, double nz) nogil:
    cdef double sx = a1x + a2x
    cdef double sy = a1y + a2y
    cdef double sz = a1z + a2z
    cdef double dn = sx * nx + sy * ny + sz * nz
    cdef double v = sx * sx + sy * sy + sz * sz - dn * dn
    cdef double ps = sqrt(v) if v > 0.0 else 0.0
    cdef double dx = a1x - a2x
    cdef double dy = a1y - a2y
    cdef double dz = a1z - a2z
    cdef double pd
    dn = dx * nx + dy * ny + dz * nz
    v = dx * dx + dy * dy + dz * dz - dn * dn
    pd = sqrt(v) if v > 0.0 else 0.0
    return ps + pd - 2.0


def proj_slack(double a1x, double a1y, double a1z,
               double a2x, double a2y, double a2z,
               double nx, double ny, double nz):
    """Projection-criterion slack for a through-origin plane section."""
    return _proj_slack(a1x, a1y, a1z, a2x, a2y, a2z, nx, ny, nz)


def sr_witness_scan(double l1x, double l1y, double l1z,
                    double l2x, double l2y, double l2z,
                    double g1x, double g1y, double g1z,
                    double g2x, double g2y, double g2z,
                    double[::1] normals, double wtol, double ctol):
    """First normal index detecting the lesser pair but not the greater
    one under the projection criterion; -1 when none exists."""
    cdef Py_ssize_t m = normals.shape[0] // 3
    cdef Py_ssize_t i
    cdef double nx, ny, nz
    for i in range(m):
        nx = normals[3 * i]
        ny = normals[3 * i + 1]
        nz = normals[3 * i + 2]
        if _proj_slack(l1x, l1y, l1z, l2x, l2y, l2z, nx, ny, nz) > wtol:
            if _proj_slack(g1x, g1y, g1z, g2x, g2y, g2z, nx, ny, nz) <= ctol:
                return i
    return -1


cdef double _halton(long i, long base) nogil:
    cdef double f = 1.0
    cdef double r = 0.0
    while i > 0:
        f = f / base
        r += f * (i % base)
        i //= base
    return r


cdef void _wall_shifts(double a0, double ax, double ay, double az,
                       double r, double nx, double ny, double nz,
                       double* out) nogil:
    # shift values pinning |a + lam*n| = a0 - lam*r; real roots whenever
    # the observable is valid
    cdef double an = ax * nx + ay * ny + az * nz
    cdef double A = 1.0 - r * r
    cdef double B = 2.0 * (an + a0 * r)
    cdef double C = ax * ax + ay * ay + az * az - a0 * a0
    cdef double disc, sq, lo, hi
    if A < 1e-12:
        out[0] = -an - 2.0
        out[1] = -an + 2.0
        return
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        disc = 0.0
    sq = sqrt(disc)
    lo = (-B - sq) / (2.0 * A)
    hi = (-B + sq) / (2.0 * A)
    if lo < -an - 2.0:
        lo = -an - 2.0
    if hi > -an + 2.0:
        hi = -an + 2.0
    out[0] = lo
    out[1] = hi


cdef double _tilde_violation(double a0, double ax, double ay, double az,
                             double lam, double xi, double r,
                             double nx, double ny, double nz,
                             double mx, double my, double mz) nogil:
    cdef double t0 = a0 - lam * r
    cdef double tx = ax + lam * nx + xi * mx
    cdef double ty = ay + lam * ny + xi * my
    cdef double tz = az + lam * nz + xi * mz
    cdef double tn = sqrt(tx * tx + ty * ty + tz * tz)
    cdef double v = tn - t0
    cdef double v2 = t0 + tn - 2.0
    if v2 > v:
        v = v2
    return v


cdef double _repair_scale(double a0, double ax, double ay, double az,
                          double lam, double xi, double r,
                          double nx, double ny, double nz,
                          double mx, double my, double mz) nogil:
    cdef double lo, hi, mid
    cdef int it
    if _tilde_violation(a0, ax, ay, az, lam, xi, r, nx, ny, nz, mx, my, mz) <= _FEAS_EPS:
        return 1.0
    lo = 0.0
    hi = 1.0
    for it in range(60):
        mid = 0.5 * (lo + hi)
        if _tilde_violation(a0, ax, ay, az, mid * lam, mid * xi,
                            r, nx, ny, nz, mx, my, mz) <= _FEAS_EPS:
            lo = mid
        else:
            hi = mid
    return lo


# Penalized objectives.  P layout: [a10, a1x, a1y, a1z, a20, a2x, a2y,
# a2z, r, nx, ny, nz, mx, my, mz, penalty_w]; kind 0 = plane (two
# parameters), kind 1 = line (four parameters).
cdef double _objective(int kind, double* x, double* P) nogil:
    cdef double l1 = x[0]
    cdef double l2 = x[1]
    cdef double x1, x2
    cdef double t10, t1x, t1y, t1z, t20, t2x, t2y, t2z, pen, tn, d
    if kind == 0:
        t10 = P[0] - l1 * P[8]
        t1x = P[1] + l1 * P[9]
        t1y = P[2] + l1 * P[10]
        t1z = P[3] + l1 * P[11]
        t20 = P[4] - l2 * P[8]
        t2x = P[5] + l2 * P[9]
        t2y = P[6] + l2 * P[10]
        t2z = P[7] + l2 * P[11]
    else:
        x1 = x[2]
        x2 = x[3]
        t10 = P[0] - l1 * P[8]
        t1x = P[1] + l1 * P[9] + x1 * P[12]
        t1y = P[2] + l1 * P[10] + x1 * P[13]
        t1z = P[3] + l1 * P[11] + x1 * P[14]
        t20 = P[4] - l2 * P[8]
        t2x = P[5] + l2 * P[9] + x2 * P[12]
        t2y = P[6] + l2 * P[10] + x2 * P[13]
        t2z = P[7] + l2 * P[11] + x2 * P[14]
    pen = 0.0
    tn = sqrt(t1x * t1x + t1y * t1y + t1z * t1z)
    d = tn - t10
    if d > 0.0:
        pen += d * d
    d = t10 + tn - 2.0
    if d > 0.0:
        pen += d * d
    tn = sqrt(t2x * t2x + t2y * t2y + t2z * t2z)
    d = tn - t20
    if d > 0.0:
        pen += d * d
    d = t20 + tn - 2.0
    if d > 0.0:
        pen += d * d
    return _busch_f(t10, t1x, t1y, t1z, t20, t2x, t2y, t2z) + P[15] * pen


cdef int _nelder_mead(int kind, double* P, int k, double* x0, double tol,
                      long max_iter, double* out_f, double* out_x) nogil:
    cdef double pts[5][4]
    cdef double fs[5]
    cdef double c[4]
    cdef double xr[4]
    cdef double xe[4]
    cdef double xc[4]
    cdef double tmp[4]
    cdef double fi, fr, fe, fc
    cdef long it = 0
    cdef int i, j, b, do_shrink
    for j in range(k):
        pts[0][j] = x0[j]
    for i in range(k):
        for j in range(k):
            pts[i + 1][j] = x0[j]
        pts[i + 1][i] += 0.5
    for i in range(k + 1):
        fs[i] = _objective(kind, pts[i], P)
    while it < max_iter:
        # stable insertion sort by function value
        for i in range(1, k + 1):
            fi = fs[i]
            for j in range(k):
                tmp[j] = pts[i][j]
            b = i - 1
            while b >= 0 and fs[b] > fi:
                fs[b + 1] = fs[b]
                for j in range(k):
                    pts[b + 1][j] = pts[b][j]
                b -= 1
            fs[b + 1] = fi
            for j in range(k):
                pts[b + 1][j] = tmp[j]
        if fs[k] - fs[0] <= tol:
            break
        it += 1
        for j in range(k):
            c[j] = 0.0
        for i in range(k):
            for j in range(k):
                c[j] += pts[i][j]
        for j in range(k):
            c[j] /= k
        for j in range(k):
            xr[j] = c[j] + (c[j] - pts[k][j])
        fr = _objective(kind, xr, P)
        if fr < fs[0]:
            for j in range(k):
                xe[j] = c[j] + 2.0 * (c[j] - pts[k][j])
            fe = _objective(kind, xe, P)
            if fe < fr:
                for j in range(k):
                    pts[k][j] = xe[j]
                fs[k] = fe
            else:
                for j in range(k):
                    pts[k][j] = xr[j]
                fs[k] = fr
        elif fr < fs[k - 1]:
            for j in range(k):
                pts[k][j] = xr[j]
            fs[k] = fr
        else:
            do_shrink = 0
            if fr < fs[k]:
                for j in range(k):
                    xc[j] = c[j] + 0.5 * (xr[j] - c[j])
                fc = _objective(kind, xc, P)
                if fc <= fr:
                    for j in range(k):
                        pts[k][j] = xc[j]
                    fs[k] = fc
                else:
                    do_shrink = 1
            else:
                for j in range(k):
                    xc[j] = c[j] + 0.5 * (pts[k][j] - c[j])
                fc = _objective(kind, xc, P)
                if fc < fs[k]:
                    for j in range(k):
                        pts[k][j] = xc[j]
                    fs[k] = fc
                else:
                    do_shrink = 1
            if do_shrink:
                for i in range(1, k + 1):
                    for j in range(k):
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])
                    fs[i] = _objective(kind, pts[i], P)
    b = 0
    for i in range(1, k + 1):
        if fs[i] < fs[b]:
            b = i
    out_f[0] = fs[b]
    for j in range(k):
        out_x[j] = pts[b][j]
    return <int> it


def min_f_plane(double a10, double a1x, double a1y, double a1z,
                double a20, double a2x, double a2y, double a2z,
                double r, double nx, double ny, double nz,
                long starts, double penalty_w, double tol, long max_iter,
                long seed):
    """Multistart penalized minimization of F over plane shifts
    (lam1, lam2); returns (value, lam1, lam2, violation, steps)."""
    cdef double P[16]
    cdef double x0[4]
    cdef double xb[4]
    cdef double fv
    cdef double best_f = INFINITY
    cdef double best1 = 0.0, best2 = 0.0
    cdef long steps = 0, s, idx
    cdef double a1n = a1x * nx + a1y * ny + a1z * nz
    cdef double a2n = a2x * nx + a2y * ny + a2z * nz
    cdef double s1, s2, l1, l2, value, origin, v1, v2, viol
    cdef double w1[2]
    cdef double w2[2]
    P[0] = a10; P[1] = a1x; P[2] = a1y; P[3] = a1z
    P[4] = a20; P[5] = a2x; P[6] = a2y; P[7] = a2z
    P[8] = r; P[9] = nx; P[10] = ny; P[11] = nz
    P[12] = 0.0; P[13] = 0.0; P[14] = 0.0; P[15] = penalty_w
    _wall_shifts(a10, a1x, a1y, a1z, r, nx, ny, nz, w1)
    _wall_shifts(a20, a2x, a2y, a2z, r, nx, ny, nz, w2)
    for s in range(starts):
        if s == 0:
            x0[0] = 0.0
            x0[1] = 0.0
        elif s == 1:
            x0[0] = -a1n
            x0[1] = -a2n
        elif s <= 5:
            x0[0] = w1[(s - 2) >> 1]
            x0[1] = w2[(s - 2) & 1]
        else:
            idx = seed * starts + s - 1
            x0[0] = -a1n - 2.0 + 4.0 * _halton(idx, 2)
            x0[1] = -a2n - 2.0 + 4.0 * _halton(idx, 3)
        steps += _nelder_mead(0, P, 2, x0, tol, max_iter, &fv, xb)
        if fv < best_f:
            best_f = fv
            best1 = xb[0]
            best2 = xb[1]
    s1 = _repair_scale(a10, a1x, a1y, a1z, best1, 0.0, r, nx, ny, nz, 0.0, 0.0, 0.0)
    s2 = _repair_scale(a20, a2x, a2y, a2z, best2, 0.0, r, nx, ny, nz, 0.0, 0.0, 0.0)
    l1 = s1 * best1
    l2 = s2 * best2
    value = _busch_f(a10 - l1 * r, a1x + l1 * nx, a1y + l1 * ny, a1z + l1 * nz,
                     a20 - l2 * r, a2x + l2 * nx, a2y + l2 * ny, a2z + l2 * nz)
    origin = _busch_f(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z)
    if origin < value:
        value = origin
        l1 = 0.0
        l2 = 0.0
    v1 = _tilde_violation(a10, a1x, a1y, a1z, l1, 0.0, r, nx, ny, nz, 0.0, 0.0, 0.0)
    v2 = _tilde_violation(a20, a2x, a2y, a2z, l2, 0.0, r, nx, ny, nz, 0.0, 0.0, 0.0)
    viol = v1 if v1 > v2 else v2
    if viol < 0.0:
        viol = 0.0
    return value, l1, l2, viol, steps


def min_f_line(double a10, double a1x, double a1y, double a1z,
               double a20, double a2x, double a2y, double a2z,
               double r, double nx, double ny, double nz,
               double mx, double my, double mz,
               long starts, double penalty_w, double tol, long max_iter,
               long seed):
    """Multistart penalized minimization of F over line shifts
    (lam1, lam2, xi1, xi2); returns (value, lam1, lam2, xi1, xi2,
    violation, steps)."""
    cdef double P[16]
    cdef double x0[4]
    cdef double xb[4]
    cdef double fv
    cdef double best_f = INFINITY
    cdef double bl1 = 0.0, bl2 = 0.0, bx1 = 0.0, bx2 = 0.0
    cdef long steps = 0, s, idx
    cdef double a1n = a1x * nx + a1y * ny + a1z * nz
    cdef double a2n = a2x * nx + a2y * ny + a2z * nz
    cdef double a1m = a1x * mx + a1y * my + a1z * mz
    cdef double a2m = a2x * mx + a2y * my + a2z * mz
    cdef double s1, s2, l1, l2, x1, x2, value, origin, v1, v2, viol
    cdef double w1[2]
    cdef double w2[2]
    P[0] = a10; P[1] = a1x; P[2] = a1y; P[3] = a1z
    P[4] = a20; P[5] = a2x; P[6] = a2y; P[7] = a2z
    P[8] = r; P[9] = nx; P[10] = ny; P[11] = nz
    P[12] = mx; P[13] = my; P[14] = mz; P[15] = penalty_w
    # wall starts with the vectors first reduced into the line's plane
    _wall_shifts(a10, a1x - a1m * mx, a1y - a1m * my, a1z - a1m * mz,
                 r, nx, ny, nz, w1)
    _wall_shifts(a20, a2x - a2m * mx, a2y - a2m * my, a2z - a2m * mz,
                 r, nx, ny, nz, w2)
    for s in range(starts):
        if s == 0:
            x0[0] = 0.0; x0[1] = 0.0; x0[2] = 0.0; x0[3] = 0.0
        elif s == 1:
            x0[0] = -a1n; x0[1] = -a2n; x0[2] = -a1m; x0[3] = -a2m
        elif s <= 5:
            x0[0] = w1[(s - 2) >> 1]
            x0[1] = w2[(s - 2) & 1]
            x0[2] = -a1m
            x0[3] = -a2m
        else:
            idx = seed * starts + s - 1
            x0[0] = -a1n - 2.0 + 4.0 * _halton(idx, 2)
            x0[1] = -a2n - 2.0 + 4.0 * _halton(idx, 3)
            x0[2] = -a1m - 2.0 + 4.0 * _halton(idx, 5)
            x0[3] = -a2m - 2.0 + 4.0 * _halton(idx, 7)
        steps += _nelder_mead(1, P, 4, x0, tol, max_iter, &fv, xb)
        if fv < best_f:
            best_f = fv
            bl1 = xb[0]
            bl2 = xb[1]
            bx1 = xb[2]
            bx2 = xb[3]
    s1 = _repair_scale(a10, a1x, a1y, a1z, bl1, bx1, r, nx, ny, nz, mx, my, mz)
    s2 = _repair_scale(a20, a2x, a2y, a2z, bl2, bx2, r, nx, ny, nz, mx, my, mz)
    l1 = s1 * bl1
    x1 = s1 * bx1
    l2 = s2 * bl2
    x2 = s2 * bx2
    value = _busch_f(a10 - l1 * r,
                     a1x + l1 * nx + x1 * mx,
                     a1y + l1 * ny + x1 * my,
                     a1z + l1 * nz + x1 * mz,
                     a20 - l2 * r,
                     a2x + l2 * nx + x2 * mx,
                     a2y + l2 * ny + x2 * my,
                     a2z + l2 * nz + x2 * mz)
    origin = _busch_f(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z)
    if origin < value:
        value = origin
        l1 = l2 = x1 = x2 = 0.0
    v1 = _tilde_violation(a10, a1x, a1y, a1z, l1, x1, r, nx, ny, nz, mx, my, mz)
    v2 = _tilde_violation(a20, a2x, a2y, a2z, l2, x2, r, nx, ny, nz, mx, my, mz)
    viol = v1 if v1 > v2 else v2
    if viol < 0.0:
        viol = 0.0
    return value, l1, l2, x1, x2, viol, steps
