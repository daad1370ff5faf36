"""Pure-Python numeric kernels.

This module is the fallback twin of the compiled extension
``incompat._kernels._fast``.  Every function here mirrors the compiled
one expression for expression, in the same evaluation order, so the two
backends produce identical floating-point results.  Any change here must
be replicated in ``_fast.pyx``.
"""

import math

BACKEND = "pure"

# Below this squared cross-product norm the Bloch vectors are treated as
# collinear: the effects commute, the pair is compatible, and the
# criterion's division by |a1 x a2|^2 is bypassed with the sentinel -1.
_CROSS_EPS2 = 1e-20
_PARALLEL_F = -1.0

_FEAS_EPS = 1e-12


def busch_f_raw(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z):
    """Compatibility functional F of a biased pair; F <= 0 iff compatible."""
    cx = a1y * a2z - a1z * a2y
    cy = a1z * a2x - a1x * a2z
    cz = a1x * a2y - a1y * a2x
    c2 = cx * cx + cy * cy + cz * cz
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
    t3 = (
        math.sqrt((sx + gx) ** 2 + (sy + gy) ** 2 + (sz + gz) ** 2)
        + math.sqrt((sx - gx) ** 2 + (sy - gy) ** 2 + (sz - gz) ** 2)
        + math.sqrt((dx + gx) ** 2 + (dy + gy) ** 2 + (dz + gz) ** 2)
        + math.sqrt((dx - gx) ** 2 + (dy - gy) ** 2 + (dz - gz) ** 2)
        - 4.0
    )
    f = 1.0 - abs(alpha)
    fb = 1.0 - abs(beta)
    if fb < f:
        f = fb
    if t3 < f:
        f = t3
    return f


def proj_slack(a1x, a1y, a1z, a2x, a2y, a2z, nx, ny, nz):
    """|P(a1+a2)| + |P(a1-a2)| - 2 for the plane through the origin
    orthogonal to the unit vector n; <= 0 iff the unbiased pair is
    compatible on that section."""
    sx = a1x + a2x
    sy = a1y + a2y
    sz = a1z + a2z
    dn = sx * nx + sy * ny + sz * nz
    v = sx * sx + sy * sy + sz * sz - dn * dn
    ps = math.sqrt(v) if v > 0.0 else 0.0
    dx = a1x - a2x
    dy = a1y - a2y
    dz = a1z - a2z
    dn = dx * nx + dy * ny + dz * nz
    v = dx * dx + dy * dy + dz * dz - dn * dn
    pd = math.sqrt(v) if v > 0.0 else 0.0
    return ps + pd - 2.0


def sr_witness_scan(l1x, l1y, l1z, l2x, l2y, l2z,
                    g1x, g1y, g1z, g2x, g2y, g2z,
                    normals, wtol, ctol):
    """First index i such that the 'lesser' pair violates the projection
    criterion at normal i (slack > wtol) while the 'greater' pair
    satisfies it (slack <= ctol); -1 if no such normal exists."""
    m = len(normals) // 3
    for i in range(m):
        nx = normals[3 * i]
        ny = normals[3 * i + 1]
        nz = normals[3 * i + 2]
        if proj_slack(l1x, l1y, l1z, l2x, l2y, l2z, nx, ny, nz) > wtol:
            if proj_slack(g1x, g1y, g1z, g2x, g2y, g2z, nx, ny, nz) <= ctol:
                return i
    return -1


def _halton(i, base):
    f = 1.0
    r = 0.0
    while i > 0:
        f = f / base
        r += f * (i % base)
        i //= base
    return r


def _tilde_violation(a0, ax, ay, az, lam, xi, r, nx, ny, nz, mx, my, mz):
    """Largest POVM-constraint excess of the shifted observable; <= 0
    means the shift is feasible.  Positivity of both effects requires
    |a + lam*n + xi*m| <= a0 - lam*r <= 2 - |a + lam*n + xi*m|."""
    t0 = a0 - lam * r
    tx = ax + lam * nx + xi * mx
    ty = ay + lam * ny + xi * my
    tz = az + lam * nz + xi * mz
    tn = math.sqrt(tx * tx + ty * ty + tz * tz)
    v = tn - t0
    v2 = t0 + tn - 2.0
    if v2 > v:
        v = v2
    return v


def _repair_scale(a0, ax, ay, az, lam, xi, r, nx, ny, nz, mx, my, mz):
    """Largest s in [0,1] such that (s*lam, s*xi) is feasible, found by
    bisection; relies on the zero shift being feasible."""
    if _tilde_violation(a0, ax, ay, az, lam, xi, r, nx, ny, nz, mx, my, mz) <= _FEAS_EPS:
        return 1.0
    lo = 0.0
    hi = 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _tilde_violation(a0, ax, ay, az, mid * lam, mid * xi,
                            r, nx, ny, nz, mx, my, mz) <= _FEAS_EPS:
            lo = mid
        else:
            hi = mid
    return lo


def _wall_shifts(a0, ax, ay, az, r, nx, ny, nz):
    """Shift values pinning |a + lam*n| = a0 - lam*r, where depth-first
    minima of F tend to sit.  (1-r^2) lam^2 + 2(a.n + a0*r) lam +
    (|a|^2 - a0^2) = 0 has real roots whenever the observable is valid."""
    an = ax * nx + ay * ny + az * nz
    A = 1.0 - r * r
    B = 2.0 * (an + a0 * r)
    C = ax * ax + ay * ay + az * az - a0 * a0
    if A < 1e-12:
        return (-an - 2.0, -an + 2.0)
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        disc = 0.0
    sq = math.sqrt(disc)
    lo = (-B - sq) / (2.0 * A)
    hi = (-B + sq) / (2.0 * A)
    # clamp into the ball box; far outside it the other constraint fails
    if lo < -an - 2.0:
        lo = -an - 2.0
    if hi > -an + 2.0:
        hi = -an + 2.0
    return (lo, hi)


def _nelder_mead(obj, x0, tol, max_iter):
    """Downhill simplex; returns (best value, best point, steps taken).

    The update rules, tie-breaking and evaluation order are frozen: the
    compiled backend replicates them exactly.
    """
    k = len(x0)
    pts = [list(x0)]
    for j in range(k):
        p = list(x0)
        p[j] += 0.5
        pts.append(p)
    fs = [obj(p) for p in pts]
    it = 0
    while it < max_iter:
        # stable insertion sort by function value
        for i in range(1, k + 1):
            fi = fs[i]
            pi = pts[i]
            j = i - 1
            while j >= 0 and fs[j] > fi:
                fs[j + 1] = fs[j]
                pts[j + 1] = pts[j]
                j -= 1
            fs[j + 1] = fi
            pts[j + 1] = pi
        if fs[k] - fs[0] <= tol:
            break
        it += 1
        c = [0.0] * k
        for i in range(k):
            for j in range(k):
                c[j] += pts[i][j]
        for j in range(k):
            c[j] /= k
        w = pts[k]
        xr = [c[j] + (c[j] - w[j]) for j in range(k)]
        fr = obj(xr)
        if fr < fs[0]:
            xe = [c[j] + 2.0 * (c[j] - w[j]) for j in range(k)]
            fe = obj(xe)
            if fe < fr:
                pts[k] = xe
                fs[k] = fe
            else:
                pts[k] = xr
                fs[k] = fr
        elif fr < fs[k - 1]:
            pts[k] = xr
            fs[k] = fr
        else:
            shrink = False
            if fr < fs[k]:
                xc = [c[j] + 0.5 * (xr[j] - c[j]) for j in range(k)]
                fc = obj(xc)
                if fc <= fr:
                    pts[k] = xc
                    fs[k] = fc
                else:
                    shrink = True
            else:
                xc = [c[j] + 0.5 * (w[j] - c[j]) for j in range(k)]
                fc = obj(xc)
                if fc < fs[k]:
                    pts[k] = xc
                    fs[k] = fc
                else:
                    shrink = True
            if shrink:
                for i in range(1, k + 1):
                    for j in range(k):
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])
                    fs[i] = obj(pts[i])
    b = 0
    for i in range(1, k + 1):
        if fs[i] < fs[b]:
            b = i
    return fs[b], pts[b], it


def min_f_plane(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z,
                r, nx, ny, nz, starts, penalty_w, tol, max_iter, seed):
    """Multistart penalized minimization of F over plane shifts
    (lam1, lam2); returns (value, lam1, lam2, violation, steps)."""
    a1n = a1x * nx + a1y * ny + a1z * nz
    a2n = a2x * nx + a2y * ny + a2z * nz

    def obj(x):
        l1 = x[0]
        l2 = x[1]
        t10 = a10 - l1 * r
        t1x = a1x + l1 * nx
        t1y = a1y + l1 * ny
        t1z = a1z + l1 * nz
        t20 = a20 - l2 * r
        t2x = a2x + l2 * nx
        t2y = a2y + l2 * ny
        t2z = a2z + l2 * nz
        pen = 0.0
        tn = math.sqrt(t1x * t1x + t1y * t1y + t1z * t1z)
        d = tn - t10
        if d > 0.0:
            pen += d * d
        d = t10 + tn - 2.0
        if d > 0.0:
            pen += d * d
        tn = math.sqrt(t2x * t2x + t2y * t2y + t2z * t2z)
        d = tn - t20
        if d > 0.0:
            pen += d * d
        d = t20 + tn - 2.0
        if d > 0.0:
            pen += d * d
        return busch_f_raw(t10, t1x, t1y, t1z, t20, t2x, t2y, t2z) + penalty_w * pen

    w1 = _wall_shifts(a10, a1x, a1y, a1z, r, nx, ny, nz)
    w2 = _wall_shifts(a20, a2x, a2y, a2z, r, nx, ny, nz)
    best_f = math.inf
    best1 = 0.0
    best2 = 0.0
    steps = 0
    for s in range(starts):
        if s == 0:
            x0 = [0.0, 0.0]
        elif s == 1:
            x0 = [-a1n, -a2n]
        elif s <= 5:
            x0 = [w1[(s - 2) >> 1], w2[(s - 2) & 1]]
        else:
            idx = seed * starts + s - 1
            x0 = [-a1n - 2.0 + 4.0 * _halton(idx, 2),
                  -a2n - 2.0 + 4.0 * _halton(idx, 3)]
        fv, xv, it = _nelder_mead(obj, x0, tol, max_iter)
        steps += it
        if fv < best_f:
            best_f = fv
            best1 = xv[0]
            best2 = xv[1]
    s1 = _repair_scale(a10, a1x, a1y, a1z, best1, 0.0, r, nx, ny, nz, 0.0, 0.0, 0.0)
    s2 = _repair_scale(a20, a2x, a2y, a2z, best2, 0.0, r, nx, ny, nz, 0.0, 0.0, 0.0)
    l1 = s1 * best1
    l2 = s2 * best2
    value = busch_f_raw(a10 - l1 * r, a1x + l1 * nx, a1y + l1 * ny, a1z + l1 * nz,
                        a20 - l2 * r, a2x + l2 * nx, a2y + l2 * ny, a2z + l2 * nz)
    origin = busch_f_raw(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z)
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


def min_f_line(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z,
               r, nx, ny, nz, mx, my, mz, starts, penalty_w, tol, max_iter, seed):
    """Multistart penalized minimization of F over line shifts
    (lam1, lam2, xi1, xi2); returns (value, lam1, lam2, xi1, xi2,
    violation, steps)."""
    a1n = a1x * nx + a1y * ny + a1z * nz
    a2n = a2x * nx + a2y * ny + a2z * nz
    a1m = a1x * mx + a1y * my + a1z * mz
    a2m = a2x * mx + a2y * my + a2z * mz

    def obj(x):
        l1 = x[0]
        l2 = x[1]
        x1 = x[2]
        x2 = x[3]
        t10 = a10 - l1 * r
        t1x = a1x + l1 * nx + x1 * mx
        t1y = a1y + l1 * ny + x1 * my
        t1z = a1z + l1 * nz + x1 * mz
        t20 = a20 - l2 * r
        t2x = a2x + l2 * nx + x2 * mx
        t2y = a2y + l2 * ny + x2 * my
        t2z = a2z + l2 * nz + x2 * mz
        pen = 0.0
        tn = math.sqrt(t1x * t1x + t1y * t1y + t1z * t1z)
        d = tn - t10
        if d > 0.0:
            pen += d * d
        d = t10 + tn - 2.0
        if d > 0.0:
            pen += d * d
        tn = math.sqrt(t2x * t2x + t2y * t2y + t2z * t2z)
        d = tn - t20
        if d > 0.0:
            pen += d * d
        d = t20 + tn - 2.0
        if d > 0.0:
            pen += d * d
        return busch_f_raw(t10, t1x, t1y, t1z, t20, t2x, t2y, t2z) + penalty_w * pen

    # wall starts with the vectors first reduced into the line's plane
    w1 = _wall_shifts(a10, a1x - a1m * mx, a1y - a1m * my, a1z - a1m * mz,
                      r, nx, ny, nz)
    w2 = _wall_shifts(a20, a2x - a2m * mx, a2y - a2m * my, a2z - a2m * mz,
                      r, nx, ny, nz)
    best_f = math.inf
    bl1 = bl2 = bx1 = bx2 = 0.0
    steps = 0
    for s in range(starts):
        if s == 0:
            x0 = [0.0, 0.0, 0.0, 0.0]
        elif s == 1:
            x0 = [-a1n, -a2n, -a1m, -a2m]
        elif s <= 5:
            x0 = [w1[(s - 2) >> 1], w2[(s - 2) & 1], -a1m, -a2m]
        else:
            idx = seed * starts + s - 1
            x0 = [-a1n - 2.0 + 4.0 * _halton(idx, 2),
                  -a2n - 2.0 + 4.0 * _halton(idx, 3),
                  -a1m - 2.0 + 4.0 * _halton(idx, 5),
                  -a2m - 2.0 + 4.0 * _halton(idx, 7)]
        fv, xv, it = _nelder_mead(obj, x0, tol, max_iter)
        steps += it
        if fv < best_f:
            best_f = fv
            bl1 = xv[0]
            bl2 = xv[1]
            bx1 = xv[2]
            bx2 = xv[3]
    s1 = _repair_scale(a10, a1x, a1y, a1z, bl1, bx1, r, nx, ny, nz, mx, my, mz)
    s2 = _repair_scale(a20, a2x, a2y, a2z, bl2, bx2, r, nx, ny, nz, mx, my, mz)
    l1 = s1 * bl1
    x1 = s1 * bx1
    l2 = s2 * bl2
    x2 = s2 * bx2
    value = busch_f_raw(a10 - l1 * r,
                        a1x + l1 * nx + x1 * mx,
                        a1y + l1 * ny + x1 * my,
                        a1z + l1 * nz + x1 * mz,
                        a20 - l2 * r,
                        a2x + l2 * nx + x2 * mx,
                        a2y + l2 * ny + x2 * my,
                        a2z + l2 * nz + x2 * mz)
    origin = busch_f_raw(a10, a1x, a1y, a1z, a20, a2x, a2y, a2z)
    if origin < value:
        value = origin
        l1 = l2 = x1 = x2 = 0.0
    v1 = _tilde_violation(a10, a1x, a1y, a1z, l1, x1, r, nx, ny, nz, mx, my, mz)
    v2 = _tilde_violation(a20, a2x, a2y, a2z, l2, x2, r, nx, ny, nz, mx, my, mz)
    viol = v1 if v1 > v2 else v2
    if viol < 0.0:
        viol = 0.0
    return value, l1, l2, x1, x2, viol, steps
