# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
# distutils: language = c++
"""Compiled kernel core: flux-form residual, 9-point Jacobian triplets and
the eikonal march.  Must agree with the pure NumPy backend to round-off;
the shared contracts are documented there."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, INFINITY, fmax, fmin, isfinite
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair

cnp.import_array()

backend_tag = "cython"

ctypedef pair[double, long] HeapItem


cdef inline long _jp(long j, long ny, int ybc) nogil:
    if ybc == 0:
        return (j + 1) % ny
    return j + 1 if j + 1 < ny else ny - 1


cdef inline long _jm(long j, long ny, int ybc) nogil:
    if ybc == 0:
        return (j - 1) % ny if j >= 1 else ny - 1
    return j - 1 if j >= 1 else 0


def residual(const double[:, ::1] v, const double[::1] dxf,
             const double[::1] dxc, const double[::1] cw, double dy,
             int ybc, int ilo,
             const double[:, ::1] Af, const double[:, ::1] Gxf,
             const double[:, ::1] By, const double[:, ::1] Gyf,
             const double[:, ::1] Omc, const double[:, ::1] Gc,
             const double[:, ::1] s1, const double[:, ::1] s2):
    cdef long nx = v.shape[0], ny = v.shape[1]
    out = np.zeros((nx, ny))
    cdef double[:, ::1] res = out
    cdef long i, j, jp, jm, im
    cdef double p, qb, W, FxU, FxD, q, pb, Wy, FyU, FyD
    cdef double pcC, qcC, Wc, drift, acc
    with nogil:
        for i in range(ilo, nx - 1):
            im = i - 1 if i >= 1 else 0
            for j in range(ny):
                jp = _jp(j, ny, ybc)
                jm = _jm(j, ny, ybc)
                # radial faces
                p = (v[i + 1, j] - v[i, j]) / dxf[i]
                qb = (v[i, jp] + v[i + 1, jp] - v[i, jm] - v[i + 1, jm]) / (4.0 * dy)
                W = sqrt(1.0 + p * p + Gxf[i, j] * qb * qb)
                FxU = Af[i, j] * p / W
                if i >= 1:
                    p = (v[i, j] - v[i - 1, j]) / dxf[i - 1]
                    qb = (v[i - 1, jp] + v[i, jp] - v[i - 1, jm] - v[i, jm]) / (4.0 * dy)
                    W = sqrt(1.0 + p * p + Gxf[i - 1, j] * qb * qb)
                    FxD = Af[i - 1, j] * p / W
                else:
                    FxD = 0.0
                # angular faces
                if ybc == 1 and j == ny - 1:
                    FyU = 0.0
                else:
                    q = (v[i, jp] - v[i, j]) / dy
                    pb = 0.5 * ((v[i + 1, j] - v[im, j]) / cw[i]
                                + (v[i + 1, jp] - v[im, jp]) / cw[i])
                    Wy = sqrt(1.0 + pb * pb + Gyf[i, j] * q * q)
                    FyU = By[i, j] * q / Wy
                if ybc == 1 and j == 0:
                    FyD = 0.0
                else:
                    q = (v[i, j] - v[i, jm]) / dy
                    pb = 0.5 * ((v[i + 1, jm] - v[im, jm]) / cw[i]
                                + (v[i + 1, j] - v[im, j]) / cw[i])
                    Wy = sqrt(1.0 + pb * pb + Gyf[i, jm] * q * q)
                    FyD = By[i, jm] * q / Wy
                # drift at the node
                pcC = (v[i + 1, j] - v[im, j]) / cw[i]
                qcC = (v[i, jp] - v[i, jm]) / (2.0 * dy)
                Wc = sqrt(1.0 + pcC * pcC + Gc[i, j] * qcC * qcC)
                drift = (s1[i, j] * pcC + s2[i, j] * qcC) / Wc
                acc = (FxU - FxD) / dxc[i] + (FyU - FyD) / dy
                res[i, j] = acc / Omc[i, j] + drift
    return out


def jacobian(const double[:, ::1] v, const double[::1] dxf,
             const double[::1] dxc, const double[::1] cw, double dy,
             int ybc, int ilo,
             const double[:, ::1] Af, const double[:, ::1] Gxf,
             const double[:, ::1] By, const double[:, ::1] Gyf,
             const double[:, ::1] Omc, const double[:, ::1] Gc,
             const double[:, ::1] s1, const double[:, ::1] s2):
    cdef long nx = v.shape[0], ny = v.shape[1]
    cdef long nrows = (nx - 1 - ilo) * ny
    cdef long cap = nrows * 28
    rows_arr = np.empty(cap, dtype=np.int64)
    cols_arr = np.empty(cap, dtype=np.int64)
    vals_arr = np.empty(cap, dtype=np.float64)
    cdef long[::1] rows = rows_arr
    cdef long[::1] cols = cols_arr
    cdef double[::1] vals = vals_arr
    cdef long k = 0
    cdef long i, j, jp, jm, im, row
    cdef double cU, cV, p, qb, W, W3, aa, bb, q, pb, Wy, cc, dd
    cdef double pcC, qcC, Wc, u, dp, dq

    with nogil:
        for i in range(ilo, nx - 1):
            im = i - 1 if i >= 1 else 0
            for j in range(ny):
                jp = _jp(j, ny, ybc)
                jm = _jm(j, ny, ybc)
                row = i * ny + j
                cU = 1.0 / (dxc[i] * Omc[i, j])
                cV = 1.0 / (dy * Omc[i, j])
                # upper radial face
                p = (v[i + 1, j] - v[i, j]) / dxf[i]
                qb = (v[i, jp] + v[i + 1, jp] - v[i, jm] - v[i + 1, jm]) / (4.0 * dy)
                W = sqrt(1.0 + p * p + Gxf[i, j] * qb * qb)
                W3 = W * W * W
                aa = Af[i, j] * (1.0 + Gxf[i, j] * qb * qb) / W3 * cU / dxf[i]
                bb = -Af[i, j] * Gxf[i, j] * p * qb / W3 * cU / (4.0 * dy)
                rows[k] = row; cols[k] = (i + 1) * ny + j; vals[k] = aa; k += 1
                rows[k] = row; cols[k] = i * ny + j; vals[k] = -aa; k += 1
                rows[k] = row; cols[k] = i * ny + jp; vals[k] = bb; k += 1
                rows[k] = row; cols[k] = (i + 1) * ny + jp; vals[k] = bb; k += 1
                rows[k] = row; cols[k] = i * ny + jm; vals[k] = -bb; k += 1
                rows[k] = row; cols[k] = (i + 1) * ny + jm; vals[k] = -bb; k += 1
                # lower radial face
                if i >= 1:
                    p = (v[i, j] - v[i - 1, j]) / dxf[i - 1]
                    qb = (v[i - 1, jp] + v[i, jp] - v[i - 1, jm] - v[i, jm]) / (4.0 * dy)
                    W = sqrt(1.0 + p * p + Gxf[i - 1, j] * qb * qb)
                    W3 = W * W * W
                    aa = Af[i - 1, j] * (1.0 + Gxf[i - 1, j] * qb * qb) / W3 * cU / dxf[i - 1]
                    bb = -Af[i - 1, j] * Gxf[i - 1, j] * p * qb / W3 * cU / (4.0 * dy)
                else:
                    aa = 0.0
                    bb = 0.0
                rows[k] = row; cols[k] = i * ny + j; vals[k] = -aa; k += 1
                rows[k] = row; cols[k] = im * ny + j; vals[k] = aa; k += 1
                rows[k] = row; cols[k] = im * ny + jp; vals[k] = -bb; k += 1
                rows[k] = row; cols[k] = i * ny + jp; vals[k] = -bb; k += 1
                rows[k] = row; cols[k] = im * ny + jm; vals[k] = bb; k += 1
                rows[k] = row; cols[k] = i * ny + jm; vals[k] = bb; k += 1
                # upper angular face
                if ybc == 1 and j == ny - 1:
                    cc = 0.0
                    dd = 0.0
                else:
                    q = (v[i, jp] - v[i, j]) / dy
                    pb = 0.5 * ((v[i + 1, j] - v[im, j]) / cw[i]
                                + (v[i + 1, jp] - v[im, jp]) / cw[i])
                    Wy = sqrt(1.0 + pb * pb + Gyf[i, j] * q * q)
                    W3 = Wy * Wy * Wy
                    cc = By[i, j] * (1.0 + pb * pb) / W3 * cV / dy
                    dd = -By[i, j] * q * pb / W3 * cV / (2.0 * cw[i])
                rows[k] = row; cols[k] = i * ny + jp; vals[k] = cc; k += 1
                rows[k] = row; cols[k] = i * ny + j; vals[k] = -cc; k += 1
                rows[k] = row; cols[k] = (i + 1) * ny + j; vals[k] = dd; k += 1
                rows[k] = row; cols[k] = im * ny + j; vals[k] = -dd; k += 1
                rows[k] = row; cols[k] = (i + 1) * ny + jp; vals[k] = dd; k += 1
                rows[k] = row; cols[k] = im * ny + jp; vals[k] = -dd; k += 1
                # lower angular face
                if ybc == 1 and j == 0:
                    cc = 0.0
                    dd = 0.0
                else:
                    q = (v[i, j] - v[i, jm]) / dy
                    pb = 0.5 * ((v[i + 1, jm] - v[im, jm]) / cw[i]
                                + (v[i + 1, j] - v[im, j]) / cw[i])
                    Wy = sqrt(1.0 + pb * pb + Gyf[i, jm] * q * q)
                    W3 = Wy * Wy * Wy
                    cc = By[i, jm] * (1.0 + pb * pb) / W3 * cV / dy
                    dd = -By[i, jm] * q * pb / W3 * cV / (2.0 * cw[i])
                rows[k] = row; cols[k] = i * ny + j; vals[k] = -cc; k += 1
                rows[k] = row; cols[k] = i * ny + jm; vals[k] = cc; k += 1
                rows[k] = row; cols[k] = (i + 1) * ny + jm; vals[k] = -dd; k += 1
                rows[k] = row; cols[k] = im * ny + jm; vals[k] = dd; k += 1
                rows[k] = row; cols[k] = (i + 1) * ny + j; vals[k] = -dd; k += 1
                rows[k] = row; cols[k] = im * ny + j; vals[k] = dd; k += 1
                # drift
                pcC = (v[i + 1, j] - v[im, j]) / cw[i]
                qcC = (v[i, jp] - v[i, jm]) / (2.0 * dy)
                Wc = sqrt(1.0 + pcC * pcC + Gc[i, j] * qcC * qcC)
                u = s1[i, j] * pcC + s2[i, j] * qcC
                dp = (s1[i, j] / Wc - u * pcC / (Wc * Wc * Wc)) / cw[i]
                dq = (s2[i, j] / Wc - u * Gc[i, j] * qcC / (Wc * Wc * Wc)) / (2.0 * dy)
                rows[k] = row; cols[k] = (i + 1) * ny + j; vals[k] = dp; k += 1
                rows[k] = row; cols[k] = im * ny + j; vals[k] = -dp; k += 1
                rows[k] = row; cols[k] = i * ny + jp; vals[k] = dq; k += 1
                rows[k] = row; cols[k] = i * ny + jm; vals[k] = -dq; k += 1
    return rows_arr[:k], cols_arr[:k], vals_arr[:k]


cdef inline double _solve_local(const double[:, ::1] d, signed char[:, ::1] status,
                                long i, long j, long nx, long ny,
                                double hs, double h2, int periodic) nogil:
    cdef double a = INFINITY, b = INFINITY, best = INFINITY
    cdef double ia, ib, s, mu, disc, t
    cdef long jn
    if i > 0 and status[i - 1, j] == 2:
        a = d[i - 1, j]
    if i < nx - 1 and status[i + 1, j] == 2 and d[i + 1, j] < a:
        a = d[i + 1, j]
    if periodic:
        jn = (j - 1) % ny if j >= 1 else ny - 1
        if status[i, jn] == 2:
            b = d[i, jn]
        jn = (j + 1) % ny
        if status[i, jn] == 2 and d[i, jn] < b:
            b = d[i, jn]
    else:
        if j > 0 and status[i, j - 1] == 2:
            b = d[i, j - 1]
        if j < ny - 1 and status[i, j + 1] == 2 and d[i, j + 1] < b:
            b = d[i, j + 1]
    if isfinite(a):
        best = a + hs
    if isfinite(b):
        best = fmin(best, b + h2)
    if isfinite(a) and isfinite(b):
        ia = 1.0 / (hs * hs)
        ib = 1.0 / (h2 * h2)
        s = ia + ib
        mu = (ia * a + ib * b) / s
        disc = mu * mu - (ia * a * a + ib * b * b - 1.0) / s
        if disc >= 0.0:
            t = mu + sqrt(disc)
            if t >= fmax(a, b):
                best = fmin(best, t)
    return best


def eikonal_polar(double[:, ::1] d, signed char[:, ::1] status, double hs,
                  const double[::1] ay, int periodic):
    cdef long nx = d.shape[0], ny = d.shape[1]
    cdef priority_queue[HeapItem] heap
    cdef long i, j, ni, nj, m
    cdef double val, t
    cdef long[4] di
    cdef long[4] dj
    for i in range(nx):
        for j in range(ny):
            if status[i, j] == 2:
                heap.push(HeapItem(-d[i, j], i * ny + j))
    while not heap.empty():
        val = -heap.top().first
        i = heap.top().second // ny
        j = heap.top().second % ny
        heap.pop()
        if status[i, j] == 2 and val > d[i, j]:
            continue
        status[i, j] = 2
        for m in range(4):
            if m == 0:
                ni = i - 1; nj = j
            elif m == 1:
                ni = i + 1; nj = j
            elif m == 2:
                ni = i; nj = j - 1
            else:
                ni = i; nj = j + 1
            if ni < 0 or ni >= nx:
                continue
            if nj < 0 or nj >= ny:
                if not periodic:
                    continue
                nj = nj % ny if nj >= 0 else ny - 1
            if status[ni, nj] == -1 or status[ni, nj] == 2:
                continue
            t = _solve_local(d, status, ni, nj, nx, ny, hs, ay[ni], periodic)
            if t < d[ni, nj]:
                d[ni, nj] = t
                heap.push(HeapItem(-t, ni * ny + nj))
    return np.asarray(d)
