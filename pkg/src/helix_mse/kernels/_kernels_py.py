"""Pure NumPy reference implementation of the hot kernels.

Same contracts as the compiled backend: conservative flux-form residual of
the reduced drift operator, its analytic 9-point Jacobian in COO triplets,
and the first-order eikonal march on a polar lattice.  The compiled and
pure backends must agree to round-off; the equivalence tests enforce it.

Index conventions shared by both backends:

* radial face f sits between nodes f and f+1,
* angular neighbor maps: periodic wrap (ybc = 0) or clamped reflection
  (ybc = 1); the reflection automatically routes ghost-node derivative
  contributions onto the mirrored node,
* residual rows run from ilo (0 in disc mode, where the innermost face
  carries zero flux) to nx - 2; other rows are left at zero,
* centered radial differences use (v[i+1] - v[max(i-1, 0)]) / cw[i], which
  degrades to a one-sided difference on the innermost disc-mode row.
"""

from __future__ import annotations

import heapq

import numpy as np

backend_tag = "python"


def _shift_y(arr: np.ndarray, step: int, ybc: int) -> np.ndarray:
    """Value of the y-neighbor `step` cells away under the given closure."""
    if ybc == 0:
        return np.roll(arr, -step, axis=1)
    if step == 1:
        return np.concatenate([arr[:, 1:], arr[:, -1:]], axis=1)
    return np.concatenate([arr[:, :1], arr[:, :-1]], axis=1)


def _face_quantities(v, dxf, dy, ybc, Af, Gxf):
    vp = _shift_y(v, 1, ybc)
    vm = _shift_y(v, -1, ybc)
    px = (v[1:, :] - v[:-1, :]) / dxf[:, None]
    qbar = (vp[:-1, :] + vp[1:, :] - vm[:-1, :] - vm[1:, :]) / (4.0 * dy)
    Wx = np.sqrt(1.0 + px * px + Gxf * qbar * qbar)
    Fx = Af * px / Wx
    return px, qbar, Wx, Fx


def _yface_quantities(v, cw, dy, ybc, By, Gyf):
    nxm1 = v.shape[0] - 1
    ip = np.minimum(np.arange(v.shape[0]) + 1, nxm1)
    im = np.maximum(np.arange(v.shape[0]) - 1, 0)
    pc = (v[ip, :] - v[im, :]) / cw[:, None]
    pcp = _shift_y(pc, 1, ybc)
    vp = _shift_y(v, 1, ybc)
    qy = (vp - v) / dy
    pbar = 0.5 * (pc + pcp)
    Wy = np.sqrt(1.0 + pbar * pbar + Gyf * qy * qy)
    Fy = By * qy / Wy
    if ybc == 1:
        Fy[:, -1] = 0.0
    return pc, qy, pbar, Wy, Fy


def residual(v, dxf, dxc, cw, dy, ybc, ilo,
             Af, Gxf, By, Gyf, Omc, Gc, s1, s2):
    nx, ny = v.shape
    _, _, _, Fx = _face_quantities(v, dxf, dy, ybc, Af, Gxf)
    pc, qy, _, _, Fy = _yface_quantities(v, cw, dy, ybc, By, Gyf)

    res = np.zeros_like(v)
    lo = max(ilo, 1)
    res[lo:nx - 1, :] = (Fx[lo:, :] - Fx[lo - 1:-1, :]) / dxc[lo:nx - 1, None]
    if ilo == 0:
        res[0, :] = Fx[0, :] / dxc[0]
    if ybc == 0:
        Fym = np.roll(Fy, 1, axis=1)
    else:
        Fym = np.concatenate([np.zeros((nx, 1)), Fy[:, :-1]], axis=1)
    res[ilo:nx - 1, :] += (Fy - Fym)[ilo:nx - 1, :] / dy
    res[ilo:nx - 1, :] /= Omc[ilo:nx - 1, :]

    vp = _shift_y(v, 1, ybc)
    vm = _shift_y(v, -1, ybc)
    qc = (vp - vm) / (2.0 * dy)
    Wc = np.sqrt(1.0 + pc * pc + Gc * qc * qc)
    drift = (s1 * pc + s2 * qc) / Wc
    res[ilo:nx - 1, :] += drift[ilo:nx - 1, :]
    return res


def jacobian(v, dxf, dxc, cw, dy, ybc, ilo,
             Af, Gxf, By, Gyf, Omc, Gc, s1, s2):
    """COO triplets of d(residual)/d(v) over the residual rows."""
    nx, ny = v.shape
    px, qbar, Wx, _ = _face_quantities(v, dxf, dy, ybc, Af, Gxf)
    ax = Af * (1.0 + Gxf * qbar * qbar) / Wx ** 3          # dFx/dpx
    bx = -Af * Gxf * px * qbar / Wx ** 3                   # dFx/dqbar

    pc, qy, pbar, Wy, _ = _yface_quantities(v, cw, dy, ybc, By, Gyf)
    cy = By * (1.0 + pbar * pbar) / Wy ** 3                # dFy/dqy
    dyp = -By * qy * pbar / Wy ** 3                        # dFy/dpbar
    if ybc == 1:
        cy[:, -1] = 0.0
        dyp[:, -1] = 0.0

    vp = _shift_y(v, 1, ybc)
    vm = _shift_y(v, -1, ybc)
    qc = (vp - vm) / (2.0 * dy)
    Wc = np.sqrt(1.0 + pc * pc + Gc * qc * qc)
    u = s1 * pc + s2 * qc
    ddp = s1 / Wc - u * pc / Wc ** 3                        # d(drift)/dpc
    ddq = s2 / Wc - u * Gc * qc / Wc ** 3                   # d(drift)/dqc

    ii = np.arange(ilo, nx - 1)
    jj = np.arange(ny)
    II, JJ = np.meshgrid(ii, jj, indexing="ij")
    if ybc == 0:
        JP, JM = (JJ + 1) % ny, (JJ - 1) % ny
    else:
        JP, JM = np.minimum(JJ + 1, ny - 1), np.maximum(JJ - 1, 0)
    IM = np.maximum(II - 1, 0)

    def flat(I, J):
        return (I * ny + J).ravel()

    rows_idx = flat(II, JJ)
    rows, cols, vals = [], [], []

    def add(J_target_I, J_target_J, coeff):
        rows.append(rows_idx)
        cols.append(flat(J_target_I, J_target_J))
        vals.append(coeff.ravel())

    cU = 1.0 / (dxc[ii][:, None] * Omc[ii, :])
    cV = 1.0 / (dy * Omc[ii, :])

    # upper radial face (between rows i and i+1)
    a_up = ax[ii, :] * cU / dxf[ii][:, None]
    b_up = bx[ii, :] * cU / (4.0 * dy)
    add(II + 1, JJ, a_up)
    add(II, JJ, -a_up)
    add(II, JP, b_up)
    add(II + 1, JP, b_up)
    add(II, JM, -b_up)
    add(II + 1, JM, -b_up)

    # lower radial face (between rows i-1 and i); absent on the disc axis row
    has_dn = ii >= 1
    fdn = ii - 1
    a_dn = np.where(has_dn[:, None], ax[np.maximum(fdn, 0), :], 0.0) * cU
    a_dn /= np.where(has_dn, dxf[np.maximum(fdn, 0)], 1.0)[:, None]
    b_dn = np.where(has_dn[:, None], bx[np.maximum(fdn, 0), :], 0.0) * cU / (4.0 * dy)
    add(II, JJ, -a_dn)
    add(IM, JJ, a_dn)
    add(IM, JP, -b_dn)
    add(II, JP, -b_dn)
    add(IM, JM, b_dn)
    add(II, JM, b_dn)

    # upper angular face (between columns j and j+1)
    c_up = cy[ii, :] * cV / dy
    d_up = dyp[ii, :] * cV / (2.0 * cw[ii][:, None])
    add(II, JP, c_up)
    add(II, JJ, -c_up)
    add(II + 1, JJ, d_up)
    add(IM, JJ, -d_up)
    add(II + 1, JP, d_up)
    add(IM, JP, -d_up)

    # lower angular face (between columns j-1 and j)
    if ybc == 0:
        c_dn = cy[ii, :][:, np.arange(-1, ny - 1)] * cV / dy
        d_dn = dyp[ii, :][:, np.arange(-1, ny - 1)] * cV / (2.0 * cw[ii][:, None])
    else:
        pad = np.zeros((ii.size, 1))
        c_dn = np.concatenate([pad, cy[ii, :-1]], axis=1) * cV / dy
        d_dn = np.concatenate([pad, dyp[ii, :-1]], axis=1) * cV / (2.0 * cw[ii][:, None])
    add(II, JJ, -c_dn)
    add(II, JM, c_dn)
    add(II + 1, JM, -d_dn)
    add(IM, JM, d_dn)
    add(II + 1, JJ, -d_dn)
    add(IM, JJ, d_dn)

    # drift
    dp = ddp[ii, :] / cw[ii][:, None]
    dq = ddq[ii, :] / (2.0 * dy)
    add(II + 1, JJ, dp)
    add(IM, JJ, -dp)
    add(II, JP, dq)
    add(II, JM, -dq)

    return (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))


def eikonal_polar(d, status, hs, ay, periodic):
    """First-order fast-marching eikonal solve on a polar lattice, in place.

    d:       (N, M) values; accepted nodes (status 2) carry seeds
    status:  (N, M) int8, -1 excluded, 0 far, 2 accepted
    hs:      uniform radial spacing
    ay:      per-row effective angular spacing (metric-rescaled), (N,)
    periodic: nonzero wraps the angular axis
    """
    nx, ny = d.shape
    INF = np.inf
    heap: list[tuple[float, int, int]] = []

    def neighbors(i, j):
        if i > 0:
            yield i - 1, j, 0
        if i < nx - 1:
            yield i + 1, j, 0
        if periodic:
            yield i, (j - 1) % ny, 1
            yield i, (j + 1) % ny, 1
        else:
            if j > 0:
                yield i, j - 1, 1
            if j < ny - 1:
                yield i, j + 1, 1

    def solve_local(i, j):
        a = INF
        if i > 0 and status[i - 1, j] == 2:
            a = d[i - 1, j]
        if i < nx - 1 and status[i + 1, j] == 2:
            a = min(a, d[i + 1, j])
        b = INF
        for jn in ((j - 1) % ny, (j + 1) % ny) if periodic else \
                [jn for jn in (j - 1, j + 1) if 0 <= jn < ny]:
            if status[i, jn] == 2:
                b = min(b, d[i, jn])
        h2 = ay[i]
        best = INF
        if np.isfinite(a):
            best = a + hs
        if np.isfinite(b):
            best = min(best, b + h2)
        if np.isfinite(a) and np.isfinite(b):
            # ((t-a)/hs)^2 + ((t-b)/h2)^2 = 1, upwind root above max(a, b)
            ia, ib = 1.0 / (hs * hs), 1.0 / (h2 * h2)
            s = ia + ib
            mu = (ia * a + ib * b) / s
            disc = mu * mu - (ia * a * a + ib * b * b - 1.0) / s
            if disc >= 0.0:
                t = mu + np.sqrt(disc)
                if t >= max(a, b):
                    best = min(best, t)
        return best

    for i in range(nx):
        for j in range(ny):
            if status[i, j] == 2:
                heapq.heappush(heap, (d[i, j], i, j))

    while heap:
        val, i, j = heapq.heappop(heap)
        if status[i, j] == 2 and val > d[i, j]:
            continue
        status[i, j] = 2
        for ni, nj, _ in neighbors(i, j):
            if status[ni, nj] == -1 or status[ni, nj] == 2:
                continue
            t = solve_local(ni, nj)
            if t < d[ni, nj]:
                d[ni, nj] = t
                heapq.heappush(heap, (t, ni, nj))
    return d
