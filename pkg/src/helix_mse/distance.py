"""Distance fields to the obstacle boundary in the quotient metric.

For an origin-centered Euclidean ball the quotient distance is exact:
radial rays are unit-speed minimizing curves (the angular rank-one metric
correction never touches the radial direction), so d = |q| - rho.  For
every other obstacle the field is computed by first-order fast marching.

On a polar lattice the quotient metric is diagonal,
ds^2 = dsigma^2 + f(sigma)^2 dtheta^2, so the anisotropy is absorbed by
rescaling the angular spacing to f(sigma_i) dtheta row by row; the update
is then the standard two-axis upwind quadratic, first-order accurate.
Near-boundary nodes are seeded with the metric length of the straight
segment to the obstacle boundary (midpoint metric), which is locally
second-order; marching propagates them outward.
"""

from __future__ import annotations

import numpy as np

from helix_mse import kernels
from helix_mse.domains import DomainSpec
from helix_mse.grids import (Grid, GridField, GridSpec, GridResolutionError,
                             TAG_INNER, YBC_PERIODIC, build_grid)
from helix_mse.groups import GroupSpec, angular_metric_factor, drift_coefficient

__all__ = ["distance_field", "distance_grid", "drift_pairing",
           "eikonal_residual", "estimate_inner_sphere_radius"]


def distance_grid(dom: DomainSpec, lam: float, a: float, R: float,
                  nx: int = 160, ny: int = 192) -> Grid:
    """Uniform polar grid suited to fast marching over the domain."""
    rho = dom.radius if dom.origin_centered_ball else 0.0
    spec = GridSpec(reduction="polar2d", n=2, lam=lam, a=a, rho=rho, R=R,
                    nx=nx, ny=ny, grading=1.0)
    return build_grid(spec, domain=None if rho > 0 else dom)


def _segment_metric_length(gs: GroupSpec, p: np.ndarray, q: np.ndarray) -> float:
    """Quotient-metric length of a short straight segment (midpoint rule)."""
    d = q - p
    ell = float(np.linalg.norm(d))
    if ell == 0.0:
        return 0.0
    mid = 0.5 * (p + q)
    u = d / ell
    t_slice = np.array([gs.lam * mid[1], -gs.lam * mid[0]])
    speed_sq = gs.lam ** 2 * float(mid @ mid) + gs.a ** 2
    return ell * float(np.sqrt(max(0.0, 1.0 - (u @ t_slice) ** 2 / speed_sq)))


def _seed_from_circle(gs, X, Y, dom, hloc):
    """Seed values for exterior nodes within reach of a circular boundary."""
    c = dom.center[:2]
    dE = np.hypot(X - c[0], Y - c[1]) - dom.radius
    seeds = {}
    near = (dE > 0) & (dE <= 2.0 * hloc)
    for i, j in zip(*np.nonzero(near)):
        p = np.array([X[i, j], Y[i, j]])
        foot = c + dom.radius * (p - c) / np.hypot(*(p - c))
        seeds[(i, j)] = _segment_metric_length(gs, p, foot)
    return seeds


def _seed_from_membership(gs, X, Y, dom, status):
    """Bisect grid segments crossing the obstacle boundary for seed values."""
    nx, ny = X.shape
    seeds = {}
    inside = status == -1
    for i, j in zip(*np.nonzero(~inside)):
        best = np.inf
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii, jj = i + di, (j + dj) % ny
            if not (0 <= ii < nx):
                continue
            if not inside[ii, jj]:
                continue
            p = np.array([X[i, j], Y[i, j]])
            q = np.array([X[ii, jj], Y[ii, jj]])
            lo, hi = 0.0, 1.0
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if dom.contains(p + mid * (q - p))[0]:
                    hi = mid
                else:
                    lo = mid
            cross = p + 0.5 * (lo + hi) * (q - p)
            best = min(best, _segment_metric_length(gs, p, cross))
        if np.isfinite(best):
            seeds[(i, j)] = best
    return seeds


def distance_field(gs: GroupSpec, dom: DomainSpec, grid: Grid,
                   method: str = "auto") -> GridField:
    """Distance to the obstacle boundary on the grid nodes.

    method 'exact' uses the radial formula (origin-centered balls only),
    'fmm' runs fast marching, 'auto' picks exact when available.  Raises
    GridResolutionError when the obstacle is under-resolved.
    """
    if (gs.lam, gs.a) != (grid.spec.lam, grid.spec.a):
        raise ValueError("group parameters disagree with the grid metric")
    if method == "auto":
        method = "exact" if dom.origin_centered_ball else "fmm"
    if method == "exact":
        if not dom.origin_centered_ball:
            raise ValueError("exact distance requires an origin-centered ball")
        d = np.maximum(grid.x[:, None] - dom.radius, 0.0)
        return GridField(grid, np.broadcast_to(d, grid.shape).copy())
    if grid.spec.reduction != "polar2d":
        raise ValueError("fast marching runs on polar2d grids")
    if np.ptp(grid.dxf) > 1e-9 * np.max(grid.dxf):
        raise ValueError("fast marching expects a uniform radial spacing "
                         "(build the grid with grading=1)")

    hs = float(grid.dxf[0])
    ay = angular_metric_factor(gs, grid.x) * grid.dy
    ay = np.maximum(ay, 1e-300)
    X, Y = grid.node_positions()
    status = np.zeros(grid.shape, dtype=np.int8)
    if grid.ilo == 0:
        status[grid.tags == TAG_INNER] = -1
    d = np.full(grid.shape, np.inf)

    if grid.ilo == 1 and dom.origin_centered_ball:
        d[0, :] = 0.0
        status[0, :] = 2
    else:
        hloc = max(hs, float(np.max(ay)))
        if dom.kind in ("exterior-ball", "figure1-circle"):
            seeds = _seed_from_circle(gs, X, Y, dom, hloc)
        else:
            seeds = _seed_from_membership(gs, X, Y, dom, status)
        if not seeds:
            raise GridResolutionError(
                "no seed nodes found near the obstacle boundary: the grid "
                "spacing cannot resolve the obstacle")
        for (i, j), val in seeds.items():
            d[i, j] = val
            status[i, j] = 2

    out = kernels.eikonal_polar(d, status, hs, ay,
                                periodic=grid.ybc == YBC_PERIODIC)
    excluded = grid.tags == TAG_INNER
    if not np.all(np.isfinite(out[~excluded])):
        raise GridResolutionError("fast marching left unreached nodes; the "
                                  "domain is disconnected at this resolution")
    out[excluded] = 0.0  # obstacle interior: distance convention is zero
    return GridField(grid, out)


def estimate_inner_sphere_radius(gs: GroupSpec, dom: DomainSpec,
                                 nx: int = 160, ny: int = 256) -> float:
    """Numerical interior sphere radius of the obstacle (its inradius in
    the quotient metric), estimated by marching inward from the boundary.

    Exact for origin-centered balls; for other obstacles this is the
    computational stand-in recorded as 'distance-estimate' provenance.
    """
    if dom.origin_centered_ball:
        return float(dom.radius)
    if dom.contains is None:
        raise ValueError("need an obstacle membership test")
    R = dom.varrho * 1.2
    spec = GridSpec(reduction="polar2d", n=2, lam=gs.lam, a=gs.a, rho=0.0,
                    R=R, nx=nx, ny=ny, grading=1.0)
    grid = build_grid(spec, domain=dom)
    X, Y = grid.node_positions()
    inside = grid.tags == TAG_INNER
    status = np.where(inside, np.int8(0), np.int8(-1))
    d = np.full(grid.shape, np.inf)
    if dom.kind in ("exterior-ball", "figure1-circle"):
        c = dom.center[:2]
        dE = dom.radius - np.hypot(X - c[0], Y - c[1])
        hloc = max(float(grid.dxf[0]), float(np.max(
            angular_metric_factor(gs, grid.x)) * grid.dy))
        near = inside & (dE <= 2.0 * hloc)
        for i, j in zip(*np.nonzero(near)):
            p = np.array([X[i, j], Y[i, j]])
            foot = c + dom.radius * (p - c) / max(np.hypot(*(p - c)), 1e-300)
            d[i, j] = _segment_metric_length(gs, p, foot)
            status[i, j] = 2
    else:
        raise NotImplementedError("inradius estimation is implemented for "
                                  "circular obstacles")
    if not (status == 2).any():
        raise GridResolutionError("obstacle interior under-resolved")
    hs = float(grid.dxf[0])
    ay = np.maximum(angular_metric_factor(gs, grid.x) * grid.dy, 1e-300)
    out = kernels.eikonal_polar(d, status, hs, ay, periodic=True)
    vals = out[inside]
    return float(np.max(vals[np.isfinite(vals)]))


def drift_pairing(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Nodal pairing <grad d, J> of a field's gradient with the drift.

    The drift points toward the rotation axis, so for a distance field
    this is bounded below by minus the orbit curvature; the bound is the
    discrete form of the comparison inequality the collar barrier rests on.
    """
    from helix_mse.solver import grad_norm_field  # stencils live there
    nx, ny = grid.shape
    x = grid.x
    pc = np.empty_like(values)
    pc[1:-1, :] = (values[2:, :] - values[:-2, :]) / (x[2:] - x[:-2])[:, None]
    pc[0, :] = (values[1, :] - values[0, :]) / (x[1] - x[0])
    pc[-1, :] = (values[-1, :] - values[-2, :]) / (x[-1] - x[-2])
    if ny > 1 and grid.ybc == YBC_PERIODIC:
        qc = (np.roll(values, -1, axis=1) - np.roll(values, 1, axis=1)) / (2 * grid.dy)
    else:
        qc = np.zeros_like(values)
    return -(grid.s1 * pc + grid.s2 * qc)


def eikonal_residual(grid: Grid, dfield: GridField) -> np.ndarray:
    """Upwind |grad d|_g - 1 on interior rows (diagnostic, O(h)).

    Uses the Godunov one-sided gradient, which stays meaningful across the
    cut locus where centered differences average distinct distance
    branches.  Rows touching the radial walls are left at zero.
    """
    d = dfield.values
    gs = GroupSpec(lam=grid.spec.lam, a=grid.spec.a, n=max(grid.spec.n, 2))
    res = np.zeros_like(d)
    hs = grid.dxf
    gx_b = (d[1:-1, :] - d[:-2, :]) / hs[:-1, None]
    gx_f = (d[1:-1, :] - d[2:, :]) / hs[1:, None]
    gx = np.maximum(np.maximum(gx_b, gx_f), 0.0)
    if grid.shape[1] > 1 and grid.ybc == YBC_PERIODIC:
        ay = np.maximum(angular_metric_factor(gs, grid.x) * grid.dy, 1e-300)
        gy_b = (d - np.roll(d, 1, axis=1)) / ay[:, None]
        gy_f = (d - np.roll(d, -1, axis=1)) / ay[:, None]
        gy = np.maximum(np.maximum(gy_b, gy_f), 0.0)[1:-1, :]
    else:
        gy = 0.0
    res[1:-1, :] = np.sqrt(gx ** 2 + gy ** 2) - 1.0
    return res
