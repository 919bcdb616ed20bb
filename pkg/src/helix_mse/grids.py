"""Structured grids for the symmetry-reduced drift equation.

Three reductions are supported; each is a tensor grid in two coordinates
(one for the radial path) with the quotient volume density and inverse
metric folded into per-face coefficient arrays, so the discrete operator
is a conservative flux form

    res = [ d(Omega g^xx v_x / W)/dx + d(Omega g^yy v_y / W)/dy ] / Omega
          + (s1 v_x + s2 v_y) / W ,

with W = sqrt(1 + g^xx v_x^2 + g^yy v_y^2) and (s1, s2) the drift
coefficients.  Coordinates per reduction, writing f(sigma) for the
angular metric factor |a| sigma / sqrt(lam^2 sigma^2 + a^2) and
xi(sigma) = lam^2 sigma / (lam^2 sigma^2 + a^2) for the drift strength:

* polar2d (n = 2): x = sigma, y = theta (periodic).  Omega = f(sigma),
  g^yy = 1/f^2, drift = xi(sigma) v_sigma / W.
* axisym (n >= 3): polar coordinates (tau, eta) of the Euclidean
  (sigma, zeta) half-plane, sigma = tau cos(eta), zeta = tau sin(eta),
  eta in [0, pi/2] with reflection walls.  Omega = f(sigma) zeta^{n-3} tau,
  g^yy = 1/tau^2, drift = xi(sigma) (cos(eta) v_tau - sin(eta)/tau v_eta)/W.
* radial: x = tau (full quotient radius), Omega = tau^{n-1}, no drift
  term: the identity f'/f + xi(sigma) = 1/sigma absorbs the drift exactly,
  which is also why Euclidean catenoids solve the reduced equation for
  every angular rate.

Radial nodes are placed by a smooth map clustering toward the inner
boundary (power-law grading, default quadratic): profiles vanishing there
behave like sqrt(distance), which the graded map renders smooth in the
computational coordinate, restoring second-order truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from helix_mse.domains import DomainSpec
from helix_mse.groups import GroupSpec, angular_metric_factor, drift_coefficient

__all__ = ["GridSpec", "Grid", "GridField", "build_grid", "TAG_INTERIOR",
           "TAG_INNER", "TAG_OUTER", "GridResolutionError"]

TAG_INTERIOR, TAG_INNER, TAG_OUTER = 0, 1, 2
YBC_PERIODIC, YBC_REFLECT = 0, 1


class GridResolutionError(ValueError):
    """The grid cannot resolve the requested domain feature."""


@dataclass(frozen=True)
class GridSpec:
    """Reduction kind, group parameters and resolution of a solve grid."""

    reduction: str        # 'radial' | 'axisym' | 'polar2d'
    n: int
    lam: float
    a: float
    rho: float            # inner radius; 0 selects disc mode (polar2d only)
    R: float
    nx: int
    ny: int = 1
    grading: float = 2.0

    def __post_init__(self) -> None:
        if self.reduction not in ("radial", "axisym", "polar2d"):
            raise ValueError(f"unknown reduction '{self.reduction}'")
        if self.a == 0.0:
            raise ValueError("a must be nonzero")
        if self.R <= self.rho:
            raise ValueError("outer radius must exceed the inner radius")
        if self.rho < 0.0:
            raise ValueError("rho must be nonnegative")
        if self.rho == 0.0 and self.reduction != "polar2d":
            raise ValueError("disc mode (rho = 0) exists only for polar2d")
        if self.reduction == "axisym" and self.n < 3:
            raise ValueError("axisym reduction requires n >= 3")
        if self.reduction == "polar2d" and self.n != 2:
            raise ValueError("polar2d reduction is the n = 2 path")
        if self.nx < 4:
            raise ValueError("need at least 4 radial nodes")
        if self.reduction != "radial" and self.ny < 4:
            raise ValueError("need at least 4 angular nodes")
        if self.grading < 1.0:
            raise ValueError("grading exponent must be >= 1")


@dataclass(frozen=True, eq=False)
class Grid:
    """Discrete grid with precomputed flux-form coefficient arrays."""

    spec: GridSpec
    x: np.ndarray          # radial nodes, (nx,)
    xf: np.ndarray         # radial faces between consecutive nodes, (nx-1,)
    y: np.ndarray          # angular nodes/cells, (ny,)
    dy: float
    ybc: int               # YBC_PERIODIC / YBC_REFLECT / YBC_NONE
    ilo: int               # first residual row (0 in disc mode, else 1)
    dxf: np.ndarray        # x[i+1] - x[i], (nx-1,)
    dxc: np.ndarray        # control-volume widths, (nx,)
    cw: np.ndarray         # centered-difference widths, (nx,)
    Af: np.ndarray         # Omega at x-faces, (nx-1, ny)
    Gxf: np.ndarray        # g^yy at x-faces, (nx-1, ny)
    By: np.ndarray         # Omega * g^yy at y-faces (face above node j), (nx, ny)
    Gyf: np.ndarray        # g^yy at y-faces, (nx, ny)
    Omc: np.ndarray        # Omega at nodes, (nx, ny)
    Gc: np.ndarray         # g^yy at nodes, (nx, ny)
    s1: np.ndarray         # drift coefficient of v_x, (nx, ny)
    s2: np.ndarray         # drift coefficient of v_y, (nx, ny)
    tags: np.ndarray       # TAG_* per node, (nx, ny)

    @property
    def shape(self) -> tuple[int, int]:
        return self.x.size, self.y.size

    @property
    def is_radial(self) -> bool:
        return self.spec.reduction == "radial"

    @property
    def h_max(self) -> float:
        """Largest node spacing; the scale entering certificate tolerances."""
        h = float(np.max(self.dxf))
        if not self.is_radial:
            if self.spec.reduction == "polar2d":
                h = max(h, float(np.max(angular_metric_factor(
                    self._gs(), self.x))) * self.dy)
            else:
                h = max(h, float(np.max(self.x)) * self.dy)
        return h

    def _gs(self) -> GroupSpec:
        n_eff = max(self.spec.n, 2)
        return GroupSpec(lam=self.spec.lam, a=self.spec.a, n=n_eff)

    def node_positions(self) -> tuple[np.ndarray, np.ndarray]:
        """Cartesian (sigma-plane) positions of nodes; axisym returns
        (sigma, zeta), polar2d returns (x, y) in the rotation plane,
        radial returns (tau, 0)."""
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        if self.spec.reduction == "polar2d":
            return X * np.cos(Y), X * np.sin(Y)
        if self.spec.reduction == "axisym":
            return X * np.cos(Y), X * np.sin(Y)
        return X, np.zeros_like(X)

    def sigma_at_nodes(self) -> np.ndarray:
        """Cylinder radius sigma at each node (drift geometry argument)."""
        X, Y = np.meshgrid(self.x, self.y, indexing="ij")
        if self.spec.reduction == "axisym":
            return X * np.cos(Y)
        return X


@dataclass
class GridField:
    """Scalar field on a grid; boundary nodes carry Dirichlet data exactly."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"{self.grid.shape}")

    def copy(self) -> "GridField":
        return GridField(self.grid, self.values.copy())

    def interp_radial(self, tau) -> np.ndarray:
        """Linear interpolation of the angular mean along the radial axis."""
        mean = self.values.mean(axis=1)
        return np.interp(np.asarray(tau, dtype=float), self.grid.x, mean)


def _radial_nodes(spec: GridSpec) -> tuple[np.ndarray, np.ndarray, int]:
    """Node and face positions along the radial axis; returns (x, xf, ilo)."""
    if spec.rho > 0.0:
        xi = np.linspace(0.0, 1.0, spec.nx)
        xi_f = 0.5 * (xi[:-1] + xi[1:])
        x = spec.rho + (spec.R - spec.rho) * xi ** spec.grading
        xf = spec.rho + (spec.R - spec.rho) * xi_f ** spec.grading
        return x, xf, 1
    # disc mode: cell-centered nodes except the outer boundary node at R
    h = spec.R / (spec.nx - 0.5)
    x = (np.arange(spec.nx) + 0.5) * h
    x[-1] = spec.R
    xf = (np.arange(1, spec.nx)) * h
    return x, xf, 0


def build_grid(spec: GridSpec, domain: DomainSpec | None = None) -> Grid:
    """Assemble a grid with its flux-form coefficients and boundary tags.

    In disc mode a domain with an obstacle membership test must be given;
    nodes inside the closed obstacle become inner-boundary nodes.  Raises
    GridResolutionError when the obstacle falls between grid nodes.
    """
    gs = GroupSpec(lam=spec.lam, a=spec.a, n=max(spec.n, 2))
    x, xf, ilo = _radial_nodes(spec)
    nx = spec.nx

    def f(sig):
        return angular_metric_factor(gs, sig)

    def xi_drift(sig):
        return drift_coefficient(gs, sig) * sig

    if spec.reduction == "radial":
        # single angular cell with reflection closure: all angular terms vanish
        y = np.zeros(1)
        dy = 1.0
        ybc = YBC_REFLECT
        Af = (xf ** (spec.n - 1))[:, None]
        Gxf = np.zeros((nx - 1, 1))
        By = np.zeros((nx, 1))
        Gyf = np.zeros((nx, 1))
        Omc = (x ** (spec.n - 1))[:, None]
        Gc = np.zeros((nx, 1))
        s1 = np.zeros((nx, 1))
        s2 = np.zeros((nx, 1))
    elif spec.reduction == "polar2d":
        y = np.arange(spec.ny) * (2.0 * np.pi / spec.ny)
        dy = 2.0 * np.pi / spec.ny
        ybc = YBC_PERIODIC
        fx_face = f(xf)
        fx_node = f(x)
        with np.errstate(divide="ignore"):
            gyy_face = np.where(fx_face > 0, 1.0 / fx_face ** 2, 0.0)
            gyy_node = np.where(fx_node > 0, 1.0 / fx_node ** 2, 0.0)
        Af = np.repeat(fx_face[:, None], spec.ny, axis=1)
        Gxf = np.repeat(gyy_face[:, None], spec.ny, axis=1)
        By = np.repeat(np.where(fx_node > 0, 1.0 / fx_node, 0.0)[:, None],
                       spec.ny, axis=1)
        Gyf = np.repeat(gyy_node[:, None], spec.ny, axis=1)
        Omc = np.repeat(fx_node[:, None], spec.ny, axis=1)
        Gc = np.repeat(gyy_node[:, None], spec.ny, axis=1)
        s1 = np.repeat(xi_drift(x)[:, None], spec.ny, axis=1)
        s2 = np.zeros((nx, spec.ny))
    else:  # axisym
        dy = (np.pi / 2.0) / spec.ny
        y = (np.arange(spec.ny) + 0.5) * dy
        ybc = YBC_REFLECT
        yf = y + 0.5 * dy
        pw = spec.n - 3

        def omega(tau, eta):
            tau = np.asarray(tau, dtype=float)
            sig = tau * np.cos(eta)
            zet = tau * np.sin(eta)
            return f(sig) * zet ** pw * tau if pw else f(sig) * tau

        Xf, Yc = np.meshgrid(xf, y, indexing="ij")
        Af = omega(Xf, Yc)
        Gxf = 1.0 / Xf ** 2
        Xc, Yf = np.meshgrid(x, yf, indexing="ij")
        By = omega(Xc, Yf) / Xc ** 2
        Gyf = 1.0 / Xc ** 2
        Xc, Yc = np.meshgrid(x, y, indexing="ij")
        Omc = omega(Xc, Yc)
        Gc = 1.0 / Xc ** 2
        sig_c = Xc * np.cos(Yc)
        s1 = xi_drift(sig_c) * np.cos(Yc)
        s2 = -xi_drift(sig_c) * np.sin(Yc) / Xc

    ny = y.size
    tags = np.full((nx, ny), TAG_INTERIOR, dtype=np.int8)
    tags[-1, :] = TAG_OUTER
    if ilo == 1:
        tags[0, :] = TAG_INNER
    else:
        if domain is None or domain.contains is None:
            raise ValueError("disc mode requires a domain with an obstacle "
                             "membership test")
        X, Y = np.meshgrid(x, y, indexing="ij")
        pts = np.stack([(X * np.cos(Y)).ravel(), (X * np.sin(Y)).ravel()],
                       axis=-1)
        inside = domain.contains(pts).reshape(nx, ny)
        inside[-1, :] = False
        if not inside.any():
            raise GridResolutionError(
                "no grid node falls inside the obstacle: the boundary is "
                "under-resolved at this grid spacing")
        tags[inside] = TAG_INNER

    dxf = np.diff(x)
    dxc = np.empty(nx)
    dxc[1:-1] = xf[1:] - xf[:-1]
    dxc[0] = xf[0] - (0.0 if ilo == 0 else x[0])
    dxc[-1] = x[-1] - xf[-1]
    cw = np.empty(nx)
    cw[1:-1] = x[2:] - x[:-2]
    cw[0] = x[1] - x[0]
    cw[-1] = x[-1] - x[-2]

    grid = Grid(spec=spec, x=x, xf=xf, y=y, dy=float(dy), ybc=ybc, ilo=ilo,
                dxf=dxf, dxc=dxc, cw=cw, Af=Af, Gxf=Gxf, By=By, Gyf=Gyf,
                Omc=Omc, Gc=Gc, s1=s1, s2=s2, tags=tags)
    for arr in (grid.x, grid.xf, grid.y, grid.dxf, grid.dxc, grid.cw, grid.Af,
                grid.Gxf, grid.By, grid.Gyf, grid.Omc, grid.Gc, grid.s1,
                grid.s2, grid.tags):
        arr.setflags(write=False)
    return grid
