"""Helicoidal screw-motion group, quotient metric and drift geometry.

A one-parameter isometry group of R^{n+1} is fixed by an angular rate
``lam`` acting in the (x_i, x_j) plane and a translation rate ``a`` along
x_k.  The orbit space is identified with the slice {x_k = 0} ~ R^n and
carries the unique metric making the orbit projection a Riemannian
submersion.  With T the orbit tangent field, that metric on slice vectors
is

    g(u, v) = <u, v> - <u, T><v, T> / |T|^2 ,

a rank-one correction of the Euclidean metric damping the angular
direction of the (x_i, x_j) plane by a^2 / (lam^2 sigma^2 + a^2), where
sigma = |(x_i, x_j)|.  Screw orbits are circles of curvature
lam^2 sigma / (lam^2 sigma^2 + a^2); pushing their curvature vector down
to the slice yields the drift field entering the reduced minimal surface
operator.

Orientation convention: T = d/dt (group action) at t = 0, i.e.
T = lam*x_j e_i - lam*x_i e_j + a e_k.  All lifts and drift computations
use this sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GroupSpec",
    "MetricSample",
    "group_action",
    "helicoidal_projection",
    "orbit_tangent",
    "orbit_arclength_parametrization",
    "orbit_mean_curvature",
    "sup_orbit_curvature",
    "quotient_metric",
    "horizontal_lift",
    "drift_field",
    "drift_coefficient",
    "angular_metric_factor",
    "g_norm",
    "embed_slice_vector",
    "oneill_curvature_check",
]


@dataclass(frozen=True)
class GroupSpec:
    """Parameters of the screw-motion group in R^{n+1}.

    lam:     angular rate (0 selects the pure-translation group)
    a:       translation rate along x_k, nonzero
    i, j, k: pairwise distinct 1-based axis indices in 1..n+1
    n:       quotient dimension, >= 2
    """

    lam: float
    a: float
    i: int = 1
    j: int = 2
    k: int = 3
    n: int = 2

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("quotient dimension n must be >= 2")
        if self.a == 0.0:
            raise ValueError("translation rate a must be nonzero")
        axes = (self.i, self.j, self.k)
        if len(set(axes)) != 3:
            raise ValueError("axis indices i, j, k must be pairwise distinct")
        for ax in axes:
            if not 1 <= ax <= self.n + 1:
                raise ValueError(f"axis index {ax} outside 1..{self.n + 1}")

    # 0-based ambient indices
    @property
    def ii(self) -> int:
        return self.i - 1

    @property
    def jj(self) -> int:
        return self.j - 1

    @property
    def kk(self) -> int:
        return self.k - 1

    @property
    def slice_axes(self) -> tuple[int, ...]:
        """0-based ambient indices of the slice {x_k = 0}, in ambient order."""
        return tuple(l for l in range(self.n + 1) if l != self.kk)

    @property
    def qi(self) -> int:
        """Position of axis i within slice coordinates."""
        return self.slice_axes.index(self.ii)

    @property
    def qj(self) -> int:
        return self.slice_axes.index(self.jj)


@dataclass(frozen=True)
class MetricSample:
    """Quotient metric tensor at a slice point, with its rank-one structure."""

    base: np.ndarray          # quotient point, shape (n,)
    tensor: np.ndarray        # symmetric n x n matrix
    orbit_tangent: np.ndarray  # ambient T at the slice point, shape (n+1,)
    orbit_speed_sq: float     # |T|^2 = lam^2 sigma^2 + a^2


def _check_point(p, dim: int, name: str) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (dim,):
        raise ValueError(f"{name} must have shape ({dim},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def group_action(gs: GroupSpec, p, t: float) -> np.ndarray:
    """Apply the screw motion with parameter t to an ambient point."""
    p = _check_point(p, gs.n + 1, "p")
    c, s = np.cos(gs.lam * t), np.sin(gs.lam * t)
    out = p.copy()
    xi, xj = p[gs.ii], p[gs.jj]
    out[gs.ii] = xi * c + xj * s
    out[gs.jj] = xj * c - xi * s
    out[gs.kk] = p[gs.kk] + gs.a * t
    return out


def helicoidal_projection(gs: GroupSpec, p) -> np.ndarray:
    """Project an ambient point to the slice {x_k = 0} along its orbit.

    Rotates (x_i, x_j) back by the angle the orbit accumulates while
    translating x_k to zero; constant on orbits.
    """
    p = _check_point(p, gs.n + 1, "p")
    theta = gs.lam * p[gs.kk] / gs.a
    c, s = np.cos(theta), np.sin(theta)
    xi, xj = p[gs.ii], p[gs.jj]
    q_amb = p.copy()
    q_amb[gs.ii] = xi * c - xj * s
    q_amb[gs.jj] = xj * c + xi * s
    return q_amb[list(gs.slice_axes)]


def embed_slice_vector(gs: GroupSpec, w) -> np.ndarray:
    """Embed a quotient vector/point into R^{n+1} with zero x_k component."""
    w = _check_point(w, gs.n, "w")
    out = np.zeros(gs.n + 1)
    out[list(gs.slice_axes)] = w
    return out


def orbit_tangent(gs: GroupSpec, p) -> np.ndarray:
    """Orbit tangent T at an ambient point (generator of the motion)."""
    p = _check_point(p, gs.n + 1, "p")
    T = np.zeros(gs.n + 1)
    T[gs.ii] = gs.lam * p[gs.jj]
    T[gs.jj] = -gs.lam * p[gs.ii]
    T[gs.kk] = gs.a
    return T


def orbit_speed_sq(gs: GroupSpec, p) -> float:
    p = _check_point(p, gs.n + 1, "p")
    sig2 = p[gs.ii] ** 2 + p[gs.jj] ** 2
    return gs.lam ** 2 * sig2 + gs.a ** 2


def orbit_arclength_parametrization(gs: GroupSpec, p, s):
    """Unit-speed parametrization of the orbit through p, gamma(0) = p.

    The orbit is a helix (circle, or line when lam = 0 or sigma plays no
    role) traversed at speed 1; used as the independent oracle for the
    orbit curvature vector via second differences.
    """
    p = _check_point(p, gs.n + 1, "p")
    speed = np.sqrt(orbit_speed_sq(gs, p))
    return group_action(gs, p, s / speed)


def drift_coefficient(gs: GroupSpec, sigma):
    """A^2(sigma) = lam^2 / (lam^2 sigma^2 + a^2), the squared angular rate
    of the arclength orbit parametrization."""
    sigma = np.asarray(sigma, dtype=float)
    return gs.lam ** 2 / (gs.lam ** 2 * sigma ** 2 + gs.a ** 2)


def orbit_mean_curvature(gs: GroupSpec, p) -> tuple[np.ndarray, float, float]:
    """Curvature vector of the orbit through p.

    Returns (vector, magnitude, A) where vector = -A^2 (x_i e_i + x_j e_j),
    magnitude = lam^2 sigma / (lam^2 sigma^2 + a^2) and A is the signed
    angular rate lam / sqrt(lam^2 sigma^2 + a^2).  The vector is orthogonal
    to the orbit tangent.
    """
    p = _check_point(p, gs.n + 1, "p")
    sigma = float(np.hypot(p[gs.ii], p[gs.jj]))
    A = gs.lam / np.sqrt(gs.lam ** 2 * sigma ** 2 + gs.a ** 2)
    vec = np.zeros(gs.n + 1)
    vec[gs.ii] = -A ** 2 * p[gs.ii]
    vec[gs.jj] = -A ** 2 * p[gs.jj]
    magnitude = A ** 2 * sigma
    return vec, magnitude, A


def sup_orbit_curvature(gs: GroupSpec) -> tuple[float, float | None]:
    """Supremum of the orbit curvature over all points and its maximizer.

    Returns (|lam| / (2|a|), |a|/|lam|); the maximizing cylinder radius is
    None when lam = 0 (all orbits are straight lines).
    """
    if gs.lam == 0.0:
        return 0.0, None
    return abs(gs.lam) / (2.0 * abs(gs.a)), abs(gs.a) / abs(gs.lam)


def quotient_metric(gs: GroupSpec, q) -> MetricSample:
    """Quotient metric tensor at a slice point q.

    g = I - t t^T / |T|^2 with t the slice part of the orbit tangent;
    eigenvalues are 1 (multiplicity n-1) and a^2/(lam^2 sigma^2 + a^2) on
    the angular direction.
    """
    q = _check_point(q, gs.n, "q")
    p = embed_slice_vector(gs, q)
    T = orbit_tangent(gs, p)
    speed_sq = orbit_speed_sq(gs, p)
    t_slice = T[list(gs.slice_axes)]
    tensor = np.eye(gs.n) - np.outer(t_slice, t_slice) / speed_sq
    return MetricSample(base=q, tensor=tensor, orbit_tangent=T,
                        orbit_speed_sq=speed_sq)


def horizontal_lift(gs: GroupSpec, q, w) -> np.ndarray:
    """Horizontal lift of a quotient vector w at the slice point q.

    The unique ambient vector projecting to w and orthogonal to the orbit:
    xi = w - (<w, T>/|T|^2) T.  Its Euclidean norm equals the g-norm of w.
    """
    q = _check_point(q, gs.n, "q")
    w_amb = embed_slice_vector(gs, w)
    p = embed_slice_vector(gs, q)
    T = orbit_tangent(gs, p)
    return w_amb - (w_amb @ T) / orbit_speed_sq(gs, p) * T


def _lift_at_ambient(gs: GroupSpec, p: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Horizontal lift of the quotient vector w at an arbitrary ambient point.

    Computed at the slice representative and pushed forward by the screw
    motion reaching p (a linear rotation, so horizontality is preserved).
    """
    t = p[gs.kk] / gs.a
    q = helicoidal_projection(gs, p)
    xi0 = horizontal_lift(gs, q, w)
    c, s = np.cos(gs.lam * t), np.sin(gs.lam * t)
    out = xi0.copy()
    vi, vj = xi0[gs.ii], xi0[gs.jj]
    out[gs.ii] = vi * c + vj * s
    out[gs.jj] = vj * c - vi * s
    return out


def drift_field(gs: GroupSpec, q) -> np.ndarray:
    """Drift vector at a slice point: the orbit curvature vector read in
    slice coordinates (it is horizontal, so the projection is immediate)."""
    q = _check_point(q, gs.n, "q")
    sigma = float(np.hypot(q[gs.qi], q[gs.qj]))
    A2 = drift_coefficient(gs, sigma)
    J = np.zeros(gs.n)
    J[gs.qi] = -A2 * q[gs.qi]
    J[gs.qj] = -A2 * q[gs.qj]
    return J


def angular_metric_factor(gs: GroupSpec, sigma):
    """Length of d/dtheta in the quotient metric, f(sigma) =
    |a| sigma / sqrt(lam^2 sigma^2 + a^2)."""
    sigma = np.asarray(sigma, dtype=float)
    return abs(gs.a) * sigma / np.sqrt(gs.lam ** 2 * sigma ** 2 + gs.a ** 2)


def g_norm(gs: GroupSpec, q, w) -> float:
    """g-norm of a quotient vector at q."""
    ms = quotient_metric(gs, q)
    w = _check_point(w, gs.n, "w")
    return float(np.sqrt(w @ ms.tensor @ w))


def oneill_curvature_check(gs: GroupSpec, q, X, Y, h: float | None = None) -> float:
    """Sectional curvature estimate of the quotient via the submersion
    curvature formula.

    For a flat total space the sectional curvature of the base on the plane
    spanned by g-orthonormal X, Y equals (3/4) |[Xbar, Ybar]^v|^2, with
    Xbar, Ybar horizontal lifts and ^v the component along the orbit
    tangent.  The bracket is estimated by central finite differences of the
    lifted fields, step h = 1e-4 (1 + |q|) by default.  Diagnostic only;
    the returned value is nonnegative up to round-off.
    """
    q = _check_point(q, gs.n, "q")
    X = _check_point(X, gs.n, "X")
    Y = _check_point(Y, gs.n, "Y")
    if h is None:
        h = 1e-4 * (1.0 + float(np.linalg.norm(q)))
    p = embed_slice_vector(gs, q)

    def lifted(vec):
        return lambda pt: _lift_at_ambient(gs, pt, vec)

    Xf, Yf = lifted(X), lifted(Y)
    Xp, Yp = Xf(p), Yf(p)

    def directional(field, direction):
        return (field(p + h * direction) - field(p - h * direction)) / (2.0 * h)

    bracket = directional(Yf, Xp) - directional(Xf, Yp)
    T = orbit_tangent(gs, p)
    vert = (bracket @ T) / np.sqrt(orbit_speed_sq(gs, p))
    return 0.75 * float(vert ** 2)
