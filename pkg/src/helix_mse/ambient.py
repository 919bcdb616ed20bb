"""Ambient verification: lift quotient profiles back to R^{n+1}.

A quotient solution v induces the screw-invariant ambient function
u = v o (helicoidal projection).  This module samples u in the ambient
space and verifies, by finite differences, that it satisfies the ambient
minimal surface equation, that it is invariant under the group motion,
and that its ambient gradient norm equals the quotient gradient norm of v
at the projected point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from helix_mse.closed_forms import catenoid_slope, profile_integral
from helix_mse.groups import GroupSpec, group_action, helicoidal_projection

__all__ = ["RadialProfile", "catenoid_profile_for_lift", "AmbientReport",
           "ambient_minimal_residual_fd", "lift_and_verify",
           "ambient_catenoid_samples"]


def ambient_catenoid_samples(gs: GroupSpec, rho: float, m: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Random ambient points whose projections land in [1.5, 6] rho.

    The projected radius is the slice-plane norm, preserved by the screw
    motion; the translation coordinate is drawn independently.
    """
    tau = rng.uniform(1.5 * rho, 6.0 * rho, m)
    u = rng.standard_normal((m, gs.n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    q = tau[:, None] * u
    p = np.zeros((m, gs.n + 1))
    p[:, list(gs.slice_axes)] = q
    p[:, gs.kk] = rng.uniform(-5.0, 5.0, m)
    # scatter along the orbits so the slice is not special
    for row in range(m):
        p[row] = group_action(gs, p[row], float(rng.uniform(-3.0, 3.0)))
    return p


@dataclass(frozen=True)
class RadialProfile:
    """Radial quotient profile with its slope, for lifting."""

    inner_radius: float
    value_at_radius: Callable[[float], float]
    slope_at_radius: Callable[[float], float]
    name: str = "profile"


def catenoid_profile_for_lift(n: int, rho: float) -> RadialProfile:
    return RadialProfile(
        inner_radius=rho,
        value_at_radius=lambda tau: rho * profile_integral(tau / rho, n),
        slope_at_radius=lambda tau: float(catenoid_slope(n, rho, tau)),
        name=f"catenoid(rho={rho:g})")


@dataclass
class AmbientReport:
    n_samples: int
    n_skipped: int
    fd_step_scale: float
    max_mse_residual: float
    mean_mse_residual: float
    max_invariance_error: float
    max_gradient_relation_error: float
    samples: np.ndarray | None = None          # used ambient points
    mse_residuals: np.ndarray | None = None    # per-sample |FD residual|
    gradient_relation_errors: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "ambient-lift",
            "n_samples": self.n_samples, "n_skipped": self.n_skipped,
            "fd_step_scale": self.fd_step_scale,
            "max_mse_residual": self.max_mse_residual,
            "mean_mse_residual": self.mean_mse_residual,
            "max_invariance_error": self.max_invariance_error,
            "max_gradient_relation_error": self.max_gradient_relation_error,
        }


def ambient_minimal_residual_fd(u: Callable[[np.ndarray], float],
                                p: np.ndarray, step: float) -> float:
    """Central-difference minimal surface operator div(grad u / W) at p."""
    p = np.asarray(p, dtype=float)
    m = p.size
    g = np.empty(m)
    H = np.empty((m, m))
    u0 = u(p)
    for k in range(m):
        ek = np.zeros(m)
        ek[k] = step
        up, um = u(p + ek), u(p - ek)
        g[k] = (up - um) / (2.0 * step)
        H[k, k] = (up - 2.0 * u0 + um) / step ** 2
    for k in range(m):
        for l in range(k + 1, m):
            ek = np.zeros(m)
            el = np.zeros(m)
            ek[k] = step
            el[l] = step
            H[k, l] = H[l, k] = (u(p + ek + el) - u(p + ek - el)
                                 - u(p - ek + el) + u(p - ek - el)) / (4.0 * step ** 2)
    g2 = float(g @ g)
    return float(((1.0 + g2) * np.trace(H) - g @ H @ g) / (1.0 + g2) ** 1.5)


def _fd_gradient_norm(u, p, step):
    p = np.asarray(p, dtype=float)
    g = np.empty(p.size)
    for k in range(p.size):
        ek = np.zeros(p.size)
        ek[k] = step
        g[k] = (u(p + ek) - u(p - ek)) / (2.0 * step)
    return float(np.linalg.norm(g))


def lift_and_verify(gs: GroupSpec, profile: RadialProfile, samples,
                    mse_step_scale: float = 1e-3,
                    grad_step_scale: float = 1e-5,
                    rng: np.random.Generator | None = None) -> AmbientReport:
    """Check the ambient lift of a radial quotient profile at sample points.

    For each ambient sample p: the finite-difference ambient minimal
    surface residual of u = profile o projection (step
    mse_step_scale * (1 + |p|), central differences), invariance of u
    along the screw motion at random parameters, and agreement between the
    ambient |grad u| and the quotient slope at the projected radius.
    Samples whose FD stencil would cross the obstacle are skipped and
    counted.
    """
    rng = rng or np.random.default_rng(0)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[1] != gs.n + 1:
        raise ValueError(f"samples must have {gs.n + 1} coordinates")

    def u(p):
        q = helicoidal_projection(gs, p)
        return profile.value_at_radius(float(np.linalg.norm(q)))

    max_inv = 0.0
    used_pts: list[np.ndarray] = []
    residuals: list[float] = []
    grad_errs: list[float] = []
    skipped = 0
    for p in samples:
        tau = float(np.linalg.norm(helicoidal_projection(gs, p)))
        step = mse_step_scale * (1.0 + float(np.linalg.norm(p)))
        if tau - profile.inner_radius < 4.0 * step:
            skipped += 1
            continue
        used_pts.append(p)
        residuals.append(abs(ambient_minimal_residual_fd(u, p, step)))
        u0 = u(p)
        for t in rng.uniform(-5.0, 5.0, size=3):
            max_inv = max(max_inv, abs(u(group_action(gs, p, float(t))) - u0))
        gstep = grad_step_scale * (1.0 + float(np.linalg.norm(p)))
        gn = _fd_gradient_norm(u, p, gstep)
        grad_errs.append(abs(gn - profile.slope_at_radius(tau)))
    if not used_pts:
        raise ValueError("all samples were skipped; none project into the "
                         "profile domain")
    residuals_arr = np.array(residuals)
    grad_arr = np.array(grad_errs)
    return AmbientReport(
        n_samples=len(used_pts), n_skipped=skipped,
        fd_step_scale=mse_step_scale,
        max_mse_residual=float(residuals_arr.max()),
        mean_mse_residual=float(residuals_arr.mean()),
        max_invariance_error=max_inv,
        max_gradient_relation_error=float(grad_arr.max()),
        samples=np.array(used_pts), mse_residuals=residuals_arr,
        gradient_relation_errors=grad_arr)
