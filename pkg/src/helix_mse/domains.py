"""Quotient-domain descriptions: which obstacle is cut out of the slice.

A domain is the exterior of a compact obstacle in the quotient R^n.  The
drivers need two radii alongside the obstacle itself: ``varrho``, the
radius of the smallest origin-centered ball containing the obstacle
boundary, and (when known) the interior sphere radius ``r`` of the
obstacle in the quotient metric.  For an origin-centered Euclidean ball
the two coincide with the ball radius for every angular rate, because
radial rays are unit-speed minimizing curves of the quotient metric.  For
other obstacles ``r`` has no computational recipe; it is taken as user
input or estimated from a numerical distance field, and the provenance is
recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["DomainSpec", "exterior_ball", "figure1_circle", "custom_obstacle"]


@dataclass(frozen=True)
class DomainSpec:
    """Exterior domain in the quotient: everything outside one obstacle."""

    kind: str                      # 'exterior-ball' | 'figure1-circle' | 'custom-obstacle'
    varrho: float                  # circumradius of the obstacle about the origin
    center: np.ndarray | None = None
    radius: float | None = None
    inner_sphere_radius: float | None = None
    inner_sphere_source: str = "unset"   # 'exact-radial' | 'user' | 'distance-estimate'
    contains: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    boundary_sampler: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    @property
    def origin_centered_ball(self) -> bool:
        return (self.kind == "exterior-ball"
                and self.center is not None
                and float(np.linalg.norm(self.center)) == 0.0)

    def require_inner_sphere_radius(self) -> float:
        if self.inner_sphere_radius is None:
            raise ValueError(
                f"domain kind '{self.kind}' has no interior sphere radius; "
                "pass one explicitly or estimate it from a distance field")
        return self.inner_sphere_radius


def exterior_ball(rho: float, center=None, dim: int = 2,
                  inner_sphere_radius: float | None = None) -> DomainSpec:
    """Exterior of a Euclidean ball of radius rho.

    Centered at the origin (the default) the ball is a geodesic ball of
    the quotient metric for every angular rate, so the interior sphere
    radius is exactly rho.  Off-center, the radius must be supplied.
    """
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    varrho = float(np.linalg.norm(c)) + rho
    if inner_sphere_radius is not None:
        r, src = inner_sphere_radius, "user"
    elif float(np.linalg.norm(c)) == 0.0:
        r, src = rho, "exact-radial"
    else:
        r, src = None, "unset"

    def contains(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.linalg.norm(pts - c, axis=-1) <= rho

    def boundary(theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        ring = np.stack([np.cos(theta), np.sin(theta)], axis=-1) * rho
        out = np.zeros(theta.shape + (dim,))
        out[..., :2] = ring
        return out + c

    return DomainSpec(kind="exterior-ball", varrho=varrho, center=c, radius=rho,
                      inner_sphere_radius=r, inner_sphere_source=src,
                      contains=contains, boundary_sampler=boundary)


def figure1_circle(inner_sphere_radius: float | None = None) -> DomainSpec:
    """Exterior of the unit circle centered at distance 5 from the origin.

    This is the planar shadow of the screw-invariant tube traced by a unit
    circle riding the screw motion with lam = a = 1; its projection is the
    unit circle centered at (0, 5).
    """
    dom = exterior_ball(1.0, center=(0.0, 5.0), dim=2,
                        inner_sphere_radius=inner_sphere_radius)
    src = "user" if inner_sphere_radius is not None else "unset"
    return DomainSpec(kind="figure1-circle", varrho=6.0, center=dom.center,
                      radius=1.0, inner_sphere_radius=inner_sphere_radius,
                      inner_sphere_source=src, contains=dom.contains,
                      boundary_sampler=dom.boundary_sampler)


def custom_obstacle(contains: Callable[[np.ndarray], np.ndarray],
                    varrho: float,
                    boundary_sampler: Callable[[np.ndarray], np.ndarray] | None = None,
                    inner_sphere_radius: float | None = None) -> DomainSpec:
    """Exterior of a user-described obstacle (membership test required)."""
    if varrho <= 0.0:
        raise ValueError("varrho must be positive")
    return DomainSpec(kind="custom-obstacle", varrho=varrho,
                      inner_sphere_radius=inner_sphere_radius,
                      inner_sphere_source="user" if inner_sphere_radius else "unset",
                      contains=contains, boundary_sampler=boundary_sampler)
