"""Closed-form solutions and barriers for the reduced drift equation.

Everything here is a scalar formula or a one-dimensional quadrature/root
problem:

* the radial catenoid profile over an exterior ball, its slope and its
  finite height at infinity (n >= 3),
* the collar constant C(r, n, lam, a) = (2|a|(n-1) + |lam| r) / (2|a| r)
  controlling how fast a radial supersolution must bend near the obstacle,
* the optimal rate ``varsigma``, the root mu > C of
  cosh(mu / sqrt(mu^2 - C^2)) = mu / C, which maximizes the collar height
  f(mu) = cosh^{-1}(mu/C) / mu,
* the height cap L = 1 / sqrt(varsigma^2 - C^2) (rotational case) or
  h(n, r) (pure translation),
* the collar profile psi(t) = cosh^{-1}(1 + b t) / b, capped at
  t0 = (b - C) / (b C) to give the global barrier W,
* the shifted-catenoid subsolution max{0, v_alpha - (v_alpha(inf) - c)}
  used by the height-prescribed construction.

Quadrature: the profile integrand 1/sqrt(t^{2(n-1)} - 1) blows up at t = 1
and decays like t^{-(n-1)} at infinity.  Both ends are removed analytically
(t = 1 + u^2 near the lower end, t = 1/u on the tail, split at 1 + 1/2)
and the smooth pieces go to adaptive quadrature.
"""

from __future__ import annotations

import sys
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "CatenoidProfile",
    "CatenoidValue",
    "BarrierSpec",
    "PerronSubsolution",
    "RootBracketError",
    "profile_integral",
    "catenoid_height",
    "catenoid_eval",
    "catenoid_slope",
    "barrier_constant",
    "solve_varsigma",
    "height_cap",
    "collar_barrier_spec",
    "collar_psi",
    "collar_psi_slope",
    "collar_barrier",
    "perron_subsolution",
]

_SPLIT = 1.5           # pieces meet here; both substitutions stay smooth
_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
SLOPE_MAX = sys.float_info.max


class RootBracketError(RuntimeError):
    """Root solve failed; carries the last bracketing interval."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(f"{message} (bracket {bracket[0]:.6g}, {bracket[1]:.6g})")
        self.bracket = bracket


def _quad(f, lo, hi) -> float:
    val, _ = quad(f, lo, hi, **_QUAD_OPTS)
    return val


def profile_integral(x: float, n: int) -> float:
    """F(x; n) = integral_1^x dt / sqrt(t^{2(n-1)} - 1), x in [1, inf].

    x = inf is allowed for n >= 3 (the integral diverges for n = 2).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if x < 1.0:
        raise ValueError("x must be >= 1")
    m = 2 * (n - 1)
    total = 0.0
    # [1, min(x, split)]: t = 1 + u^2 kills the inverse-sqrt singularity
    upper = min(x, _SPLIT)
    if upper > 1.0:
        u_hi = np.sqrt(upper - 1.0)

        def near(u):
            return 2.0 * u / np.sqrt(np.expm1(m * np.log1p(u * u)))

        total += _quad(near, 0.0, u_hi)
    # (split, x]: t = 1/u maps the tail to a bounded interval
    if x > _SPLIT:
        u_lo = 0.0 if np.isinf(x) else 1.0 / x
        if np.isinf(x) and n == 2:
            raise ValueError("profile integral diverges at infinity for n = 2")

        def far(u):
            return u ** (n - 3) / np.sqrt(1.0 - u ** m)

        total += _quad(far, u_lo, 1.0 / _SPLIT)
    return total


def catenoid_height(n: int, rho: float) -> float:
    """Height at infinity of the radial catenoid over an exterior ball of
    radius rho; equals rho times the unit-radius height.  n >= 3 only."""
    if n < 3:
        raise ValueError("height at infinity is finite only for n >= 3 "
                         "(the profile is unbounded when n = 2)")
    if rho <= 0.0:
        raise ValueError("rho must be positive")
    return rho * profile_integral(np.inf, n)


@dataclass(frozen=True)
class CatenoidProfile:
    """Radial catenoid vanishing on the sphere of radius rho about center."""

    n: int
    rho: float
    center: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.rho <= 0.0:
            raise ValueError("rho must be positive")

    def radius_of(self, q) -> float:
        q = np.asarray(q, dtype=float)
        c = np.zeros_like(q) if self.center is None else np.asarray(self.center)
        return float(np.linalg.norm(q - c))


@dataclass(frozen=True)
class CatenoidValue:
    value: float
    slope: float
    slope_saturated: bool = False


def catenoid_slope(n: int, rho: float, tau) -> np.ndarray:
    """|gradient| of the catenoid profile, 1/sqrt((tau/rho)^{2(n-1)} - 1)."""
    tau = np.asarray(tau, dtype=float)
    arg = (tau / rho) ** (2 * (n - 1)) - 1.0
    with np.errstate(divide="ignore"):
        return np.where(arg > 0.0, 1.0 / np.sqrt(np.maximum(arg, 0.0)), np.inf)


def catenoid_eval(cp: CatenoidProfile, tau: float) -> CatenoidValue:
    """Profile value and slope at radius tau >= rho.

    The slope diverges at the neck; it is reported saturated (largest
    representable float plus a flag) rather than overflowing silently.
    """
    if tau < cp.rho:
        raise ValueError(f"tau = {tau} below the neck radius rho = {cp.rho}")
    value = cp.rho * profile_integral(tau / cp.rho, cp.n)
    slope = float(catenoid_slope(cp.n, cp.rho, tau))
    if np.isinf(slope):
        return CatenoidValue(value=value, slope=SLOPE_MAX, slope_saturated=True)
    return CatenoidValue(value=value, slope=slope)


def barrier_constant(r: float, n: int, lam: float, a: float) -> float:
    """Collar constant C = (2|a|(n-1) + |lam| r) / (2|a| r)."""
    if r <= 0.0:
        raise ValueError("r must be positive")
    if a == 0.0:
        raise ValueError("a must be nonzero")
    return (2.0 * abs(a) * (n - 1) + abs(lam) * r) / (2.0 * abs(a) * r)


def _varsigma_residual(mu: float, C: float) -> float:
    arg = mu / np.sqrt((mu - C) * (mu + C))
    if arg > 700.0:  # cosh overflow; the residual is decisively positive
        return np.inf
    return np.cosh(arg) - mu / C


def _varsigma_residual_prime(mu: float, C: float) -> float:
    d2 = (mu - C) * (mu + C)
    arg = mu / np.sqrt(d2)
    return -np.sinh(arg) * C * C / d2 ** 1.5 - 1.0 / C


def solve_varsigma(C: float, tol: float = 1e-12) -> float:
    """Root mu > C of cosh(mu / sqrt(mu^2 - C^2)) = mu / C.

    The root is the maximizer of f(mu) = cosh^{-1}(mu/C) / mu, which
    vanishes at both ends of (C, inf); located by a geometric scan for an
    interior discrete maximum of f, golden-section refinement, then Newton
    polish on the residual.  The scan additionally verifies the residual
    changes sign exactly once and warns otherwise.
    """
    if C <= 0.0:
        raise ValueError("C must be positive")
    grid = C * np.geomspace(1.0 + 1e-6, 64.0, 400)
    fvals = np.arccosh(grid / C) / grid
    imax = int(np.argmax(fvals))
    if imax == 0 or imax == len(grid) - 1:
        raise RootBracketError("no interior maximum of the collar height on "
                               "the scan grid", (float(grid[0]), float(grid[-1])))
    res = np.array([_varsigma_residual(m, C) for m in grid])
    signs = np.sign(res[np.isfinite(res)])
    crossings = int(np.sum(signs[:-1] * signs[1:] < 0))
    if crossings != 1:
        warnings.warn(
            f"expected a single sign change of the collar-rate residual, "
            f"found {crossings}; using the maximizer bracket", stacklevel=2)

    lo, hi = float(grid[imax - 1]), float(grid[imax + 1])
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    f = lambda mu: np.arccosh(mu / C) / mu
    x1, x2 = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > 1e-10 * C:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
    mu = 0.5 * (lo + hi)
    for _ in range(50):
        r = _varsigma_residual(mu, C)
        if abs(r) <= tol * max(1.0, mu / C):
            return float(mu)
        step = r / _varsigma_residual_prime(mu, C)
        mu_new = mu - step
        if not (C < mu_new):
            mu_new = 0.5 * (mu + C)
        mu = mu_new
    if abs(_varsigma_residual(mu, C)) > 1e-10:
        raise RootBracketError("collar-rate root solve did not converge",
                               (lo, hi))
    return float(mu)


def height_cap(r: float, n: int, lam: float, a: float) -> float:
    """Largest asymptotic height certified by the radial barriers.

    1/sqrt(varsigma^2 - C^2) when lam != 0, the catenoid height h(n, r)
    when lam = 0.  Requires n >= 3.
    """
    if n < 3:
        raise ValueError("the height cap requires n >= 3")
    if lam == 0.0:
        return catenoid_height(n, r)
    C = barrier_constant(r, n, lam, a)
    vs = solve_varsigma(C)
    return 1.0 / np.sqrt((vs - C) * (vs + C))


@dataclass(frozen=True)
class BarrierSpec:
    """Radial collar barrier data: psi(t) = cosh^{-1}(1 + b t)/b on [0, t0],
    constant beyond, anchored at an interior sphere of radius r."""

    r: float
    n: int
    lam: float
    a: float
    C: float
    b: float
    t0: float
    varsigma: float
    L: float

    @property
    def cap(self) -> float:
        """Barrier value on the plateau (continuity at t0 is exact)."""
        return collar_psi(self.b, self.t0)


def collar_barrier_spec(r: float, n: int, lam: float, a: float,
                        b: float | None = None) -> BarrierSpec:
    """Assemble the collar barrier constants; b defaults to the optimal
    rate varsigma, which maximizes the plateau height (then cap = L)."""
    if n < 3:
        raise ValueError("collar barriers require n >= 3")
    if lam == 0.0:
        raise ValueError("collar barriers require lam != 0 "
                         "(use the catenoid profile when lam = 0)")
    C = barrier_constant(r, n, lam, a)
    vs = solve_varsigma(C)
    if b is None:
        b = vs
    if b <= C:
        raise ValueError(f"rate b = {b} must exceed C = {C}")
    t0 = (b - C) / (b * C)
    L = 1.0 / np.sqrt((vs - C) * (vs + C))
    return BarrierSpec(r=r, n=n, lam=lam, a=a, C=C, b=float(b), t0=float(t0),
                       varsigma=vs, L=float(L))


def collar_psi(b: float, t):
    """psi(t) = cosh^{-1}(1 + b t) / b; increasing and concave, psi(0) = 0."""
    t = np.asarray(t, dtype=float)
    return np.arccosh(1.0 + b * t) / b


def collar_psi_slope(b: float, t):
    """psi'(t) = 1 / sqrt((1 + b t)^2 - 1); diverges as t -> 0+."""
    t = np.asarray(t, dtype=float)
    arg = b * t * (2.0 + b * t)
    with np.errstate(divide="ignore"):
        return np.where(arg > 0.0, 1.0 / np.sqrt(np.maximum(arg, 0.0)), np.inf)


def collar_barrier(bs: BarrierSpec, d: float) -> tuple[float, float, bool]:
    """Capped barrier W and slope at distance d >= 0 from the obstacle.

    W follows psi on the collar [0, t0] and stays at the plateau value
    beyond; the slope at d = 0 is reported saturated.
    """
    if d < 0.0:
        raise ValueError("d must be nonnegative")
    if d <= bs.t0:
        w = float(collar_psi(bs.b, d))
        slope = float(collar_psi_slope(bs.b, d))
        if np.isinf(slope):
            return w, SLOPE_MAX, True
        return w, slope, False
    return bs.cap, 0.0, False


@dataclass(frozen=True)
class PerronSubsolution:
    """Shifted catenoid pushed below its asymptote: vanishes on the ball of
    radius alpha, rises to the target height c at infinity."""

    alpha: float
    c: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if self.c < 0.0:
            raise ValueError("target height c must be nonnegative")
        if self.c > 0.0 and catenoid_height(self.n, self.alpha) <= self.c:
            raise ValueError(
                f"ball radius alpha = {self.alpha} too small: height at "
                f"infinity {catenoid_height(self.n, self.alpha):.6g} does not "
                f"exceed c = {self.c}")

    @property
    def height_at_infinity(self) -> float:
        return catenoid_height(self.n, self.alpha)


def perron_subsolution(ps: PerronSubsolution, q) -> float:
    """Subsolution value at a quotient point (or at a radius, if scalar)."""
    q = np.asarray(q, dtype=float)
    tau = float(q) if q.ndim == 0 else float(np.linalg.norm(q))
    if tau <= ps.alpha:
        return 0.0
    if ps.c == 0.0:
        return 0.0
    v = ps.alpha * profile_integral(tau / ps.alpha, ps.n)
    return max(0.0, v - (ps.height_at_infinity - ps.c))
