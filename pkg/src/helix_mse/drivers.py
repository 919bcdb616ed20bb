"""Desk-scale runs of the two existence constructions, with certificates.

Gradient-budget family: on each truncation (obstacle out to radius R) the
driver bisects on the outer boundary height t for the largest value whose
solution stays within the gradient budget s; the sup of |grad w| is then
pinned to s and attained on the obstacle boundary.  Across an increasing
ladder of truncations the solutions stabilize on a fixed reference
annulus; for n >= 3 their heights stack below the catenoid height
h(n, varrho), for n = 2 they grow logarithmically.

Height-prescribed solution: truncated solves with outer data c in
[0, height cap], sandwiched between the shifted-catenoid subsolution and
the collar barrier.  The true object is a supremum over all subsolutions;
the truncated Dirichlet solve plus the barrier sandwich is the computable
surrogate, and reports say so.

Certificates evaluate discrete reduced-operator residual signs and
pointwise comparisons on the solve grid, with tolerances tied to the grid
scale; supersolution checks exclude the thin band next to the obstacle
where the barrier slope blows up, and the exclusion is printed on the
certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from helix_mse.closed_forms import (BarrierSpec, PerronSubsolution,
                                    catenoid_height, collar_barrier_spec,
                                    collar_psi, height_cap, perron_subsolution,
                                    profile_integral)
from helix_mse.domains import DomainSpec
from helix_mse.grids import Grid, GridField, GridSpec, TAG_INTERIOR, build_grid
from helix_mse.solver import (SolveReport, SolverConfig, grad_norm_field,
                              reduced_operator_residual, solve_dirichlet,
                              sup_gradient)

__all__ = [
    "FamilyConfig",
    "LadderRung",
    "FamilyReport",
    "Certificate",
    "RadialBarrier",
    "PerronRung",
    "PerronReport",
    "HeightCapError",
    "gradient_constrained_family",
    "height_prescribed_solution",
    "certify_barriers",
    "gradient_decay_check",
    "collar_sign_barrier",
    "catenoid_barrier",
    "capped_collar_profile",
]


class HeightCapError(ValueError):
    """Requested asymptotic height exceeds the certified cap."""

    def __init__(self, c: float, cap: float):
        super().__init__(f"target height c = {c} exceeds the certified "
                         f"height cap {cap:.6g}")
        self.c = c
        self.cap = cap


@dataclass(frozen=True)
class FamilyConfig:
    """Group parameters and numerics shared by the driver runs."""

    n: int
    lam: float
    a: float
    nx: int = 768
    ny: int = 96
    grading: float = 2.0
    bisect_tol: float = 1e-6
    bracket_expansions: int = 40
    solver: SolverConfig = field(default_factory=SolverConfig)
    reduction: str | None = None   # override the domain-derived choice


@dataclass
class LadderRung:
    R: float
    t_k: float
    boundary_gradient: float
    sup_gradient: float
    sup_on_inner: bool
    height_at_outer: float
    sup_interior: float
    min_value: float
    inner_max_abs: float
    outer_gradient: float
    newton_iterations: int
    catenoid_slope_at_R: float | None
    bisection_trace: list[tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "R": self.R, "t_k": self.t_k,
            "boundary_gradient": self.boundary_gradient,
            "sup_gradient": self.sup_gradient,
            "sup_on_inner": bool(self.sup_on_inner),
            "height_at_outer": self.height_at_outer,
            "sup_interior": self.sup_interior,
            "min_value": self.min_value,
            "inner_max_abs": self.inner_max_abs,
            "outer_gradient": self.outer_gradient,
            "newton_iterations": self.newton_iterations,
            "catenoid_slope_at_R": self.catenoid_slope_at_R,
        }


@dataclass
class FamilyReport:
    s: float
    domain_kind: str
    varrho: float
    config: FamilyConfig
    rungs: list[LadderRung]
    reference_tau: np.ndarray
    limit_profile: GridField | None
    cauchy_diffs: list[float]
    cauchy_floor: float
    dichotomy: str
    growth_fit: dict | None
    recovered_inner_c: float | None
    h_ref: float | None
    anomalies: list[str]
    fields: list[GridField] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "gradient-budget-family",
            "s": self.s,
            "domain_kind": self.domain_kind,
            "varrho": self.varrho,
            "n": self.config.n, "lam": self.config.lam, "a": self.config.a,
            "rungs": [r.to_dict() for r in self.rungs],
            "cauchy_diffs": self.cauchy_diffs,
            "cauchy_floor": self.cauchy_floor,
            "dichotomy": self.dichotomy,
            "growth_fit": self.growth_fit,
            "recovered_inner_c": self.recovered_inner_c,
            "h_ref": self.h_ref,
            "anomalies": self.anomalies,
            "surrogate_note": ("per-rung heights are maximal under the "
                               "gradient budget on truncations; no limit at "
                               "infinity is asserted"),
        }


@dataclass(frozen=True)
class Certificate:
    kind: str              # 'supersolution-sign' | 'subsolution-sign' | 'sandwich'
    name: str
    max_violation: float
    grid_scale: float
    tolerance: float
    verdict: str           # 'pass' | 'fail'
    note: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "name": self.name,
                "max_violation": self.max_violation,
                "grid_scale": self.grid_scale, "tolerance": self.tolerance,
                "verdict": self.verdict, "note": self.note}


@dataclass(frozen=True)
class RadialBarrier:
    """Radial comparison profile with the checks it is subject to."""

    name: str
    profile: Callable[[np.ndarray], np.ndarray]       # tau -> values
    role: str | None = None    # 'supersolution' | 'subsolution' | 'exact-solution'
    region: Callable[[np.ndarray], np.ndarray] | None = None
    compare: str | None = None  # 'upper' | 'lower'
    note: str = ""


def _rung_grid(dom: DomainSpec, R: float, cfg: FamilyConfig) -> Grid:
    reduction = cfg.reduction
    if reduction is None:
        if dom.origin_centered_ball:
            reduction = "radial"
        elif cfg.n == 2:
            reduction = "polar2d"
        else:
            raise NotImplementedError(
                "non-radial obstacles are gridded only on the planar path")
    rho = dom.radius if dom.origin_centered_ball else 0.0
    if reduction == "axisym":
        spec = GridSpec("axisym", cfg.n, cfg.lam, cfg.a, rho, R,
                        nx=cfg.nx, ny=cfg.ny, grading=cfg.grading)
    elif reduction == "polar2d":
        spec = GridSpec("polar2d", 2, cfg.lam, cfg.a, rho, R,
                        nx=cfg.nx, ny=cfg.ny,
                        grading=cfg.grading if rho > 0 else 1.0)
    else:
        spec = GridSpec("radial", cfg.n, cfg.lam, cfg.a, rho, R,
                        nx=cfg.nx, ny=1, grading=cfg.grading)
    return build_grid(spec, domain=dom if rho == 0.0 else None)


def _outer_third_gradient(rep: SolveReport) -> float:
    grid = rep.field.grid
    gn = grad_norm_field(grid, rep.field.values)
    lo = grid.x[0] if grid.ilo == 1 else 0.0
    ring = grid.x >= lo + (2.0 / 3.0) * (grid.x[-1] - lo)
    sel = np.zeros(grid.shape, dtype=bool)
    sel[ring, :] = True
    sel &= grid.tags != 1
    return float(np.max(gn[sel]))


def _radial_flux_constant(grid: Grid, v: np.ndarray) -> float:
    """Neck parameter recovered from the discrete radial first integral.

    On the radial path Omega * v'/W is constant; its (n-1)-th root is the
    neck radius of the catenoid family member.  Median over the middle
    third of the faces, away from both boundaries.
    """
    p = (v[1:, 0] - v[:-1, 0]) / grid.dxf
    phi = p / np.sqrt(1.0 + p * p)
    K = grid.xf ** (grid.spec.n - 1) * phi
    m = grid.xf.size
    mid = K[m // 3: 2 * m // 3]
    return float(np.median(np.abs(mid)) ** (1.0 / (grid.spec.n - 1)))


def gradient_constrained_family(s: float, dom: DomainSpec, ladder,
                                cfg: FamilyConfig) -> FamilyReport:
    """Largest-height solutions under the gradient budget s, per truncation.

    For each rung R the outer height t is bisected for the largest value
    with a converged solve and sup |grad w| <= s (the budget binds at the
    obstacle boundary).  Monotonicity of the measured sup-gradient in t is
    checked over the probe trace and anomalies are recorded, never fixed.
    """
    if s < 0:
        raise ValueError("gradient budget s must be nonnegative")
    ladder = [float(R) for R in ladder]
    if sorted(ladder) != ladder:
        raise ValueError("ladder radii must be increasing")
    anomalies: list[str] = []
    rungs: list[LadderRung] = []
    fields: list[GridField] = []
    h_ref = catenoid_height(cfg.n, dom.varrho) if cfg.n >= 3 else None

    for R in ladder:
        grid = _rung_grid(dom, R, cfg)
        inner = 0.0
        trace: list[tuple[float, float]] = []
        cache: dict = {}

        def probe(t: float, warm=None) -> tuple[bool, SolveReport]:
            rep = solve_dirichlet(grid, inner, t, cfg.solver, v0=warm)
            ok = rep.ok and rep.sup_gradient <= s * (1.0 + 1e-12) + 1e-300
            if rep.ok:
                trace.append((t, rep.sup_gradient))
            return ok, rep

        if s == 0.0:
            ok, rep = probe(0.0)
            t_lo, rep_lo = 0.0, rep
        else:
            if cfg.n >= 3:
                hi = 2.0 * h_ref
            else:
                hi = 2.0 * s * dom.varrho * (1.0 + math.log(R / dom.varrho))
            t_lo, rep_lo = 0.0, None
            ok_hi, rep_hi = probe(hi)
            expansions = 0
            while ok_hi and expansions < cfg.bracket_expansions:
                t_lo, rep_lo = hi, rep_hi
                hi *= 2.0
                ok_hi, rep_hi = probe(hi, warm=rep_lo.field.values if rep_lo else None)
                expansions += 1
            if ok_hi:
                anomalies.append(f"R={R}: bracket expansion exhausted at t={hi}")
            warm = rep_lo.field.values if rep_lo is not None else None
            while hi - t_lo > cfg.bisect_tol * max(1.0, s):
                mid = 0.5 * (t_lo + hi)
                ok_mid, rep_mid = probe(mid, warm=warm)
                if ok_mid:
                    t_lo, rep_lo = mid, rep_mid
                    warm = rep_mid.field.values
                else:
                    hi = mid
            if rep_lo is None:
                ok0, rep_lo = probe(0.0)
                if not ok0:
                    anomalies.append(f"R={R}: no feasible height found")

        trace.sort(key=lambda p: p[0])
        for (ta, ga), (tb, gb) in zip(trace, trace[1:]):
            if gb < ga - 1e-8 * max(1.0, s):
                anomalies.append(
                    f"R={R}: sup-gradient not monotone between t={ta:.6g} "
                    f"({ga:.6g}) and t={tb:.6g} ({gb:.6g})")

        rep = rep_lo
        cat_slope = None
        if dom.origin_centered_ball:
            m = 2 * (cfg.n - 1)
            arg = (R / dom.varrho) ** m - 1.0
            cat_slope = 1.0 / math.sqrt(arg) if arg > 0 else float("inf")
        inner_vals = rep.field.values[grid.tags == 1]
        if grid.ilo == 1:
            inner_vals = rep.field.values[0, :]
        rungs.append(LadderRung(
            R=R, t_k=t_lo, boundary_gradient=rep.boundary_gradient,
            sup_gradient=rep.sup_gradient, sup_on_inner=rep.sup_gradient_on_inner,
            height_at_outer=rep.height_at_outer,
            sup_interior=float(np.max(rep.field.values)),
            min_value=float(np.min(rep.field.values)),
            inner_max_abs=float(np.max(np.abs(inner_vals))) if inner_vals.size else 0.0,
            outer_gradient=_outer_third_gradient(rep),
            newton_iterations=rep.newton_iterations,
            catenoid_slope_at_R=cat_slope, bisection_trace=trace))
        fields.append(rep.field)

    # interior stabilization on a fixed reference annulus
    lo = dom.varrho * 1.05
    hi = 0.9 * ladder[0]
    ref_tau = np.linspace(lo, hi, 64) if hi > lo else np.array([])
    profiles = [f.interp_radial(ref_tau) for f in fields] if ref_tau.size else []
    diffs = [float(np.max(np.abs(b - a))) for a, b in zip(profiles, profiles[1:])]
    # stabilization floor: local grid scale on the reference annulus plus the
    # bisection width; the continuum differences may sit below this noise
    h_loc = 0.0
    for f in fields:
        g = f.grid
        sel = (g.xf >= lo) & (g.xf <= hi)
        if sel.any():
            h_loc = max(h_loc, float(np.max(g.dxf[sel])))
    floor = 10.0 * cfg.bisect_tol * max(1.0, s) + 10.0 * h_loc ** 2

    limit_profile = None
    if ref_tau.size:
        ref_spec = GridSpec("radial", cfg.n, cfg.lam, cfg.a, float(ref_tau[0]),
                            float(ref_tau[-1]), nx=ref_tau.size, ny=1,
                            grading=1.0)
        limit_profile = GridField(build_grid(ref_spec), profiles[-1][:, None])

    growth_fit = None
    dichotomy = "inconclusive"
    if cfg.n == 2 and s > 0.0 and len(rungs) >= 2:
        lnR = np.log([r.R for r in rungs])
        t = np.array([r.t_k for r in rungs])
        A = np.vstack([lnR, np.ones_like(lnR)]).T
        coef, res_, *_ = np.linalg.lstsq(A, t, rcond=None)
        resid = float(np.sqrt(np.mean((A @ coef - t) ** 2)))
        growth_fit = {"alpha": float(coef[0]), "beta": float(coef[1]),
                      "rms_residual": resid}
        if coef[0] > 1e-3 * max(1.0, s):
            dichotomy = "unbounded-n2"
    elif cfg.n >= 3 and rungs:
        sup_last = rungs[-1].sup_interior
        stabilized = (len(rungs) < 2
                      or abs(rungs[-1].sup_interior - rungs[-2].sup_interior) < 1e-2)
        if h_ref - sup_last < 1e-2:
            dichotomy = "approaching-h"
        elif stabilized and h_ref - sup_last >= 5e-2:
            dichotomy = "bounded-below-h"
    elif s == 0.0:
        dichotomy = "bounded-below-h" if cfg.n >= 3 else "inconclusive"

    rec_c = None
    if dom.origin_centered_ball and fields and s > 0.0 and \
            fields[-1].grid.is_radial:
        rec_c = _radial_flux_constant(fields[-1].grid, fields[-1].values)

    return FamilyReport(
        s=s, domain_kind=dom.kind, varrho=dom.varrho, config=cfg, rungs=rungs,
        reference_tau=ref_tau, limit_profile=limit_profile,
        cauchy_diffs=diffs, cauchy_floor=floor, dichotomy=dichotomy,
        growth_fit=growth_fit, recovered_inner_c=rec_c, h_ref=h_ref,
        anomalies=anomalies, fields=fields)


def gradient_decay_check(report: FamilyReport) -> dict:
    """Trend of the outer-third gradient maxima across the ladder."""
    if len(report.rungs) < 3:
        raise ValueError("need at least 3 ladder rungs for a trend")
    vals = [r.outer_gradient for r in report.rungs]
    decreasing = all(b <= a * 1.05 + 1e-12 for a, b in zip(vals, vals[1:]))
    shrank = vals[-1] <= 0.5 * vals[0] + 1e-12 or vals[0] == 0.0
    verdict = "consistent with decay" if (decreasing and shrank) else "inconclusive"
    return {"outer_gradients": vals, "verdict": verdict}


def capped_collar_profile(bs: BarrierSpec, obstacle_radius: float):
    """Radial profile of the capped collar barrier around an origin ball."""

    def profile(tau):
        d = np.maximum(np.asarray(tau, dtype=float) - obstacle_radius, 0.0)
        return np.where(d <= bs.t0, collar_psi(bs.b, np.minimum(d, bs.t0)),
                        bs.cap)

    return profile


def collar_sign_barrier(bs: BarrierSpec, obstacle_radius: float,
                        cutoff_factor: float = 1e-3) -> RadialBarrier:
    """Uncapped collar profile with its supersolution region.

    The sign check applies on the collar, excluding the band
    d < cutoff_factor * t0 where the slope blows up and the discretization
    carries no information; the exclusion is recorded on the certificate.
    """
    cut = cutoff_factor * bs.t0

    def profile(tau):
        d = np.maximum(np.asarray(tau, dtype=float) - obstacle_radius, 0.0)
        return collar_psi(bs.b, d)

    def region(tau):
        d = np.asarray(tau, dtype=float) - obstacle_radius
        return (d >= cut) & (d <= bs.t0)

    return RadialBarrier(
        name=f"collar(b={bs.b:.6g})", profile=profile, role="supersolution",
        region=region,
        note=f"sign checked on {cut:.3e} <= d <= {bs.t0:.6g}; the band "
             f"d < {cutoff_factor:g}*t0 is excluded")


def catenoid_barrier(n: int, rho: float, role: str = "exact-solution",
                     compare: str | None = None,
                     shift: float = 0.0) -> RadialBarrier:
    """Radial catenoid profile (optionally shifted) as a barrier."""

    def profile(tau):
        tau = np.asarray(tau, dtype=float)
        vals = np.array([rho * profile_integral(max(t / rho, 1.0), n)
                         for t in np.atleast_1d(tau)])
        return vals.reshape(tau.shape) + shift

    def region(tau):
        # the neck slope is unresolvable; skip the first band above rho
        return np.asarray(tau, dtype=float) >= rho * 1.02

    return RadialBarrier(name=f"catenoid(rho={rho:g})", profile=profile,
                         role=role, region=region, compare=compare)


def _certify_on_field(grid: Grid, w: np.ndarray | None,
                      barriers: list[RadialBarrier]) -> list[Certificate]:
    certs: list[Certificate] = []
    h = grid.h_max
    tol_sign = 10.0 * h * h
    tol_cmp = 1e-8 + 10.0 * h * h
    nx, _ = grid.shape
    rows = np.zeros(grid.shape, dtype=bool)
    rows[grid.ilo:nx - 1, :] = True
    rows &= grid.tags == TAG_INTERIOR
    tau = grid.x[:, None] * np.ones((1, grid.shape[1]))

    for b in barriers:
        vals = np.broadcast_to(b.profile(grid.x)[:, None], grid.shape).copy()
        if b.role is not None:
            res = reduced_operator_residual(grid, GridField(grid, vals)).values
            sel = rows.copy()
            if b.region is not None:
                sel &= b.region(tau)
            if not sel.any():
                certs.append(Certificate(
                    kind="supersolution-sign", name=b.name,
                    max_violation=float("nan"), grid_scale=h,
                    tolerance=tol_sign, verdict="fail",
                    note="empty check region on this grid"))
            else:
                if b.role in ("supersolution", "exact-solution"):
                    viol = float(np.max(res[sel]))
                    certs.append(Certificate(
                        kind="supersolution-sign", name=b.name,
                        max_violation=viol, grid_scale=h, tolerance=tol_sign,
                        verdict="pass" if viol <= tol_sign else "fail",
                        note=b.note))
                if b.role in ("subsolution", "exact-solution"):
                    viol = float(np.max(-res[sel]))
                    certs.append(Certificate(
                        kind="subsolution-sign", name=b.name,
                        max_violation=viol, grid_scale=h, tolerance=tol_sign,
                        verdict="pass" if viol <= tol_sign else "fail",
                        note=b.note))
        if b.compare is not None:
            if w is None:
                raise ValueError("sandwich comparison requires a solution field")
            keep = grid.tags != 1 if grid.ilo == 0 else np.ones(grid.shape, bool)
            diff = (w - vals) if b.compare == "upper" else (vals - w)
            viol = float(np.max(diff[keep]))
            certs.append(Certificate(
                kind="sandwich", name=f"{b.name}:{b.compare}",
                max_violation=viol, grid_scale=h, tolerance=tol_cmp,
                verdict="pass" if viol <= tol_cmp else "fail", note=b.note))
    return certs


def certify_barriers(report: SolveReport,
                     barriers: list[RadialBarrier]) -> list[Certificate]:
    """Discrete sign and sandwich certificates against a converged solve."""
    if not report.converged:
        raise ValueError("certificates require a converged solution")
    return _certify_on_field(report.field.grid, report.field.values, barriers)


@dataclass
class PerronRung:
    R: float
    height_at_outer: float
    gap_to_target: float
    newton_iterations: int

    def to_dict(self) -> dict:
        return {"R": self.R, "height_at_outer": self.height_at_outer,
                "gap_to_target": self.gap_to_target,
                "newton_iterations": self.newton_iterations}


@dataclass
class PerronReport:
    c: float
    cap: float
    r: float
    alpha: float
    rungs: list[PerronRung]
    final: SolveReport
    certificates: list[Certificate]

    @property
    def all_pass(self) -> bool:
        return all(c.verdict == "pass" for c in self.certificates)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "height-prescribed",
            "c": self.c, "height_cap": self.cap, "r": self.r,
            "subsolution_ball_radius": self.alpha,
            "rungs": [r.to_dict() for r in self.rungs],
            "certificates": [c.to_dict() for c in self.certificates],
            "all_pass": self.all_pass,
            "surrogate_note": ("the supremum over subsolutions is replaced "
                               "by truncated Dirichlet solves with outer "
                               "data c plus the barrier sandwich"),
        }


def height_prescribed_solution(c: float, dom: DomainSpec, ladder,
                               cfg: FamilyConfig) -> PerronReport:
    """Truncated solves with outer data c, certified by a barrier sandwich.

    Requires n >= 3 and an origin-centered ball obstacle (the radial path
    is exact for it).  Heights at the outer evaluation ring trend to c as
    the truncation grows; the final solve is certified against the
    shifted-catenoid subsolution from below and the collar barrier (pure
    translation: the catenoid itself) from above.
    """
    if cfg.n < 3:
        raise ValueError("the height-prescribed construction requires n >= 3")
    if c < 0:
        raise ValueError("target height c must be nonnegative")
    if not dom.origin_centered_ball:
        raise NotImplementedError("height-prescribed solves support "
                                  "origin-centered ball obstacles")
    r = dom.require_inner_sphere_radius()
    cap = height_cap(r, cfg.n, cfg.lam, cfg.a)
    if c > cap * (1.0 + 1e-12):
        raise HeightCapError(c, cap)

    ladder = [float(R) for R in ladder]
    rungs: list[PerronRung] = []
    rep = None
    for R in ladder:
        spec = GridSpec("radial", cfg.n, cfg.lam, cfg.a, dom.radius, R,
                        nx=cfg.nx, ny=1, grading=cfg.grading)
        grid = build_grid(spec)
        rep = solve_dirichlet(grid, 0.0, c, cfg.solver)
        if not rep.ok:
            raise RuntimeError(f"truncated solve failed at R={R}: {rep.message}")
        rungs.append(PerronRung(R=R, height_at_outer=rep.height_at_outer,
                                gap_to_target=abs(rep.height_at_outer - c),
                                newton_iterations=rep.newton_iterations))

    h1 = catenoid_height(cfg.n, 1.0)
    alpha = max(dom.varrho, 1.05 * c / h1)
    ps = PerronSubsolution(alpha=alpha, c=c, n=cfg.n)

    def sub_profile(tau):
        return np.array([perron_subsolution(ps, t) for t in np.atleast_1d(tau)])

    barriers = [RadialBarrier(
        name=f"shifted-catenoid-sub(alpha={alpha:.6g})", profile=sub_profile,
        role="subsolution", compare="lower",
        note="kinked max{0, .}: discrete residual is one-sidedly positive")]
    if cfg.lam == 0.0:
        barriers.append(catenoid_barrier(cfg.n, r, role="exact-solution",
                                         compare="upper"))
    else:
        bs = collar_barrier_spec(r, cfg.n, cfg.lam, cfg.a)
        barriers.append(collar_sign_barrier(bs, r))
        barriers.append(RadialBarrier(
            name="capped-collar", profile=capped_collar_profile(bs, r),
            compare="upper",
            note=f"capped at {bs.cap:.6g} beyond d = t0 = {bs.t0:.6g}"))
    certs = certify_barriers(rep, barriers)
    return PerronReport(c=c, cap=cap, r=r, alpha=alpha, rungs=rungs,
                        final=rep, certificates=certs)
