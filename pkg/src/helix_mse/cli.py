"""Command-line surface.

Subcommands: geometry, barriers, solve, family, perron, certify, lift,
export.  Exit codes: 0 on success, 2 on certificate failure / infeasible
or capped requests, 1 on usage or configuration errors.  Every run emits
a manifest: written next to --out (or to --manifest), printed to stderr
for commands without file output.  Flags win over the optional key=value
config file.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from helix_mse import __version__
from helix_mse.ambient import (ambient_catenoid_samples,
                               catenoid_profile_for_lift, lift_and_verify)
from helix_mse.closed_forms import (barrier_constant, collar_barrier_spec,
                                    collar_psi, collar_psi_slope, height_cap,
                                    solve_varsigma)
from helix_mse.domains import DomainSpec, exterior_ball, figure1_circle
from helix_mse.drivers import (FamilyConfig, HeightCapError, certify_barriers,
                               collar_sign_barrier, gradient_constrained_family,
                               height_prescribed_solution)
from helix_mse.exports import (RunManifest, obj_text, read_field_csv,
                               write_field_csv, write_field_obj)
from helix_mse.grids import GridSpec, build_grid
from helix_mse.groups import (GroupSpec, drift_field, g_norm,
                              oneill_curvature_check, quotient_metric,
                              sup_orbit_curvature)
from helix_mse.solver import SolverConfig, solve_dirichlet

__all__ = ["execute_command", "main"]

EXIT_OK, EXIT_USAGE, EXIT_CERT = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _parse_nodes(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) == 1:
        return int(parts[0]), 1
    if len(parts) == 2:
        return int(parts[0]), int(parts[1])
    raise _UsageError(f"bad --nodes '{text}', expected N or NxM")


def _parse_domain(text: str, dim: int) -> DomainSpec:
    if text == "figure1":
        return figure1_circle()
    if text.startswith("ball:rho="):
        return exterior_ball(float(text.split("=", 1)[1]), dim=dim)
    raise _UsageError(f"bad --domain '{text}'; use ball:rho=<r> or figure1")


def _apply_config_defaults(argv: list[str]) -> list[str]:
    """Append key=value entries of a --config file as flags; explicit flags
    win because entries already present on the command line are skipped."""
    if "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    extra: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            if flag not in argv:
                extra += [flag, val.strip()]
    return argv + extra


def _group_args(p: _Parser, n_default: int = 2) -> None:
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="angular rate of the screw motion")
    p.add_argument("--a", type=float, default=1.0, help="translation rate")
    p.add_argument("--n", type=int, default=n_default, help="quotient dimension")


def _common_out(p: _Parser) -> None:
    p.add_argument("--out", default=None, help="output file")
    p.add_argument("--manifest", default=None, help="manifest file")
    p.add_argument("--config", default=None,
                   help="key=value config file (flags win)")


def _build_parser() -> _Parser:
    top = _Parser(prog="helix-mse", description=__doc__)
    top.add_argument("--version", action="version",
                     version=f"helix-mse {__version__}")
    sub = top.add_subparsers(dest="command")

    p = sub.add_parser("geometry", parents=[], help="quotient geometry at a point")
    _group_args(p)
    p.add_argument("--q", default=None, help="comma-separated quotient point")
    _common_out(p)

    p = sub.add_parser("barriers", help="collar barrier constants and table")
    p.add_argument("--r", type=float, required=True)
    _group_args(p, n_default=3)
    p.add_argument("--b", type=float, default=None,
                   help="collar rate (default: the optimal rate)")
    p.add_argument("--table", type=int, default=33, help="psi-table rows")
    _common_out(p)

    p = sub.add_parser("solve", help="Dirichlet solve on a truncated domain")
    p.add_argument("--reduction", choices=("radial", "axisym", "polar2d"),
                   required=True)
    _group_args(p)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--inner", type=float, default=0.0)
    p.add_argument("--outer", type=float, required=True)
    p.add_argument("--nodes", default="256x64")
    p.add_argument("--grading", type=float, default=2.0)
    _common_out(p)

    p = sub.add_parser("family", help="gradient-budget family over a ladder")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--domain", required=True)
    _group_args(p)
    p.add_argument("--ladder", required=True, help="comma-separated radii")
    p.add_argument("--nodes", default="512x96")
    p.add_argument("--bisect-tol", dest="bisect_tol", type=float, default=1e-6)
    _common_out(p)

    p = sub.add_parser("perron", help="height-prescribed solution")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--domain", required=True)
    _group_args(p, n_default=3)
    p.add_argument("--ladder", required=True)
    p.add_argument("--nodes", default="768")
    _common_out(p)

    p = sub.add_parser("certify", help="collar barrier certificates")
    p.add_argument("--r", type=float, required=True)
    _group_args(p, n_default=3)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--nodes", default="512")
    _common_out(p)

    p = sub.add_parser("lift", help="ambient lift verification of a catenoid")
    p.add_argument("--rho", type=float, default=1.0)
    _group_args(p, n_default=3)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-residual", dest="max_residual", type=float,
                   default=1e-4)
    _common_out(p)

    p = sub.add_parser("export", help="re-export a field CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=("csv", "obj"), required=True)
    _common_out(p)
    return top


def _emit_manifest(manifest: RunManifest, args) -> None:
    path = getattr(args, "manifest", None)
    out = getattr(args, "out", None)
    if path is None and out is not None:
        path = str(out) + ".manifest"
    if path is not None:
        manifest.write(path)
    else:
        sys.stderr.write(manifest.text())


def _write_json(payload: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_geometry(args, manifest) -> int:
    gs = GroupSpec(lam=args.lam, a=args.a, n=args.n)
    sup, sig_star = sup_orbit_curvature(gs)
    lines = [f"sup_orbit_curvature = {sup:.17g}",
             f"maximizing_radius = "
             f"{'none' if sig_star is None else f'{sig_star:.17g}'}"]
    if args.q is not None:
        q = np.array([float(t) for t in args.q.split(",")])
        ms = quotient_metric(gs, q)
        eig = np.linalg.eigvalsh(ms.tensor)
        J = drift_field(gs, q)
        lines += [f"metric_eigenvalues = {','.join('%.17g' % e for e in eig)}",
                  f"drift_g_norm = {g_norm(gs, q, J):.17g}"]
        if gs.n == 2:
            X = np.array([1.0, 0.0])
            Y = np.array([0.0, 1.0])
            Y = Y / g_norm(gs, q, Y)
            lines.append(f"sectional_curvature_estimate = "
                         f"{oneill_curvature_check(gs, q, X, Y):.17g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        manifest.record_artifact(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_barriers(args, manifest) -> int:
    C = barrier_constant(args.r, args.n, args.lam, args.a)
    if args.lam == 0.0:
        sys.stdout.write(f"C = {C:.17g}\n")
        L = height_cap(args.r, args.n, args.lam, args.a)
        sys.stdout.write(f"L = {L:.17g}\n")
        sys.stdout.write("varsigma = none (pure translation)\n")
        return EXIT_OK
    bs = collar_barrier_spec(args.r, args.n, args.lam, args.a, b=args.b)
    sys.stdout.write(f"C = {bs.C:.17g}\n")
    sys.stdout.write(f"varsigma = {bs.varsigma:.17g}\n")
    sys.stdout.write(f"t0 = {bs.t0:.17g}\n")
    sys.stdout.write(f"L = {bs.L:.17g}\n")
    rows = ["d,psi,dpsi"]
    for d in np.linspace(0.0, bs.t0, args.table):
        # the slope diverges at d = 0: saturate to the largest float
        slope = min(float(collar_psi_slope(bs.b, d)), sys.float_info.max)
        rows.append(f"{d:.17g},{float(collar_psi(bs.b, d)):.17g},"
                    f"{slope:.17g}")
    table = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(table)
        manifest.record_artifact(args.out)
    else:
        sys.stdout.write(table)
    manifest.params.update(r=args.r, n=args.n, lam=args.lam, a=args.a,
                           b=bs.b)
    return EXIT_OK


def _cmd_solve(args, manifest) -> int:
    nx, ny = _parse_nodes(args.nodes)
    spec = GridSpec(reduction=args.reduction, n=args.n, lam=args.lam,
                    a=args.a, rho=args.rho, R=args.R, nx=nx,
                    ny=max(ny, 1 if args.reduction == "radial" else 4),
                    grading=args.grading)
    grid = build_grid(spec)
    rep = solve_dirichlet(grid, args.inner, args.outer, SolverConfig())
    manifest.params.update(reduction=args.reduction, n=args.n, lam=args.lam,
                           a=args.a, rho=args.rho, R=args.R, nodes=args.nodes,
                           inner=args.inner, outer=args.outer)
    manifest.tolerances.update(tol_abs=SolverConfig().tol_abs,
                               tol_rel=SolverConfig().tol_rel)
    if not rep.ok:
        sys.stderr.write(f"helix-mse solve: {rep.message or 'did not converge'}\n")
        if rep.continuation_last_feasible is not None:
            sys.stderr.write(f"last feasible ramp fraction: "
                             f"{rep.continuation_last_feasible}\n")
        return EXIT_CERT
    if args.out:
        write_field_csv(rep.field, args.out)
        manifest.record_artifact(args.out)
    sys.stdout.write(
        f"converged in {rep.newton_iterations} Newton steps, "
        f"residual {rep.residual_norm:.3e}\n"
        f"sup_gradient = {rep.sup_gradient:.17g} "
        f"(on inner boundary: {rep.sup_gradient_on_inner})\n"
        f"height_at_outer = {rep.height_at_outer:.17g}\n")
    return EXIT_OK


def _cmd_family(args, manifest) -> int:
    dom = _parse_domain(args.domain, dim=2 if args.n == 2 else args.n)
    ladder = [float(t) for t in args.ladder.split(",")]
    nx, ny = _parse_nodes(args.nodes)
    cfg = FamilyConfig(n=args.n, lam=args.lam, a=args.a, nx=nx,
                       ny=max(ny, 4), bisect_tol=args.bisect_tol)
    rep = gradient_constrained_family(args.s, dom, ladder, cfg)
    payload = rep.to_dict()
    if args.out:
        _write_json(payload, args.out)
        manifest.record_artifact(args.out)
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    manifest.params.update(s=args.s, domain=args.domain, ladder=args.ladder,
                           nodes=args.nodes, n=args.n, lam=args.lam, a=args.a)
    manifest.tolerances.update(bisect_tol=args.bisect_tol)
    return EXIT_OK


def _cmd_perron(args, manifest) -> int:
    dom = _parse_domain(args.domain, dim=args.n)
    ladder = [float(t) for t in args.ladder.split(",")]
    nx, _ = _parse_nodes(args.nodes)
    cfg = FamilyConfig(n=args.n, lam=args.lam, a=args.a, nx=nx)
    try:
        rep = height_prescribed_solution(args.c, dom, ladder, cfg)
    except HeightCapError as exc:
        sys.stderr.write(f"helix-mse perron: {exc}\n")
        return EXIT_CERT
    payload = rep.to_dict()
    if args.out:
        _write_json(payload, args.out)
        manifest.record_artifact(args.out)
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    manifest.params.update(c=args.c, domain=args.domain, ladder=args.ladder,
                           n=args.n, lam=args.lam, a=args.a)
    return EXIT_OK if rep.all_pass else EXIT_CERT


def _cmd_certify(args, manifest) -> int:
    if args.lam == 0.0:
        raise _UsageError("certify needs a rotational rate (lambda != 0); "
                          "the pure-translation barrier is the catenoid")
    bs = collar_barrier_spec(args.r, args.n, args.lam, args.a, b=args.b)
    nx, _ = _parse_nodes(args.nodes)
    spec = GridSpec("radial", args.n, args.lam, args.a, args.r,
                    args.r + bs.t0, nx=nx, ny=1, grading=2.0)
    grid = build_grid(spec)
    solve = solve_dirichlet(grid, 0.0, 0.0, SolverConfig())
    certs = certify_barriers(solve, [collar_sign_barrier(bs, args.r)])
    ok = all(c.verdict == "pass" for c in certs)
    for c in certs:
        sys.stdout.write(
            f"{c.kind} {c.name}: max_violation={c.max_violation:.6e} "
            f"tolerance={c.tolerance:.6e} verdict={c.verdict}\n"
            f"  note: {c.note}\n")
    manifest.params.update(r=args.r, n=args.n, lam=args.lam, a=args.a, b=bs.b)
    return EXIT_OK if ok else EXIT_CERT


def _cmd_lift(args, manifest) -> int:
    gs = GroupSpec(lam=args.lam, a=args.a, n=args.n)
    profile = catenoid_profile_for_lift(args.n, args.rho)
    rng = np.random.default_rng(args.seed)
    samples = ambient_catenoid_samples(gs, args.rho, args.samples, rng)
    rep = lift_and_verify(gs, profile, samples, rng=rng)
    payload = rep.to_dict()
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        manifest.record_artifact(args.out)
    else:
        sys.stdout.write(text)
    manifest.params.update(rho=args.rho, n=args.n, lam=args.lam, a=args.a,
                           samples=args.samples, seed=args.seed)
    return EXIT_OK if rep.max_mse_residual <= args.max_residual else EXIT_CERT


def _cmd_export(args, manifest) -> int:
    c1, c2, val, gn = read_field_csv(args.infile)
    ny = 1
    for k in range(1, c1.size):
        if c1[k] != c1[0]:
            ny = k
            break
    else:
        ny = c1.size
    nx = c1.size // ny
    if nx * ny != c1.size:
        raise _UsageError("input CSV is not a structured field export")
    if args.out is None:
        raise _UsageError("--out is required for export")
    if args.format == "obj":
        text = obj_text(c1, c2, val, (nx, ny))
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        with open(args.infile) as src, open(args.out, "w") as dst:
            dst.write(src.read())
    manifest.record_artifact(args.out)
    return EXIT_OK


_DISPATCH = {
    "geometry": _cmd_geometry,
    "barriers": _cmd_barriers,
    "solve": _cmd_solve,
    "family": _cmd_family,
    "perron": _cmd_perron,
    "certify": _cmd_certify,
    "lift": _cmd_lift,
    "export": _cmd_export,
}


def execute_command(argv) -> int:
    argv = list(argv)
    parser = _build_parser()
    if not argv:
        sys.stderr.write(parser.format_usage())
        return EXIT_USAGE
    try:
        args = parser.parse_args(_apply_config_defaults(argv))
        if args.command is None:
            sys.stderr.write(parser.format_usage())
            return EXIT_USAGE
        manifest = RunManifest(argv=["helix-mse"] + argv)
        code = _DISPATCH[args.command](args, manifest)
        _emit_manifest(manifest, args)
        return code
    except _UsageError as exc:
        sys.stderr.write(str(exc) + "\n")
        return EXIT_USAGE
    except (ValueError, OSError, NotImplementedError) as exc:
        sys.stderr.write(f"helix-mse: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(execute_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
