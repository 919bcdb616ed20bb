"""Benchmark the compiled kernel core against the pure NumPy fallback.

Times the flux-form residual, the 9-point Jacobian assembly and the
eikonal march on representative grids, for every available backend.

    python3 benchmarks/bench_kernels.py [--sizes 128x64,256x128] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from helix_mse import kernels
from helix_mse.grids import GridSpec, build_grid


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(sizes: list[tuple[int, int]], repeats: int) -> list[dict]:
    rng = np.random.default_rng(7)
    rows = []
    backends = kernels.available_backends()
    for nx, ny in sizes:
        grid = build_grid(GridSpec("axisym", 3, 1.0, 1.0, 1.0, 20.0,
                                   nx=nx, ny=ny))
        v = 0.1 * rng.standard_normal(grid.shape)
        d0 = np.full((nx, ny), np.inf)
        st = np.zeros((nx, ny), dtype=np.int8)
        d0[0, :] = 0.0
        st[0, :] = 2
        ay = 0.05 * (1.0 + np.linspace(0.0, 1.0, nx))
        for name in backends:
            mod = kernels.load_backend(name)
            rows.append({
                "size": f"{nx}x{ny}", "backend": name,
                "residual_ms": 1e3 * _time(
                    lambda: kernels.residual_grid(grid, v, mod=mod), repeats),
                "jacobian_ms": 1e3 * _time(
                    lambda: kernels.jacobian_grid(grid, v, mod=mod), repeats),
                "eikonal_ms": 1e3 * _time(
                    lambda: kernels.eikonal_polar(d0, st, 0.05, ay, True,
                                                  mod=mod), repeats),
            })
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="128x64,256x128,512x256")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)
    sizes = []
    for tok in args.sizes.split(","):
        nx, ny = tok.lower().split("x")
        sizes.append((int(nx), int(ny)))
    rows = run(sizes, args.repeats)
    hdr = f"{'size':>10} {'backend':>8} {'residual':>12} {'jacobian':>12} {'eikonal':>12}"
    print(hdr)
    print("-" * len(hdr))
    for r in rows:
        print(f"{r['size']:>10} {r['backend']:>8} "
              f"{r['residual_ms']:>10.2f}ms {r['jacobian_ms']:>10.2f}ms "
              f"{r['eikonal_ms']:>10.2f}ms")
    by_size: dict = {}
    for r in rows:
        by_size.setdefault(r["size"], {})[r["backend"]] = r
    for size, d in by_size.items():
        if {"py", "cy"} <= set(d):
            for key in ("residual_ms", "jacobian_ms", "eikonal_ms"):
                sp = d["py"][key] / max(d["cy"][key], 1e-9)
                print(f"{size} {key[:-3]}: cy is {sp:.1f}x faster")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
