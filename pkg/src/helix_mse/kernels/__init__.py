"""Hot-kernel backend selection.

The flux-form residual, its 9-point Jacobian assembly and the eikonal
march dominate solver runtime.  A compiled Cython core is used when the
extension module built; otherwise the pure NumPy implementation takes
over.  Set HELIX_MSE_BACKEND=py|cy to force a choice (cy raises if the
extension is unavailable).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["backend_name", "load_backend", "available_backends",
           "residual_grid", "jacobian_grid", "eikonal_polar"]


def load_backend(name: str):
    """Return a kernel module by name ('py' or 'cy')."""
    if name == "py":
        from helix_mse.kernels import _kernels_py
        return _kernels_py
    if name == "cy":
        from helix_mse.kernels import _kernels_cy
        return _kernels_cy
    raise ValueError(f"unknown backend '{name}'")


def available_backends() -> list[str]:
    names = ["py"]
    try:
        load_backend("cy")
        names.append("cy")
    except ImportError:
        pass
    return names


_choice = os.environ.get("HELIX_MSE_BACKEND", "auto")
if _choice == "auto":
    try:
        _mod = load_backend("cy")
        backend_name = "cy"
    except ImportError:
        _mod = load_backend("py")
        backend_name = "py"
elif _choice in ("py", "cy"):
    _mod = load_backend(_choice)
    backend_name = _choice
else:
    raise RuntimeError(f"HELIX_MSE_BACKEND must be auto, py or cy, "
                       f"got '{_choice}'")


def _c(arr) -> np.ndarray:
    return np.ascontiguousarray(arr, dtype=np.float64)


def residual_grid(grid, v: np.ndarray, mod=None) -> np.ndarray:
    """Flux-form residual of the reduced operator on a Grid."""
    m = mod or _mod
    return m.residual(_c(v), _c(grid.dxf), _c(grid.dxc), _c(grid.cw),
                      float(grid.dy), int(grid.ybc), int(grid.ilo),
                      _c(grid.Af), _c(grid.Gxf), _c(grid.By), _c(grid.Gyf),
                      _c(grid.Omc), _c(grid.Gc), _c(grid.s1), _c(grid.s2))


def jacobian_grid(grid, v: np.ndarray, mod=None):
    """COO triplets (rows, cols, vals) of the residual Jacobian."""
    m = mod or _mod
    rows, cols, vals = m.jacobian(
        _c(v), _c(grid.dxf), _c(grid.dxc), _c(grid.cw),
        float(grid.dy), int(grid.ybc), int(grid.ilo),
        _c(grid.Af), _c(grid.Gxf), _c(grid.By), _c(grid.Gyf),
        _c(grid.Omc), _c(grid.Gc), _c(grid.s1), _c(grid.s2))
    return np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64), \
        np.asarray(vals, dtype=np.float64)


def eikonal_polar(d: np.ndarray, status: np.ndarray, hs: float,
                  ay: np.ndarray, periodic: bool, mod=None) -> np.ndarray:
    """First-order fast-marching solve; modifies d and status in place."""
    m = mod or _mod
    return m.eikonal_polar(np.array(d, dtype=np.float64, order="C", copy=True),
                           np.array(status, dtype=np.int8, order="C", copy=True),
                           float(hs), _c(ay), int(bool(periodic)))
