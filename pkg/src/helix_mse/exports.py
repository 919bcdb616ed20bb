"""Field exporters and run manifests.

CSV: header row ``coord1,coord2,value,grad_norm``, comma-separated,
%.17g decimal text (lossless for float64), nodes in radial-major order.
OBJ: ``v x y z`` lines then 1-based ``f i j k`` faces, two triangles per
structured quad (no closure across the periodic seam).  Manifest: a
versioned key-value text document listing the command line, parameters
and a content hash for every emitted file.
"""

from __future__ import annotations

import hashlib
import io
import time
from dataclasses import dataclass, field

import numpy as np

from helix_mse.grids import GridField
from helix_mse.solver import grad_norm_field

__all__ = ["field_csv_text", "write_field_csv", "read_field_csv",
           "obj_text", "write_field_obj", "RunManifest"]

_FMT = "%.17g"


def _g(x: float) -> str:
    return _FMT % (x,)


def field_csv_text(fld: GridField) -> str:
    """CSV of a grid field: coord1, coord2, value, grad_norm."""
    grid = fld.grid
    if fld.values.size == 0:
        raise ValueError("refusing to export an empty field")
    if not np.all(np.isfinite(fld.values)):
        raise ValueError("refusing to export non-finite field values")
    gn = grad_norm_field(grid, fld.values)
    out = io.StringIO()
    out.write("coord1,coord2,value,grad_norm\n")
    for i, xi in enumerate(grid.x):
        for j, yj in enumerate(grid.y):
            out.write(f"{_g(xi)},{_g(yj)},{_g(fld.values[i, j])},"
                      f"{_g(gn[i, j])}\n")
    return out.getvalue()


def write_field_csv(fld: GridField, path) -> str:
    text = field_csv_text(fld)
    with open(path, "w") as fh:
        fh.write(text)
    return text


def read_field_csv(path):
    """Read a field CSV back: (coord1, coord2, value, grad_norm) arrays."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return (np.atleast_1d(data["coord1"]), np.atleast_1d(data["coord2"]),
            np.atleast_1d(data["value"]), np.atleast_1d(data["grad_norm"]))


def obj_text(coord1, coord2, values, shape) -> str:
    """Triangulated OBJ of a structured graph (coord1, coord2, value)."""
    nx, ny = shape
    if nx * ny == 0:
        raise ValueError("refusing to export an empty field")
    if ny < 2 or nx < 2:
        raise ValueError("OBJ export needs a 2-D structured grid")
    out = io.StringIO()
    for k in range(nx * ny):
        out.write(f"v {_g(coord1[k])} {_g(coord2[k])} {_g(values[k])}\n")
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j + 1
            b = a + ny
            out.write(f"f {a} {b} {b + 1}\n")
            out.write(f"f {a} {b + 1} {a + 1}\n")
    return out.getvalue()


def write_field_obj(fld: GridField, path) -> str:
    grid = fld.grid
    if fld.values.size and not np.all(np.isfinite(fld.values)):
        raise ValueError("refusing to export non-finite field values")
    X, Y = np.meshgrid(grid.x, grid.y, indexing="ij")
    text = obj_text(X.ravel(), Y.ravel(), fld.values.ravel(), grid.shape)
    with open(path, "w") as fh:
        fh.write(text)
    return text


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record of one CLI run.

    The wall_time entry is the only volatile field; identical inputs
    reproduce identical artifact hashes.
    """

    argv: list[str]
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)  # path -> sha256
    started: float = field(default_factory=time.monotonic)

    def record_artifact(self, path) -> None:
        self.artifacts[str(path)] = sha256_file(path)

    def text(self) -> str:
        from helix_mse import __version__
        lines = ["manifest_version = 1",
                 f"tool = helix-mse {__version__}",
                 "command = " + " ".join(self.argv)]
        for k in sorted(self.params):
            lines.append(f"param {k} = {self.params[k]}")
        for k in sorted(self.tolerances):
            lines.append(f"tolerance {k} = {self.tolerances[k]}")
        for p in sorted(self.artifacts):
            lines.append(f"artifact {p} sha256 {self.artifacts[p]}")
        lines.append(f"wall_time_s = {time.monotonic() - self.started:.3f}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.text())
