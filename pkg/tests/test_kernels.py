"""Backend equivalence: the compiled core must match the NumPy fallback."""

import importlib.util
import pathlib

import numpy as np
import pytest
import scipy.sparse as sp

from helix_mse import kernels
from helix_mse.domains import figure1_circle
from helix_mse.grids import GridSpec, build_grid

try:
    CY = kernels.load_backend("cy")
    HAVE_CY = True
except ImportError:
    HAVE_CY = False

PY = kernels.load_backend("py")

needs_cy = pytest.mark.skipif(not HAVE_CY,
                              reason="compiled kernel core not built")

CASES = [
    (GridSpec("radial", 3, 1.0, 1.0, 1.0, 8.0, nx=40, ny=1), None),
    (GridSpec("radial", 2, 0.0, 2.0, 1.0, 8.0, nx=40, ny=1), None),
    (GridSpec("axisym", 4, 0.7, -1.3, 1.0, 6.0, nx=24, ny=12), None),
    (GridSpec("axisym", 3, 1.0, 1.0, 1.0, 6.0, nx=20, ny=10), None),
    (GridSpec("polar2d", 2, 1.0, 1.0, 1.0, 6.0, nx=24, ny=16), None),
    (GridSpec("polar2d", 2, 1.0, 1.0, 0.0, 8.0, nx=40, ny=48),
     figure1_circle()),
]


@needs_cy
@pytest.mark.parametrize("spec,dom", CASES)
def test_residual_backends_agree(spec, dom):
    g = build_grid(spec, domain=dom)
    rng = np.random.default_rng(42)
    for _ in range(3):
        v = 0.5 * rng.standard_normal(g.shape)
        r_py = kernels.residual_grid(g, v, mod=PY)
        r_cy = kernels.residual_grid(g, v, mod=CY)
        np.testing.assert_allclose(r_cy, r_py, atol=1e-13, rtol=1e-13)


@needs_cy
@pytest.mark.parametrize("spec,dom", CASES)
def test_jacobian_backends_agree(spec, dom):
    g = build_grid(spec, domain=dom)
    rng = np.random.default_rng(43)
    v = 0.5 * rng.standard_normal(g.shape)
    N = v.size
    mats = []
    for mod in (PY, CY):
        rows, cols, vals = kernels.jacobian_grid(g, v, mod=mod)
        mats.append(sp.csr_matrix((vals, (rows, cols)), shape=(N, N)))
    diff = abs(mats[0] - mats[1])
    assert diff.max() < 1e-12 if diff.nnz else True


@needs_cy
def test_eikonal_backends_agree():
    rng = np.random.default_rng(44)
    nx, ny = 50, 70
    for periodic in (True, False):
        d = np.full((nx, ny), np.inf)
        st = np.zeros((nx, ny), dtype=np.int8)
        seeds = rng.integers(0, nx * ny, 25)
        d.ravel()[seeds] = rng.uniform(0, 0.1, seeds.size)
        st.ravel()[seeds] = 2
        st.ravel()[rng.integers(0, nx * ny, 10)] = -1
        ay = 0.04 * (1.0 + np.linspace(0, 1, nx))
        out_py = kernels.eikonal_polar(d, st, 0.07, ay, periodic, mod=PY)
        out_cy = kernels.eikonal_polar(d, st, 0.07, ay, periodic, mod=CY)
        mask = np.isfinite(out_py)
        np.testing.assert_allclose(out_cy[mask], out_py[mask], atol=1e-13)
        assert np.array_equal(np.isfinite(out_cy), mask)


def test_selected_backend_reported():
    assert kernels.backend_name in ("py", "cy")
    assert kernels.available_backends()[0] == "py"


def test_benchmark_smoke(capsys):
    spec = importlib.util.spec_from_file_location(
        "bench_kernels",
        pathlib.Path(__file__).resolve().parent.parent / "benchmarks"
        / "bench_kernels.py")
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    assert bench.main(["--sizes", "24x12", "--repeats", "1"]) == 0
    out = capsys.readouterr().out
    assert "backend" in out and "py" in out
