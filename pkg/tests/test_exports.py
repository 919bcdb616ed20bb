"""CSV and OBJ exporters, manifests."""

import numpy as np
import pytest

from helix_mse.exports import (RunManifest, field_csv_text, obj_text,
                               read_field_csv, sha256_file, write_field_csv,
                               write_field_obj)
from helix_mse.grids import GridField, GridSpec, build_grid


def small_field(nx=10, ny=10):
    g = build_grid(GridSpec("polar2d", 2, 1.0, 1.0, 1.0, 3.0, nx=nx, ny=ny))
    vals = np.outer(np.linspace(0, 1, nx), np.cos(g.y))
    return GridField(g, vals)


class TestObj:
    def test_ten_by_ten_counts(self):
        body = obj_text(*_flat(small_field(10, 10)))
        lines = body.splitlines()
        assert sum(1 for l in lines if l.startswith("v ")) == 100
        assert sum(1 for l in lines if l.startswith("f ")) == 162  # 2*9*9

    def test_rejects_radial_line(self):
        g = build_grid(GridSpec("radial", 2, 1.0, 1.0, 1.0, 3.0, nx=10))
        fld = GridField(g, np.zeros(g.shape))
        with pytest.raises(ValueError, match="2-D"):
            write_field_obj(fld, "/tmp/should_not_exist.obj")

    def test_file_write(self, tmp_path):
        fld = small_field(6, 8)
        path = tmp_path / "f.obj"
        write_field_obj(fld, path)
        lines = path.read_text().splitlines()
        assert sum(1 for l in lines if l.startswith("v ")) == 48
        assert sum(1 for l in lines if l.startswith("f ")) == 2 * 5 * 7


def _flat(fld):
    g = fld.grid
    X, Y = np.meshgrid(g.x, g.y, indexing="ij")
    return X.ravel(), Y.ravel(), fld.values.ravel(), g.shape


class TestCsv:
    def test_round_trip_bitwise(self, tmp_path):
        fld = small_field()
        path = tmp_path / "f.csv"
        text = write_field_csv(fld, path)
        c1, c2, val, gn = read_field_csv(path)
        g = fld.grid
        X, Y = np.meshgrid(g.x, g.y, indexing="ij")
        assert np.array_equal(c1, X.ravel())
        assert np.array_equal(c2, Y.ravel())
        assert np.array_equal(val, fld.values.ravel())
        # re-export from the parsed values must be byte-identical
        fld2 = GridField(g, val.reshape(g.shape))
        assert field_csv_text(fld2) == text

    def test_header_and_precision(self):
        text = field_csv_text(small_field(6, 6))
        lines = text.splitlines()
        assert lines[0] == "coord1,coord2,value,grad_norm"
        assert len(lines) == 1 + 36

    def test_non_finite_rejected(self):
        fld = small_field(6, 6)
        fld.values[2, 2] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            field_csv_text(fld)


class TestManifest:
    def test_artifact_hash_recorded(self, tmp_path):
        fld = small_field(6, 6)
        out = tmp_path / "f.csv"
        write_field_csv(fld, out)
        man = RunManifest(argv=["helix-mse", "test"])
        man.params["n"] = 2
        man.record_artifact(out)
        text = man.text()
        assert "manifest_version = 1" in text
        assert f"artifact {out} sha256 {sha256_file(out)}" in text
        assert "wall_time_s" in text

    def test_manifest_write(self, tmp_path):
        man = RunManifest(argv=["helix-mse"])
        path = tmp_path / "m.txt"
        man.write(path)
        assert path.read_text().startswith("manifest_version = 1")


def test_empty_field_rejected():
    with pytest.raises(ValueError, match="empty"):
        obj_text(np.array([]), np.array([]), np.array([]), (0, 0))
