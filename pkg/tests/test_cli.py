"""Command-line surface: subcommands, exit codes, manifests, doc parity."""

import json
import os
import pathlib
import re

import numpy as np
import pytest

from helix_mse.cli import execute_command
from helix_mse.exports import sha256_file

README = pathlib.Path(__file__).resolve().parent.parent / "README.md"


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


class TestExitCodes:
    def test_no_arguments_prints_usage(self, capsys):
        assert execute_command([]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert execute_command(["frobnicate"]) == 1

    def test_unknown_flag(self, capsys):
        assert execute_command(["solve", "--badflag", "1"]) == 1

    def test_missing_required_flag(self, capsys):
        assert execute_command(["barriers"]) == 1

    def test_infeasible_solve_exits_two(self, in_tmp, capsys):
        rc = execute_command(
            "solve --reduction radial --lambda 1 --a 1 --n 2 --rho 1 --R 10"
            " --inner 0 --outer 3.5 --nodes 128".split())
        assert rc == 2
        assert "infeasible" in capsys.readouterr().err

    def test_capped_height_exits_two(self, in_tmp, capsys):
        rc = execute_command(
            "perron --c 0.3 --domain ball:rho=1 --lambda 1 --a 1 --n 3"
            " --ladder 15 --nodes 128".split())
        assert rc == 2
        assert "height cap" in capsys.readouterr().err


class TestBarriers:
    def test_example_constants(self, in_tmp, capsys):
        rc = execute_command(
            "barriers --r 2 --n 3 --lambda 1 --a 1".split())
        assert rc == 0
        out = capsys.readouterr().out
        vals = dict(re.findall(r"(\w+) = ([-\d.e+]+)", out))
        assert float(vals["C"]) == pytest.approx(1.5)
        assert float(vals["varsigma"]) == pytest.approx(2.7153, abs=1e-4)
        assert float(vals["L"]) == pytest.approx(0.44183, abs=1e-5)
        assert "d,psi,dpsi" in out

    def test_table_has_saturated_slope_not_inf(self, in_tmp, capsys):
        execute_command("barriers --r 1 --n 3 --lambda 1 --a 1".split())
        out = capsys.readouterr().out
        assert "inf" not in out
        first_row = out.split("d,psi,dpsi\n")[1].splitlines()[0]
        assert float(first_row.split(",")[2]) > 1e300


class TestSolveCommand:
    def test_csv_and_manifest(self, in_tmp, capsys):
        rc = execute_command(
            "solve --reduction radial --lambda 1 --a 1 --n 3 --rho 1 --R 10"
            " --outer 0.5 --nodes 128 --out field.csv".split())
        assert rc == 0
        assert (in_tmp / "field.csv").exists()
        man = (in_tmp / "field.csv.manifest").read_text()
        assert f"sha256 {sha256_file(in_tmp / 'field.csv')}" in man
        assert "manifest_version = 1" in man

    def test_deterministic_outputs(self, in_tmp):
        args = ("solve --reduction polar2d --lambda 1 --a 1 --n 2 --rho 1"
                " --R 5 --outer 0.4 --nodes 48x16 --out {} ").format
        assert execute_command(args("a.csv").split()) == 0
        assert execute_command(args("b.csv").split()) == 0
        assert (in_tmp / "a.csv").read_bytes() == (in_tmp / "b.csv").read_bytes()


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, in_tmp, capsys):
        (in_tmp / "c.cfg").write_text("r = 2.0\nn = 3\n")
        rc = execute_command(
            "barriers --lambda 1 --a 1 --config c.cfg".split())
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("C = 1.5")
        rc = execute_command(
            "barriers --r 1 --lambda 1 --a 1 --config c.cfg".split())
        out = capsys.readouterr().out
        assert out.startswith("C = 2.5")  # explicit --r beats the config


class TestFamilyPerronCli:
    def test_family_report_schema(self, in_tmp):
        rc = execute_command(
            "family --s 1 --domain ball:rho=1 --lambda 1 --a 1 --n 2"
            " --ladder 8,12 --nodes 192 --out rep.json".split())
        assert rc == 0
        rep = json.loads((in_tmp / "rep.json").read_text())
        assert rep["schema_version"] == 1
        assert rep["kind"] == "gradient-budget-family"
        assert len(rep["rungs"]) == 2
        for rung in rep["rungs"]:
            assert rung["boundary_gradient"] == pytest.approx(1.0, abs=1e-4)

    def test_perron_report_and_certificates(self, in_tmp):
        rc = execute_command(
            "perron --c 0.2 --domain ball:rho=1 --lambda 1 --a 1 --n 3"
            " --ladder 15,30 --nodes 256 --out rep.json".split())
        assert rc == 0
        rep = json.loads((in_tmp / "rep.json").read_text())
        assert rep["all_pass"] is True
        assert {c["kind"] for c in rep["certificates"]} == \
            {"sandwich", "subsolution-sign", "supersolution-sign"}


class TestExportCommand:
    def test_csv_to_obj(self, in_tmp):
        assert execute_command(
            "solve --reduction polar2d --lambda 1 --a 1 --n 2 --rho 1 --R 4"
            " --outer 0.3 --nodes 12x10 --out f.csv".split()) == 0
        assert execute_command(
            "export --in f.csv --format obj --out f.obj".split()) == 0
        lines = (in_tmp / "f.obj").read_text().splitlines()
        assert sum(1 for l in lines if l.startswith("v ")) == 120
        assert sum(1 for l in lines if l.startswith("f ")) == 2 * 11 * 9


class TestDocRunParity:
    def test_every_readme_example_runs(self, in_tmp, capsys):
        text = README.read_text()
        cmds = [l[2:].strip() for l in text.splitlines()
                if l.startswith("$ helix-mse")]
        assert len(cmds) >= 8
        for cmd in cmds:
            argv = cmd.split()[1:]
            rc = execute_command(argv)
            capsys.readouterr()
            assert rc == 0, f"README example failed: {cmd}"
