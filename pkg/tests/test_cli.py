import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from curvspec import cli, io
from curvspec.spectrum import NodalClass, NodalSolution, spectrum_interval


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestSolve:
    def test_writes_profile(self, tmp_path, capsys):
        path = tmp_path / "u.csv"
        code, _, err = run(["solve", "--kappa", 1, "--lambda", 6, "--out", path], capsys)
        assert code == 0
        assert "residual_J" in err
        meta, cols, rows = io.read_table(path)
        assert cols == ("x", "u")
        assert rows.shape == (1025, 2)
        assert meta["kappa"] == 1.0 and meta["lambda"] == 6.0
        assert abs(meta["residual_J"]) < 1e-10
        assert meta["residual_shoot"] < 1e-8
        assert meta["tolerances"]["quad_tol"] == 1e-12

    def test_outside_interval(self, capsys):
        code, out, err = run(["solve", "--kappa", -1, "--lambda", 9], capsys)
        assert code == 2
        assert "no solution: lambda outside spectral interval" in err
        assert out == ""

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip_validates(self, tmp_path, capsys, fmt):
        path = tmp_path / f"sol.{fmt}"
        code, _, _ = run(["solve", "--kappa", -1, "--lambda", 200, "--n", 3,
                          "--nu", "-", "--out", path], capsys)
        assert code == 0
        meta, _, rows = io.read_table(path)
        sol = NodalSolution.from_grid(NodalClass(meta["n"], meta["nu"]), meta["lambda"],
                                      meta["kappa"], rows[:, 0], rows[:, 1], meta["b"])
        assert sol.violations() == []
        assert sol.boundary_slope < 0
        assert len(sol.zeros) == 2

    def test_nu_minus_is_negated(self, tmp_path, capsys):
        run(["solve", "--kappa", 1, "--lambda", 25, "--n", 2, "--out", tmp_path / "p"], capsys)
        run(["solve", "--kappa", 1, "--lambda", 25, "--n", 2, "--nu", "-",
             "--out", tmp_path / "m"], capsys)
        _, _, plus = io.read_table(tmp_path / "p.csv")
        _, _, minus = io.read_table(tmp_path / "m.csv")
        assert np.array_equal(plus[:, 1], -minus[:, 1])

    def test_deterministic(self, tmp_path, capsys):
        for name in ("a.json", "b.json"):
            run(["solve", "--kappa", -1, "--lambda", 30, "--out", tmp_path / name], capsys)
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_stdout_when_no_out(self, capsys):
        code, out, _ = run(["solve", "--kappa", 1, "--lambda", 6, "--format", "json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["columns"] == ["x", "u"] and len(doc["rows"]) == 1025


class TestBranch:
    def test_minkowski_default_grid(self, tmp_path, capsys):
        path = tmp_path / "br.json"
        code, _, _ = run(["branch", "--kappa", -1, "--out", path], capsys)
        assert code == 0
        meta, cols, rows = io.read_table(path)
        assert cols == io.BRANCH_COLUMNS
        assert rows.shape == (45, 6)
        assert np.all(np.diff(rows[:, 1]) > 0)
        assert np.all(np.abs(rows[:, 4]) < 1e-10)
        assert np.all(rows[:, 5] < 1e-8)
        assert meta["skipped"] == 0

    def test_euclidean_n2_inside_interval(self, tmp_path, capsys):
        path = tmp_path / "br.csv"
        code, _, _ = run(["branch", "--kappa", 1, "--n", 2, "--xi-max", 0.4,
                          "--xi-count", 10, "--out", path], capsys)
        assert code == 0
        lo, hi = spectrum_interval(1.0, 2)
        _, _, rows = io.read_table(path)
        assert np.all((rows[:, 1] > lo) & (rows[:, 1] < hi))

    def test_mostly_infeasible(self, capsys):
        code, _, err = run(["branch", "--kappa", 1, "--xi-min", 0.9, "--xi-max", 2.0,
                            "--xi-count", 5], capsys)
        assert code == 1
        assert "branch failed" in err

    def test_thread_count_from_env(self, monkeypatch):
        monkeypatch.setenv("CURVSPEC_THREADS", "3")
        assert cli.threads_from_env() == 3
        monkeypatch.setenv("CURVSPEC_THREADS", "many")
        assert cli.threads_from_env() >= 1


class TestValidate:
    def test_fast_passes(self, tmp_path, capsys):
        t0 = time.perf_counter()
        code, out, err = run(["validate", "--fast", "--out", tmp_path / "v.json"], capsys)
        assert time.perf_counter() - t0 < 30
        assert code == 0
        rep = json.loads(out)
        assert rep["passed"] and len(rep["checks"]) == 13
        assert err.count("PASS") == 13
        assert json.loads((tmp_path / "v.json").read_text()) == rep

    def test_perturbed_b_fails(self, capsys):
        code, out, _ = run(["validate", "--fast", "--perturb-b", "1e-3"], capsys)
        assert code == 3
        assert not json.loads(out)["passed"]


class TestMisc:
    def test_constants(self, capsys):
        code, out, _ = run(["constants"], capsys)
        assert code == 0
        assert "0.59907011736779" in out and "2.87108004418" in out

    def test_interval(self, capsys):
        code, out, _ = run(["interval", "--kappa", -1, "--n", 3], capsys)
        assert code == 0
        assert "88.82643961" in out and "inf" in out

    def test_format_mismatch_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["solve", "--lambda", "6", "--out", str(tmp_path / "a.csv"),
                      "--format", "json"])
        assert info.value.code == 2

    def test_suffix_added(self, tmp_path):
        cfg = cli.RunConfig("solve", output_path=tmp_path / "prof", format="json")
        assert cfg.out_path().name == "prof.json"

    @pytest.mark.parametrize("bad", [dict(quad_tol=0.0), dict(xi_count=1),
                                     dict(format="xml")])
    def test_config_validation(self, bad):
        with pytest.raises(ValueError):
            cli.RunConfig("solve", **bad)

    def test_bad_nu(self):
        with pytest.raises(SystemExit):
            cli.main(["solve", "--lambda", "6", "--nu", "0"])

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "curvspec", "interval",
                               "--kappa", "1"], capture_output=True, text=True)
        assert proc.returncode == 0
        lo, hi = (float(t) for t in proc.stdout.split("(")[-1].rstrip(")\n").split(","))
        assert abs(lo - 2.87108004418) < 1e-9 and abs(hi - math.pi ** 2) < 1e-9
