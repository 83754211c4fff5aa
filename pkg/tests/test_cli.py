import json
import subprocess
import sys

import numpy as np
import pytest

from klpca import cli
from klpca.data import read_csv, write_csv

REPORT_KEYS = {"command", "parameters", "metrics", "artifacts", "seed"}


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = cli.main([*argv, "--out", str(out)])
    report = None
    if (out / "report.json").exists():
        report = json.loads((out / "report.json").read_text())
    return code, report, out


def check_schema(report):
    assert set(report) == REPORT_KEYS
    for v in report["parameters"].values():
        assert isinstance(v, (int, float, str))
    for v in report["metrics"].values():
        assert isinstance(v, float) and np.isfinite(v)
    for a in report["artifacts"]:
        assert isinstance(a, str)


class TestPca:
    def test_rank_one(self, tmp_path):
        code, rep, _ = run(tmp_path, "pca", "--gen", "rank1", "--components", "1")
        assert code == 0
        assert rep["metrics"]["residual_hs2"] < 1e-10
        check_schema(rep)

    def test_full_components(self, tmp_path):
        code, rep, out = run(tmp_path, "pca", "--gen", "random", "--components", "5")
        assert code == 0 and rep["metrics"]["residual_hs2"] < 1e-10
        assert read_csv(out / "scores.csv").shape == (100, 5)
        assert read_csv(out / "reconstruction.csv").shape == (100, 5)

    def test_trace_identity(self, tmp_path):
        _, rep, _ = run(tmp_path, "pca", "--gen", "random", "--dim", "5", "--seed", "3")
        m = rep["metrics"]
        assert m["eigenvalue_sum"] == pytest.approx(m["covariance_trace"], abs=1e-9)

    def test_csv_input(self, tmp_path):
        X = np.random.default_rng(0).standard_normal((20, 3))
        write_csv(tmp_path / "x.csv", X, header=["a", "b", "c"])
        code, rep, out = run(tmp_path, "pca", str(tmp_path / "x.csv"), "--components", "2")
        assert code == 0
        assert read_csv(out / "scores.csv").shape == (20, 2)

    def test_bad_components(self, tmp_path):
        code, rep, _ = run(tmp_path, "pca", "--gen", "random", "--components", "9")
        assert code == 2 and rep is None

    def test_bad_file(self, tmp_path):
        (tmp_path / "bad.csv").write_text("1,2\n3\n")
        assert run(tmp_path, "pca", str(tmp_path / "bad.csv"))[0] == 3
        assert run(tmp_path, "pca", str(tmp_path / "missing.csv"))[0] == 3


class TestKpca:
    def test_shell_ball(self, tmp_path):
        code, rep, out = run(tmp_path, "kpca", "--gen", "shell-ball", "--sigma", "0.05")
        assert code == 0
        assert rep["metrics"]["separability_accuracy"] == 1.0
        assert rep["metrics"]["pca_separability_accuracy"] < 0.95
        M, header = read_csv(out / "embedding.csv", with_header=True)
        assert header == ["pc1", "pc2", "label"] and M.shape == (250, 3)
        check_schema(rep)

    def test_ellipses(self, tmp_path):
        code, rep, _ = run(tmp_path, "kpca", "--gen", "ellipses", "--sigma", "300")
        assert code == 0
        assert abs(rep["metrics"]["pc1_sinusoid_corr"]) > 0.9

    def test_linear_kernel_matches_pca(self, tmp_path):
        X = np.random.default_rng(1).standard_normal((15, 4))
        write_csv(tmp_path / "x.csv", X)
        _, _, out_k = run(tmp_path / "k", "kpca", str(tmp_path / "x.csv"), "--kernel", "linear", "--components", "3")
        _, _, out_p = run(tmp_path / "p", "pca", str(tmp_path / "x.csv"), "--components", "3")
        E = read_csv(out_k / "embedding.csv")
        S = read_csv(out_p / "scores.csv")
        for j in range(3):
            assert abs(np.corrcoef(E[:, j], S[:, j])[0, 1]) == pytest.approx(1.0, abs=1e-6)

    def test_unknown_kernel(self, tmp_path):
        assert run(tmp_path, "kpca", "--gen", "random", "--kernel", "cubic")[0] == 2

    def test_missing_sigma(self, tmp_path):
        assert run(tmp_path, "kpca", "--gen", "random")[0] == 2

    def test_deterministic(self, tmp_path):
        args = ("kpca", "--gen", "shell-ball", "--sigma", "0.05", "--n-shell", "40", "--n-ball", "10", "--seed", "4")
        _, _, a = run(tmp_path / "a", *args)
        _, _, b = run(tmp_path / "b", *args)
        assert (a / "embedding.csv").read_bytes() == (b / "embedding.csv").read_bytes()


class TestKrr:
    def test_single_point(self, tmp_path):
        write_csv(tmp_path / "d.csv", [[0.0, 2.0]])
        code, rep, out = run(tmp_path, "krr", str(tmp_path / "d.csv"), "--beta", "1")
        assert code == 0
        assert read_csv(out / "coefficients.csv")[0, 0] == pytest.approx(1.0, rel=1e-15)

    def test_interpolation(self, tmp_path):
        t = np.linspace(0, 2, 20)
        write_csv(tmp_path / "d.csv", np.column_stack([t, np.cos(2 * t)]))
        code, rep, _ = run(tmp_path, "krr", str(tmp_path / "d.csv"), "--beta", "1e-8", "--sigma", "0.5")
        assert code == 0
        assert rep["metrics"]["max_train_residual"] < 1e-4
        assert rep["metrics"]["objective"] <= rep["metrics"]["objective_at_zero"]

    def test_predictions(self, tmp_path):
        write_csv(tmp_path / "d.csv", [[0.0, 1.0], [1.0, 0.0]])
        write_csv(tmp_path / "p.csv", [[0.0], [0.5], [50.0]])
        code, rep, out = run(tmp_path, "krr", str(tmp_path / "d.csv"), "--beta", "0.1", "--predict", str(tmp_path / "p.csv"))
        assert code == 0
        P = read_csv(out / "predictions.csv")
        assert P.shape == (3, 2) and abs(P[2, 1]) < 1e-12

    @pytest.mark.parametrize("beta", ["0", "-1"])
    def test_bad_beta(self, tmp_path, beta):
        write_csv(tmp_path / "d.csv", [[0.0, 1.0]])
        assert run(tmp_path, "krr", str(tmp_path / "d.csv"), "--beta", beta)[0] == 2


class TestPower:
    def test_worked_example(self, tmp_path, capsys):
        code, rep, _ = run(tmp_path, "power", "--brownian-grid", "1,2,3", "--steps", "2")
        assert code == 0
        m = rep["metrics"]
        assert m["estimate"] == pytest.approx(5.0455, abs=5e-4)
        assert m["oracle"] == pytest.approx(5.0489, abs=5e-4)
        assert "ratio_step_2" in m
        assert "step    2" in capsys.readouterr().out

    def test_identity(self, tmp_path):
        write_csv(tmp_path / "i.csv", np.eye(3))
        code, rep, _ = run(tmp_path, "power", "--matrix", str(tmp_path / "i.csv"), "--steps", "4")
        assert code == 0
        for k in range(1, 5):
            assert rep["metrics"][f"ratio_step_{k}"] == 1.0

    def test_converges(self, tmp_path):
        _, rep, _ = run(tmp_path, "power", "--brownian-grid", "1,2,3", "--steps", "50")
        assert rep["metrics"]["abs_error"] < 1e-9

    def test_needs_one_source(self, tmp_path):
        assert run(tmp_path, "power")[0] == 2


class TestBrownian:
    def test_all_checks(self, tmp_path):
        code, rep, out = run(tmp_path, "brownian", "--grid", "1,2,3", "--paths", "100000", "--seed", "0")
        assert code == 0
        m = rep["metrics"]
        assert m["factorization_residual"] < 1e-12
        assert m["charfn_0_se"] <= 3
        assert m["moment4_0_se"] <= 3
        check_schema(rep)
        assert (out / "mc_checks.csv").exists()

    def test_exact_only(self, tmp_path):
        code, rep, out = run(tmp_path, "brownian", "--checks", "exact")
        assert code == 0 and not (out / "mc_checks.csv").exists()
        assert rep["metrics"]["det_closed_form"] == pytest.approx(1.0)

    def test_bit_identical(self, tmp_path):
        args = ("brownian", "--grid", "0.5,1", "--paths", "2000", "--seed", "9")
        _, _, a = run(tmp_path / "a", *args)
        _, _, b = run(tmp_path / "b", *args)
        for name in ("mc_checks.csv",):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        ra = json.loads((a / "report.json").read_text())
        rb = json.loads((b / "report.json").read_text())
        assert ra["metrics"] == rb["metrics"]

    def test_check_failure_still_reports(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "MC_FAIL_SE", -1.0)
        code, rep, out = run(tmp_path, "brownian", "--paths", "100")
        assert code == 1
        check_schema(rep)
        assert (out / "mc_checks.csv").exists()

    @pytest.mark.parametrize("grid", ["0,1", "2,1", "a,b"])
    def test_bad_grid(self, tmp_path, grid):
        assert run(tmp_path, "brownian", "--grid", grid)[0] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "klpca", "power", "--brownian-grid", "1,2,3", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "5.0455" in proc.stdout


def test_argparse_usage_exit(tmp_path):
    with pytest.raises(SystemExit) as err:
        cli.main(["kpca", "--components", "x"])
    assert err.value.code == 2
