"""CLI commands: artifacts, exit codes, determinism, config handling."""

import json

import numpy as np
import pytest

from mingraphs import ScalarField2D
from mingraphs.cli import main
from mingraphs.config import build_pair, load_config, parse_map_expr
from mingraphs.errors import ParameterError


def run(*argv) -> int:
    return main(list(argv))


class TestConfig:
    def test_parse_map_expr_power(self):
        amap = parse_map_expr("power-affine offset=1 exponent=1.5")
        assert amap.jet(1.0 + 0j).v == pytest.approx(2.0**1.5)

    def test_parse_map_expr_sum(self):
        amap = parse_map_expr("power-affine offset=1 exponent=2 coeff=0.5 + affine slope=-5")
        assert amap.jet(1.0 + 0j).d1 == pytest.approx(-3.0)  # (zeta+1) - 5 at zeta=1

    def test_parse_map_expr_errors(self):
        with pytest.raises(ParameterError):
            parse_map_expr("mystery kind=1")
        with pytest.raises(ParameterError):
            parse_map_expr("affine slope")

    def test_build_custom_pair(self):
        spec = {
            "kind": "custom",
            "k0": "2",
            "h": "power-affine offset=1 exponent=1.5",
            "g": "power-affine offset=1 exponent=0.5 coeff=-1.3333333333333333",
        }
        pair = build_pair(spec)
        assert pair.k == 1.0
        assert pair.h.jet(0j).d1 == pytest.approx(1.5)

    def test_build_custom_pair_with_anchor(self):
        spec = {
            "kind": "custom",
            "k0": "2",
            "h": "power-affine offset=1 exponent=1.5",
            "g_anchor": "0j:-1.3333333333333333",
        }
        pair = build_pair(spec)
        assert pair.g is None and pair.g_anchor[0] == 0j

    def test_config_file(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(
            "[pair]\nkind = planar\na = 2\nk0 = 2\n\n"
            "[levels]\nvalues = 0, 2\n\n"
            "[tau]\nmin = -5\nmax = 5\nn = 11\n\n"
            "[tolerances]\nscaling = 1e-8\n\n"
            "[output]\ndir = artifacts\nformats = csv, json\n"
        )
        config = load_config(path)
        assert config.pair_spec["kind"] == "planar"
        assert config.levels == (0.0, 2.0)
        assert config.tau_n == 11
        assert config.tolerance("scaling") == 1e-8
        assert config.tolerance("thm1") == 1e-9  # default survives
        assert config.out_dir == "artifacts"

    def test_missing_config_file(self):
        with pytest.raises(ParameterError):
            load_config("/nonexistent/run.ini")


class TestLevelcurvesCommand:
    def test_writes_per_level_files(self, tmp_path, capsys):
        out = tmp_path / "out"
        status = run("levelcurves", "--gamma", "1.5", "--levels", "0,1,2",
                     "--out", str(out), "--format", "csv,json,svg",
                     "--tau=-5,5,41")
        assert status == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "level_0.csv", "level_0.json", "level_1.csv", "level_1.json",
            "level_2.csv", "level_2.json", "levelcurves.svg",
        ]
        header = (out / "level_2.csv").read_text().split("\n", 1)[0]
        assert header == "tau,x,y,x_tau,y_tau,x_tautau,y_tautau,phi,s,kappa,kappa1"

    def test_boundary_level_is_boundary_curve(self, tmp_path):
        out = tmp_path / "out"
        assert run("levelcurves", "--gamma", "1.5", "--levels", "0",
                   "--out", str(out), "--format", "json", "--tau=-2,2,9") == 0
        rows = json.loads((out / "level_0.json").read_text())
        # level 0 passes through f(0) = (-1/3, 0)
        mid = rows[4]
        assert mid["tau"] == 0.0
        assert mid["x"] == pytest.approx(-1.0 / 3.0, rel=1e-12)

    def test_center_row_curvature(self, tmp_path):
        out = tmp_path / "out"
        assert run("levelcurves", "--gamma", "1.5", "--levels", "2",
                   "--out", str(out), "--format", "json", "--tau=-10,10,21") == 0
        rows = json.loads((out / "level_2.json").read_text())
        center = rows[10]
        assert center["kappa"] == pytest.approx(0.09642365197998379, rel=1e-12)

    def test_byte_identical_reruns(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            assert run("levelcurves", "--gamma", "1.3", "--levels", "1,2",
                       "--out", str(out), "--format", "csv,json,svg",
                       "--tau=-4,4,33") == 0
        for name in ("level_1.csv", "level_2.json", "levelcurves.svg"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_failure_removes_partial_outputs(self, tmp_path):
        out = tmp_path / "out"
        # gamma out of range trips during pair construction -> config error
        status = run("levelcurves", "--gamma", "2.5", "--out", str(out))
        assert status != 0
        assert not out.exists() or not list(out.iterdir())


class TestVerifyCommand:
    def test_all_checks_pass_for_family(self, tmp_path, capsys):
        out = tmp_path / "out"
        status = run("verify", "all", "--gamma", "1.5", "--out", str(out),
                     "--grid", "0.5,3,-2,2,0.0625")
        assert status == 0
        stdout = capsys.readouterr().out
        assert stdout.count("PASS") == 8 and "FAIL" not in stdout
        reports = sorted(p.name for p in out.iterdir())
        assert len(reports) == 8
        parsed = json.loads((out / "verify_concavity_propagation.json").read_text())
        assert list(parsed.keys())[0] == "check_name"
        assert parsed["passed"] is True

    def test_planar_thm2_designed_failure(self, tmp_path, capsys):
        config = tmp_path / "planar.ini"
        config.write_text("[pair]\nkind = planar\na = 2\nk0 = 2\n")
        out = tmp_path / "out"
        status = run("verify", "thm2", "--config", str(config), "--out", str(out))
        assert status == 1
        captured = capsys.readouterr()
        assert "FAIL" in captured.out
        assert "concavity_propagation" in captured.err
        parsed = json.loads((out / "verify_concavity_propagation.json").read_text())
        assert parsed["passed"] is False and "planar" in parsed["notes"]

    def test_single_check_scaling(self, tmp_path, capsys):
        out = tmp_path / "out"
        status = run("verify", "scaling", "--gamma", "1.5", "--out", str(out))
        assert status == 0
        parsed = json.loads((out / "verify_scaling_law.json").read_text())
        assert parsed["passed"] is True
        assert parsed["empirical_constant"] <= 1e-10

    def test_report_determinism(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run("verify", "lemma2", "--gamma", "1.7", "--out", str(out)) == 0
            outs.append((out / "verify_log_derivative_bound.json").read_bytes())
        assert outs[0] == outs[1]


class TestSweepCommand:
    def test_three_gammas(self, tmp_path, capsys):
        out = tmp_path / "out"
        status = run("sweep-gamma", "--gammas", "1.1,1.5,1.9", "--out", str(out))
        assert status == 0
        lines = (out / "sweep_gamma.csv").read_text().strip().split("\n")
        assert lines[0].startswith("gamma,A_emp,K_emp,min_kappa,angle_plus,angle_minus")
        assert len(lines) == 4
        row15 = lines[2].split(",")
        assert float(row15[0]) == 1.5
        assert float(row15[4]) == pytest.approx(3 * np.pi / 4, abs=1e-6)
        assert row15[6:9] == ["1", "1", "1"]

    def test_empty_gamma_list(self, tmp_path):
        config = tmp_path / "sweep.ini"
        config.write_text("[sweep]\ngammas =\n")
        out = tmp_path / "out"
        assert run("sweep-gamma", "--config", str(config), "--out", str(out)) == 0
        lines = (out / "sweep_gamma.csv").read_text().strip().split("\n")
        assert len(lines) == 1  # header only

    def test_bad_gamma_recorded_and_nonzero(self, tmp_path):
        out = tmp_path / "out"
        status = run("sweep-gamma", "--gammas", "1.5,2.5", "--out", str(out))
        assert status == 1
        lines = (out / "sweep_gamma.csv").read_text().strip().split("\n")
        assert len(lines) == 3
        assert lines[2].split(",")[-1] != ""  # error column populated


class TestReconstructCommand:
    def test_grid_artifact(self, tmp_path, capsys):
        out = tmp_path / "out"
        status = run("reconstruct", "--gamma", "1.5", "--out", str(out),
                     "--grid", "0.5,1.5,-0.5,0.5,0.125", "--format", "csv")
        assert status == 0
        field = ScalarField2D.from_grid_text((out / "field.grid").read_text())
        assert field.mask.all()
        assert np.all(field.values[field.mask] > 0.0)
        assert (out / "field.csv").read_text().startswith("x,y,u,mask")

    def test_outside_window_nonzero_exit(self, tmp_path, capsys):
        config = tmp_path / "planar.ini"
        config.write_text("[pair]\nkind = planar\na = 2\nk0 = 2\n")
        out = tmp_path / "out"
        status = run("reconstruct", "--config", str(config), "--out", str(out),
                     "--grid=-5,-3,0,1,0.5")
        assert status == 1
        assert "no seed" in capsys.readouterr().err


def test_console_entry_help():
    with pytest.raises(SystemExit) as excinfo:
        run("--help")
    assert excinfo.value.code == 0
