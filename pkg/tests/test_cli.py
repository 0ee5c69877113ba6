"""
Tests for the zeta-boundary command-line front end.
"""

import json

import pytest

from zeta_boundary import __version__
from zeta_boundary.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, build_parser, main
from zeta_boundary.dirichlet import CoeffSeries
from zeta_boundary.reports import read_coeff_csv, read_table


def _rows(text):
    """Non-comment lines of a CSV output."""
    return [line for line in text.splitlines() if not line.startswith("#")]


@pytest.fixture(autouse=True)
def _env(clean_env):
    return clean_env


class TestParser:
    """Test argument parsing."""

    def test_global_options(self):
        args = build_parser().parse_args(
            ["--format", "json", "--seed", "3", "coeffs", "--limit", "10"]
        )
        assert args.fmt == "json"
        assert args.seed == 3
        assert args.series == "cE"

    def test_missing_command(self):
        with pytest.raises(SystemExit) as exc_info:
            main([])
        assert exc_info.value.code == 2

    def test_missing_required(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["coeffs"])
        assert exc_info.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])
        assert exc_info.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestCoeffs:
    """Test the coeffs command."""

    def test_curve_coefficients(self, capsys):
        assert main(["coeffs", "--limit", "1000"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert rows[0] == "index,value"
        assert rows[1] == "121,1"

    def test_l_series(self, capsys):
        assert main(["coeffs", "--what", "L", "--limit", "20"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert "2,-2" in rows

    def test_json_output(self, capsys):
        assert main(["--format", "json", "coeffs", "--limit", "200"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["metadata"]["command"] == "coeffs"
        assert payload["rows"][0] == {"index": 121, "value": 1.0}

    def test_out_file(self, tmp_path):
        path = tmp_path / "c.csv"
        assert main(["--out", str(path), "coeffs", "--limit", "1000"]) == EXIT_OK
        series = read_coeff_csv(path, limit=1000)
        assert series[121] == 1.0
        assert series.first_nonzero() == 121

    def test_reproducible_files(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["--out", str(first), "--seed", "5", "coeffs", "--what", "omega", "--P", "10",
              "--limit", "100"])
        main(["--out", str(second), "--seed", "5", "coeffs", "--what", "omega", "--P", "10",
              "--limit", "100"])
        assert first.read_bytes() == second.read_bytes()

    def test_config_file(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"curve": "37a"}))
        assert main(["--config", str(path), "coeffs", "--limit", "2000"]) == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert rows[1] == "1369,1"

    def test_flag_overrides_config_file(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"curve": "37a"}))
        assert main(["--config", str(path), "coeffs", "--curve", "11a", "--limit", "200"]) == 0
        assert _rows(capsys.readouterr().out)[1] == "121,1"

    def test_partial_product_needs_cutoff(self):
        assert main(["coeffs", "--what", "dT", "--limit", "100"]) == EXIT_USAGE

    def test_invalid_seed(self):
        assert main(["--seed", "-1", "coeffs", "--limit", "10"]) == EXIT_USAGE

    def test_nonnegativity_failure(self, mocker):
        mocker.patch(
            "zeta_boundary.cli.cE_coeffs", return_value=CoeffSeries([1.0, -1.0], label="bad")
        )
        assert main(["coeffs", "--limit", "2"]) == EXIT_FAILURE


class TestTables:
    """Test ztable, signscan, goldfeld and omega."""

    def test_ztable(self, tmp_path):
        path = tmp_path / "z.json"
        code = main(
            ["--out", str(path), "--format", "json", "ztable", "--x-lo", "0.5", "--x-hi", "1",
             "--points", "5"]
        )
        assert code == EXIT_OK
        meta, frame = read_table(path)
        assert len(frame) == 5
        assert list(frame.columns) == ["x", "value", "bound", "sign"]
        assert meta.command == "ztable"
        assert meta.extra["variant"] == "qE"

    def test_ztable_grid_below_threshold(self):
        code = main(["ztable", "--T", "10", "--x-lo", "0.5", "--x-hi", "1", "--points", "5"])
        assert code == EXIT_USAGE

    def test_signscan_xnu(self, capsys):
        code = main(
            ["signscan", "--series", "xnu", "--x-lo", "0.05", "--x-hi", "10", "--points", "20"]
        )
        assert code == EXIT_OK
        captured = capsys.readouterr()
        assert _rows(captured.out)[0] == "x,value,bound,sign"
        assert "Bracketed sign changes: 1" in captured.err

    def test_rel_tol_reaches_xnu_series(self, capsys):
        code = main(
            ["--rel-tol", "1e-8", "signscan", "--series", "xnu", "--x-lo", "0.5", "--points", "3"]
        )
        assert code == EXIT_OK
        assert "--rel-tol is ignored" not in capsys.readouterr().err

    def test_rel_tol_ignored_elsewhere(self, capsys):
        assert main(["--rel-tol", "1e-8", "coeffs", "--limit", "200"]) == EXIT_OK
        assert "--rel-tol is ignored by coeffs" in capsys.readouterr().err

    def test_goldfeld(self, capsys):
        code = main(["goldfeld", "--t-min", "100", "--t-max", "1000", "--steps", "2"])
        assert code == EXIT_OK
        rows = _rows(capsys.readouterr().out)
        assert rows[0] == "T,L_T,C1,L_T_logT_r"
        assert len(rows) == 3

    def test_omega_empty(self, capsys):
        code = main(
            ["omega", "--samples", "0", "--P", "10", "--x-lo", "0.5", "--x-hi", "1", "--points",
             "5"]
        )
        assert code == EXIT_OK
        assert "num_samples,0" in capsys.readouterr().out


class TestVerify:
    """Test the verify command."""

    def test_list(self, capsys):
        assert main(["verify", "--list"]) == EXIT_OK
        assert "theta-modularity" in capsys.readouterr().out

    def test_unknown_criterion(self):
        assert main(["verify", "--only", "no-such-check"]) == EXIT_USAGE

    def test_passing_criterion(self):
        assert main(["verify", "--only", "theta-modularity,eisenstein-invariance"]) == EXIT_OK

    def test_failing_criterion(self, mocker, capsys):
        mocker.patch("zeta_boundary.verification.bessel_k0", return_value=2.0)
        mocker.patch("zeta_boundary.verification._bessel_oracle", return_value=1.0)
        assert main(["verify", "--only", "bessel-accuracy"]) == EXIT_FAILURE
        assert "bessel-accuracy" in capsys.readouterr().err

    def test_criterion_raising_foreign_error(self, mocker, capsys):
        mocker.patch(
            "zeta_boundary.verification._bessel_oracle", side_effect=ZeroDivisionError("boom")
        )
        assert main(["verify", "--only", "bessel-accuracy"]) == EXIT_FAILURE
        assert "bessel-accuracy" in capsys.readouterr().err
