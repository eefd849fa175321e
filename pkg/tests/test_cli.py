"""Command line front end: subcommands, outputs, exit codes."""
from __future__ import annotations

import json

import pytest

from multirate_zeros.cli import main
from multirate_zeros.harness import CSV_COLUMNS
from multirate_zeros.model import (Dimensions, fixture, random_generic,
                                   save_system)

from conftest import EXAMPLE1_DIMS, LONG_HORIZON_DIMS


@pytest.fixture()
def example1_file(tmp_path, example1_sys):
    path = tmp_path / "example1.json"
    save_system(example1_sys, path)
    return path


@pytest.fixture()
def grid_file(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text(json.dumps({
        "n": [1], "m": [2], "p1": [1], "N": [2],
        "taus": [1], "trials_per_cell": 2}))
    return path


class TestAnalyze:
    def test_all_delays(self, example1_file, tmp_path):
        out = tmp_path / "report.json"
        code = main(["analyze", "--system", str(example1_file), "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["system"]["class"] == "MixedTall"
        assert payload["system"]["n"] == 1 and payload["system"]["N"] == 2
        assert payload["all_agree"] is True
        assert [r["tau"] for r in payload["results"]] == [1, 2]
        first = payload["results"][0]
        assert first["measured"]["normal_rank"] == 6
        assert first["measured"]["mult_at_zero"] == 1
        assert first["measured"]["rank_D"] == 5
        assert first["predicted"]["normal_rank"] == 6
        assert all(first["agreement"].values())
        assert "timestamp" in payload and "tool_version" in payload

    def test_single_delay(self, example1_file, tmp_path):
        out = tmp_path / "report.json"
        code = main(["analyze", "--system", str(example1_file),
                     "--tau", "2", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert [r["tau"] for r in payload["results"]] == [2]

    def test_delay_out_of_range(self, example1_file, tmp_path, capsys):
        code = main(["analyze", "--system", str(example1_file),
                     "--tau", "9", "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_system_file(self, tmp_path, capsys):
        code = main(["analyze", "--system", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_system_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("not json at all")
        code = main(["analyze", "--system", str(bad),
                     "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_policy_field(self, example1_file, tmp_path, capsys):
        pol = tmp_path / "policy.json"
        pol.write_text(json.dumps({"bogus_knob": 1}))
        code = main(["analyze", "--system", str(example1_file),
                     "--policy", str(pol), "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "policy" in capsys.readouterr().err

    def test_blunt_tolerance_reports_disagreement(self, example1_file, tmp_path):
        # a rank threshold of 0.5 swallows genuine singular values, so the
        # measured ranks drop below the generic predictions and the exit
        # code reports the mismatch rather than hiding it
        pol = tmp_path / "policy.json"
        pol.write_text(json.dumps({"rel_rank_tol": 0.5}))
        out = tmp_path / "report.json"
        code = main(["analyze", "--system", str(example1_file),
                     "--policy", str(pol), "--out", str(out)])
        assert code == 1
        payload = json.loads(out.read_text())
        assert payload["all_agree"] is False

    def test_not_tall_system_measures_without_predictions(self, tmp_path):
        sys_path = tmp_path / "square.json"
        save_system(random_generic(Dimensions(1, 2, 1, 2, 2), seed=0), sys_path)
        out = tmp_path / "report.json"
        code = main(["analyze", "--system", str(sys_path), "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["system"]["class"] == "NotTall"
        for result in payload["results"]:
            assert result["predicted"] is None
            assert result["agreement"] is None
            assert result["measured"]["normal_rank"] >= 0

    def test_unwritable_output(self, example1_file, tmp_path, capsys):
        code = main(["analyze", "--system", str(example1_file),
                     "--out", str(tmp_path / "missing" / "r.json")])
        assert code == 2
        assert "cannot write" in capsys.readouterr().err

    def test_non_integer_tau_is_usage_error(self, example1_file, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["analyze", "--system", str(example1_file),
                  "--tau", "first", "--out", str(tmp_path / "r.json")])
        assert exc.value.code == 2
        assert "tau" in capsys.readouterr().err


class TestVerify:
    def test_json_output(self, grid_file, tmp_path):
        out = tmp_path / "report.json"
        code = main(["verify", "--grid", str(grid_file), "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["suite"] == "grid"
        assert payload["total_trials"] == 2
        assert payload["all_agree"] is True

    def test_csv_output_and_seed_override(self, grid_file, tmp_path):
        out = tmp_path / "report.csv"
        code = main(["verify", "--grid", str(grid_file),
                     "--seeds", "3", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + 3

    def test_nonpositive_seed_override(self, grid_file, tmp_path, capsys):
        code = main(["verify", "--grid", str(grid_file),
                     "--seeds", "0", "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "--seeds" in capsys.readouterr().err

    def test_bad_grid_field(self, tmp_path, capsys):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"n": [1], "m": [1], "N": [2], "rows": [1]}))
        code = main(["verify", "--grid", str(grid), "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "rows" in capsys.readouterr().err

    def test_missing_grid_file(self, tmp_path, capsys):
        code = main(["verify", "--grid", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "r.json")])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestFixtures:
    def test_runs_green(self, tmp_path):
        out = tmp_path / "fixtures.json"
        code = main(["fixtures", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["suite"] == "fixtures"
        assert payload["all_agree"] is True
        assert payload["total_trials"] > 0


class TestTable:
    def test_extreme_delay_pattern(self, tmp_path):
        out = tmp_path / "table.txt"
        dims = LONG_HORIZON_DIMS
        code = main(["table", "--dims",
                     f"{dims.n},{dims.m},{dims.p1},{dims.p2},{dims.N}",
                     "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert "MixedTall" in text
        lines = text.splitlines()
        rows = lines[-dims.N:]
        assert [row.split()[0] for row in rows] == [str(t) for t in range(1, 9)]
        assert "Yes (5)" in rows[0]      # five zeros at the origin at tau=1
        assert "Yes (5)" in rows[-1]     # five zeros at infinity at tau=8
        assert rows[3].split()[2:] == ["No", "No", "No"]  # tau=4 is zero free

    def test_not_tall_dims_rejected(self, tmp_path, capsys):
        code = main(["table", "--dims", "1,2,1,2,2",
                     "--out", str(tmp_path / "t.txt")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_dims_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["table", "--dims", "1,2,3", "--out", str(tmp_path / "t.txt")])
        assert exc.value.code == 2
        assert "dims" in capsys.readouterr().err

    def test_nonpositive_dims_is_usage_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["table", "--dims", "0,1,1,1,2", "--out", str(tmp_path / "t.txt")])
        assert exc.value.code == 2


class TestParser:
    def test_no_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        capsys.readouterr()
