"""CLI behaviour and exit codes."""

import json

import pytest
from click.testing import CliRunner

from ceapost.cli import main

from test_ingest import write_tiny_csvs


@pytest.fixture()
def runner():
    return CliRunner()


class TestSummaryCommand:
    def test_prints_block(self, runner, tmp_path):
        e, c = write_tiny_csvs(tmp_path)
        result = runner.invoke(main, [
            "summary", "--effects", str(e), "--costs", str(c),
            "--ref", "2", "--kmax", "30", "--grid-points", "7", "--wtp", "20",
        ])
        assert result.exit_code == 0, result.output
        assert "Cost-effectiveness analysis summary" in result.output
        assert "EVPI 1.6667" in result.output

    def test_validation_error_exit_2(self, runner, tmp_path):
        e, c = write_tiny_csvs(tmp_path)
        result = runner.invoke(main, [
            "summary", "--effects", str(e), "--costs", str(c), "--ref", "9",
        ])
        assert result.exit_code == 2
        assert "out of range" in result.output

    def test_missing_file_exit_3(self, runner, tmp_path):
        result = runner.invoke(main, [
            "summary", "--effects", str(tmp_path / "none.csv"),
            "--costs", str(tmp_path / "none2.csv"),
        ])
        assert result.exit_code == 3

    def test_bad_csv_exit_2(self, runner, tmp_path):
        e = tmp_path / "e.csv"
        c = tmp_path / "c.csv"
        e.write_text("1,2\n3,x\n")
        c.write_text("1,2\n3,4\n")
        result = runner.invoke(main, [
            "summary", "--effects", str(e), "--costs", str(c),
        ])
        assert result.exit_code == 2


class TestReportCommand:
    def test_writes_report_and_figures(self, runner, tmp_path):
        e, c = write_tiny_csvs(tmp_path)
        out = tmp_path / "out"
        result = runner.invoke(main, [
            "report", "--effects", str(e), "--costs", str(c),
            "--ref", "2", "--kmax", "30", "--grid-points", "7",
            "--wtp", "20", "--plots", "ceplane,eib", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert (out / "report.md").exists()
        assert (out / "fig_ceplane.svg").exists()
        assert (out / "fig_eib.svg").exists()

    def test_manifest_input_and_archive(self, runner, tmp_path):
        write_tiny_csvs(tmp_path)
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({
            "version": 1,
            "effects": "effects.csv",
            "costs": "costs.csv",
            "ref": 2,
            "kmax": 30.0,
            "grid_points": 7,
        }))
        out = tmp_path / "out"
        archive = tmp_path / "analysis.json"
        result = runner.invoke(main, [
            "report", "--manifest", str(manifest),
            "--wtp", "20", "--out", str(out), "--archive", str(archive),
        ])
        assert result.exit_code == 0, result.output
        assert archive.exists()

    def test_unknown_plot_exit_2(self, runner, tmp_path):
        e, c = write_tiny_csvs(tmp_path)
        result = runner.invoke(main, [
            "report", "--effects", str(e), "--costs", str(c),
            "--ref", "2", "--plots", "nope", "--out", str(tmp_path / "out"),
        ])
        assert result.exit_code == 2
