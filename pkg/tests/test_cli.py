"""Tests for the command-line interface and its exit codes."""

import numpy as np
import pytest

from di_decomp import DailySeries
from di_decomp.cli import main
from di_decomp.fixture import EXPECTATIONS_FILE, MARKET_FILE, TRUTH_FILE
from di_decomp.ingestion import MarketDataset, write_market_csv
from di_decomp.pipeline import (
    COMPONENTS_FILE,
    CONTRIBUTIONS_FILE,
    CUMULATIVE_FILE,
    FACTOR_FILE,
    MODELS_FILE,
    REPORT_FILE,
    SVG_FILE,
)


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_fixture")
    rc = main(["fixture", "--seed", "5", "--n", "400", "--out", str(root)])
    assert rc == 0
    return root


def run_args(fixture_dir, out_dir, *extra):
    return [
        "run",
        "--market", str(fixture_dir / MARKET_FILE),
        "--expectations", str(fixture_dir / EXPECTATIONS_FILE),
        "--out", str(out_dir),
        *extra,
    ]


class TestFixtureCommand:
    def test_writes_all_files(self, fixture_dir):
        for name in (MARKET_FILE, EXPECTATIONS_FILE, TRUTH_FILE):
            assert (fixture_dir / name).exists()

    def test_small_n_is_config_error(self, tmp_path, capsys):
        rc = main(["fixture", "--n", "10", "--out", str(tmp_path)])
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestRunCommand:
    def test_full_run_writes_outputs_and_summary(self, fixture_dir, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(run_args(fixture_dir, out))
        assert rc == 0
        for name in (CONTRIBUTIONS_FILE, CUMULATIVE_FILE, MODELS_FILE, REPORT_FILE, SVG_FILE):
            assert (out / name).exists(), name
        stdout = capsys.readouterr().out
        assert "observations" in stdout
        assert "final cumulative change" in stdout
        assert "R-squared" in stdout

    def test_config_file_with_flag_override(self, fixture_dir, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text(
            "[data]\n"
            f"market_csv = {fixture_dir / MARKET_FILE}\n"
            f"expectations_csv = {fixture_dir / EXPECTATIONS_FILE}\n"
            "[output]\n"
            f"dir = {tmp_path / 'ignored'}\n",
            encoding="utf-8",
        )
        out = tmp_path / "real_out"
        rc = main(["run", "--config", str(ini), "--out", str(out)])
        assert rc == 0
        assert (out / REPORT_FILE).exists()
        assert not (tmp_path / "ignored").exists()

    def test_missing_market_is_config_error(self, tmp_path):
        rc = main(["run", "--out", str(tmp_path / "out")])
        assert rc == 2

    def test_bad_date_flag_is_config_error(self, fixture_dir, tmp_path):
        rc = main(run_args(fixture_dir, tmp_path / "out", "--start", "01/13/2015"))
        assert rc == 2

    def test_unparseable_market_is_data_error(self, tmp_path, capsys):
        market = tmp_path / "market.csv"
        market.write_text('date,DI5Y\n2015-01-13,"12,50"\n', encoding="utf-8")
        rc = main(
            [
                "run",
                "--market", str(market),
                "--expectations", str(tmp_path / "missing.csv"),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert rc == 3

    def test_singular_design_is_numerical_error(self, fixture_dir, tmp_path, capsys):
        # rebuild the market file with CRB an exact multiple of DXY
        from di_decomp.ingestion import load_market_csv

        dataset = load_market_csv(fixture_dir / MARKET_FILE)
        dxy = dataset["DXY"]
        clone = DailySeries("CRB", dxy.dates, 2.0 * np.asarray(dxy.values))
        datum = MarketDataset(
            tuple(clone if s.name == "CRB" else s for s in dataset.series)
        )
        market = tmp_path / "market.csv"
        write_market_csv(datum, market)
        rc = main(
            [
                "run",
                "--market", str(market),
                "--expectations", str(fixture_dir / EXPECTATIONS_FILE),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert rc == 4
        assert "rank deficient" in capsys.readouterr().err


class TestStagedCommands:
    def test_build_split_decompose_sequence(self, fixture_dir, tmp_path, capsys):
        out = tmp_path / "staged"
        common = [
            "--market", str(fixture_dir / MARKET_FILE),
            "--out", str(out),
        ]
        rc = main(
            ["build-factors", *common, "--expectations", str(fixture_dir / EXPECTATIONS_FILE)]
        )
        assert rc == 0
        assert (out / FACTOR_FILE).exists()

        rc = main(["split-cds", *common])
        assert rc == 0
        assert (out / COMPONENTS_FILE).exists()

        rc = main(["decompose", *common])
        assert rc == 0
        assert (out / CONTRIBUTIONS_FILE).exists()
        assert "final cumulative change" in capsys.readouterr().out

    def test_decompose_without_stage_files_is_data_error(self, fixture_dir, tmp_path):
        rc = main(
            [
                "decompose",
                "--market", str(fixture_dir / MARKET_FILE),
                "--out", str(tmp_path / "fresh"),
            ]
        )
        assert rc == 3


class TestFetchFocusCommand:
    def test_unknown_indicator_is_config_error(self, tmp_path, capsys):
        rc = main(
            [
                "fetch-focus",
                "--indicators", "IPCA,CPI",
                "--out", str(tmp_path / "out"),
            ]
        )
        assert rc == 2
        assert "CPI" in capsys.readouterr().err
