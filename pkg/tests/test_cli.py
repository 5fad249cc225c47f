import csv

from click.testing import CliRunner

from pfresample.cli import _parse_float_list, _parse_int_list, main


class TestParsers:
    def test_int_list(self):
        assert _parse_int_list("16,64,256") == (16, 64, 256)
        assert _parse_int_list("2^4,2^6") == (16, 64)
        assert _parse_int_list("2^4..2^7") == (16, 32, 64, 128)

    def test_float_list(self):
        assert _parse_float_list("0,0.5,1") == (0.0, 0.5, 1.0)
        assert _parse_float_list("0..2:0.5") == (0.0, 0.5, 1.0, 1.5, 2.0)
        assert _parse_float_list("0..4") == (0.0, 1.0, 2.0, 3.0, 4.0)


class TestBenchCli:
    def test_run_and_aggregate(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "records.csv"
        result = runner.invoke(main, [
            "bench", "run",
            "--algorithms", "systematic,multinomial",
            "--n", "16,32",
            "--y", "0,1",
            "--reps", "2",
            "--seed", "7",
            "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["algorithm", "N", "y", "replicate", "elapsed_ns", "mse", "extras"]
        assert len(rows) - 1 == 2 * 2 * 2 * 2

        agg = tmp_path / "rmse.csv"
        result = runner.invoke(main, ["bench", "aggregate", "--in", str(out), "--out", str(agg)])
        assert result.exit_code == 0, result.output
        with open(agg) as fh:
            arows = list(csv.reader(fh))
        assert arows[0] == ["algorithm", "N", "y", "replicates", "rmse"]
        assert len(arows) - 1 == 2 * 2 * 2
        assert all(float(r[-1]) >= 0 for r in arows[1:])

    def test_run_rejects_unknown_algorithm(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(main, [
            "bench", "run", "--algorithms", "bogus", "--n", "16", "--y", "0",
            "--reps", "1", "--out", str(tmp_path / "x.csv"),
        ])
        assert result.exit_code != 0


class TestPfCli:
    def test_demo_writes_expected_columns(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "demo.csv"
        result = runner.invoke(main, [
            "pf", "demo", "--resampler", "systematic", "--n", "500",
            "--steps", "12", "--seed", "3", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["time", "filtered_mean", "ess", "resampled", "oracle_mean"]
        assert len(rows) - 1 == 12
        for row in rows[1:]:
            assert int(row[0]) >= 1
            float(row[1]), float(row[2]), float(row[4])
            assert row[3] in ("0", "1")

    def test_demo_all_resamplers(self, tmp_path):
        runner = CliRunner()
        for name in ("multinomial", "metropolis", "rejection", "rejection-capped"):
            out = tmp_path / f"{name}.csv"
            result = runner.invoke(main, [
                "pf", "demo", "--resampler", name, "--n", "300",
                "--steps", "6", "--seed", "5", "--out", str(out),
            ])
            assert result.exit_code == 0, (name, result.output)
