import json
from pathlib import Path

import pytest

from fusebench.cli import run_cli

SMALL_SPEC = {
    "seed": 17,
    "correlation": 0.4,
    "classifiers": [
        {"name": "u", "genuine": {"location": 0.65, "spread": 0.1},
         "imposter": {"location": 0.35, "spread": 0.1}},
        {"name": "v", "genuine": {"location": 0.6, "spread": 0.12},
         "imposter": {"location": 0.3, "spread": 0.12}},
    ],
    "train": {"genuine": 60, "imposter": 240},
    "test": {"genuine": 80, "imposter": 320},
}


def write_spec(tmp_path: Path) -> Path:
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(SMALL_SPEC))
    return path


def run_pipeline(tmp_path: Path, extra_eval_args=()):
    spec = write_spec(tmp_path)
    train_csv = tmp_path / "train.csv"
    test_csv = tmp_path / "test.csv"
    model = tmp_path / "model.json"
    assert run_cli([
        "synth", "--spec", str(spec),
        "--out-train", str(train_csv), "--out-test", str(test_csv),
    ]) == 0
    assert run_cli(["train", "--scores", str(train_csv), "--model", str(model)]) == 0
    code = run_cli([
        "eval", "--scores", str(test_csv), "--model", str(model),
        "--strategies", "mdrr,vote,wvote,sum,wsum", *extra_eval_args,
    ])
    return code, train_csv, test_csv, model


class TestPipeline:
    def test_full_pipeline(self, tmp_path, capsys):
        code, *_ = run_pipeline(tmp_path)
        assert code == 0
        out = capsys.readouterr().out
        table = out[out.index("metric"):]
        for row in ("FA number", "FAR", "FR number", "FRR", "HTER"):
            assert row in table
        for column in ("u", "v", "mdrr", "vote", "wvote", "sum", "wsum"):
            assert column in table.splitlines()[0].split()

    def test_report_json_matches_table(self, tmp_path, capsys):
        report_path = tmp_path / "report.json"
        code, *_ = run_pipeline(tmp_path, ("--report", str(report_path)))
        assert code == 0
        out = capsys.readouterr().out
        lines = out[out.index("metric"):].splitlines()
        header = lines[0].split()
        report = json.loads(report_path.read_text())
        by_name = {e["name"]: e for e in report["strategies"]}
        assert header[1:] == [e["name"] for e in report["strategies"]]
        fa_cells = lines[1].split()[2:]
        hter_cells = lines[5].split()[1:]
        for name, fa, hter in zip(header[1:], fa_cells, hter_cells):
            assert int(fa) == by_name[name]["fa"]
            assert hter == by_name[name]["hter_pct"] + "%"

    def test_roc_dir_export(self, tmp_path):
        roc_dir = tmp_path / "roc"
        code, *_ = run_pipeline(tmp_path, ("--roc-dir", str(roc_dir)))
        assert code == 0
        written = sorted(p.name for p in roc_dir.iterdir())
        assert written == ["roc_sum.csv", "roc_u.csv", "roc_v.csv", "roc_wsum.csv"]
        first = (roc_dir / "roc_sum.csv").read_text().splitlines()
        assert first[0] == "threshold,far,frr"

    def test_lambda_flag_changes_mdrr(self, tmp_path, capsys):
        code, train_csv, test_csv, model = run_pipeline(tmp_path)
        capsys.readouterr()
        assert run_cli([
            "eval", "--scores", str(test_csv), "--model", str(model),
            "--strategies", "mdrr", "--lambda", "1000000",
        ]) == 0
        wide = capsys.readouterr().out
        assert run_cli([
            "eval", "--scores", str(test_csv), "--model", str(model),
            "--strategies", "wvote",
        ]) == 0
        wvote = capsys.readouterr().out
        # with an effectively infinite fuzzy zone, mdrr degenerates to wvote
        # over reliability decisions; its column must still render
        assert "mdrr" in wide and "wvote" in wvote


class TestSeedOverride:
    def test_override_changes_output(self, tmp_path):
        spec = write_spec(tmp_path)
        base, other, repeat = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        sink = tmp_path / "sink.csv"
        assert run_cli(["synth", "--spec", str(spec),
                        "--out-train", str(base), "--out-test", str(sink)]) == 0
        assert run_cli(["synth", "--spec", str(spec), "--seed-override", "99",
                        "--out-train", str(other), "--out-test", str(sink)]) == 0
        assert run_cli(["synth", "--spec", str(spec), "--seed-override", "99",
                        "--out-train", str(repeat), "--out-test", str(sink)]) == 0
        assert base.read_bytes() != other.read_bytes()
        assert other.read_bytes() == repeat.read_bytes()


class TestErrors:
    def test_unknown_strategy_is_usage_error(self, tmp_path, capsys):
        code, train_csv, test_csv, model = run_pipeline(tmp_path)
        capsys.readouterr()
        code = run_cli([
            "eval", "--scores", str(test_csv), "--model", str(model),
            "--strategies", "mdrr,bogus",
        ])
        assert code == 1
        err = capsys.readouterr().err
        assert "usage error" in err and "bogus" in err

    def test_missing_file_is_data_error(self, tmp_path, capsys):
        code = run_cli([
            "train", "--scores", str(tmp_path / "absent.csv"),
            "--model", str(tmp_path / "m.json"),
        ])
        assert code == 2

    def test_malformed_csv_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("pattern_id,label,score_a\np1,gen,0.5\n")
        code = run_cli(["train", "--scores", str(bad), "--model", str(tmp_path / "m.json")])
        assert code == 2
        assert "line 2" in capsys.readouterr().err

    def test_single_class_training_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "one_class.csv"
        bad.write_text("pattern_id,label,score_a\np1,genuine,0.5\np2,genuine,0.6\n")
        code = run_cli(["train", "--scores", str(bad), "--model", str(tmp_path / "m.json")])
        assert code == 2
        assert "empty class" in capsys.readouterr().err

    def test_missing_flag_is_usage_error(self, capsys):
        assert run_cli(["train", "--scores", "x.csv"]) == 1

    def test_unknown_command_is_usage_error(self, capsys):
        assert run_cli(["frobnicate"]) == 1


class TestWeightsCommand:
    def test_prints_normalized_weights(self, capsys):
        assert run_cli(["weights", "0.0232", "0.026", "0.0442", "0.067"]) == 0
        out = capsys.readouterr().out.splitlines()
        values = [float(line.split("=")[1]) for line in out]
        assert values[0] > values[1] > values[2] > values[3]
        assert sum(values) == pytest.approx(1.0)

    def test_zero_eer_is_data_error(self, capsys):
        assert run_cli(["weights", "0.0"]) == 2
