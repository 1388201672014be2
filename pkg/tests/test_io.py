import json

import numpy as np
import pytest

from fusebench.core import Label
from fusebench.fusion import train_fusion
from fusebench.io import (
    EmptyFileError,
    EvalConfig,
    MissingHeaderError,
    ParseError,
    load_config,
    load_model,
    load_scores,
    save_model,
    write_scores,
)
from fusebench.reliability import build_model

from conftest import dataset_from_columns


def write(tmp_path, text, name="scores.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


HEADER = "pattern_id,label,score_a1,score_a2\n"


class TestLoadScores:
    def test_happy_path(self, tmp_path):
        path = write(tmp_path, HEADER + "p1,genuine,0.9,0.8\np2,imposter,0.2,0.1\n")
        ds = load_scores(path)
        assert ds.registry.names == ("a1", "a2")
        assert len(ds) == 2
        assert ds.samples[0].scores == (0.9, 0.8)
        assert ds.samples[1].label is Label.IMPOSTER

    def test_bad_label_reports_line(self, tmp_path):
        path = write(tmp_path, HEADER + "p1,genuine,0.9,0.8\np2,gen,0.2,0.1\n")
        with pytest.raises(ParseError) as err:
            load_scores(path)
        assert err.value.line == 3
        assert err.value.column == 2

    def test_nan_score_rejected(self, tmp_path):
        path = write(tmp_path, HEADER + "p1,genuine,NaN,0.8\n")
        with pytest.raises(ParseError) as err:
            load_scores(path)
        assert err.value.line == 2 and err.value.column == 3

    def test_locale_decimal_comma_rejected(self, tmp_path):
        # "0,9" splits into an extra field, which breaks the row arity
        path = write(tmp_path, HEADER + 'p1,genuine,"0,9",0.8\n')
        with pytest.raises(ParseError):
            load_scores(path)

    def test_missing_leading_digit_rejected(self, tmp_path):
        path = write(tmp_path, HEADER + "p1,genuine,.9,0.8\n")
        with pytest.raises(ParseError):
            load_scores(path)

    def test_exponent_notation_accepted(self, tmp_path):
        path = write(tmp_path, HEADER + "p1,genuine,1e-3,2.5E+2\np2,imposter,0.1,0.2\n")
        ds = load_scores(path)
        assert ds.samples[0].scores == (0.001, 250.0)

    def test_wrong_arity_rejected(self, tmp_path):
        path = write(tmp_path, HEADER + "p1,genuine,0.9\n")
        with pytest.raises(ParseError) as err:
            load_scores(path)
        assert err.value.line == 2

    def test_empty_pattern_id_rejected(self, tmp_path):
        path = write(tmp_path, HEADER + ",genuine,0.9,0.8\n")
        with pytest.raises(ParseError):
            load_scores(path)

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyFileError):
            load_scores(write(tmp_path, ""))

    def test_header_required(self, tmp_path):
        with pytest.raises(MissingHeaderError):
            load_scores(write(tmp_path, "id,label,score_a\nx,genuine,1\n"))

    def test_score_column_prefix_required(self, tmp_path):
        with pytest.raises(MissingHeaderError):
            load_scores(write(tmp_path, "pattern_id,label,a1\nx,genuine,1\n"))

    def test_crlf_accepted(self, tmp_path):
        text = HEADER.rstrip("\n") + "\r\np1,genuine,0.9,0.8\r\np2,imposter,0.1,0.2\r\n"
        ds = load_scores(write(tmp_path, text))
        assert len(ds) == 2

    def test_duplicate_ids_load_but_flag_in_validation(self, tmp_path):
        from fusebench.core import validate_dataset

        path = write(tmp_path, HEADER + "p,genuine,0.9,0.8\np,imposter,0.1,0.2\n")
        ds = load_scores(path)
        kinds = [v.kind for v in validate_dataset(ds).violations]
        assert "duplicate pattern_id" in kinds


class TestRoundTrip:
    def test_write_then_load_is_exact(self, tmp_path):
        rng = np.random.default_rng(8)
        gen = [rng.uniform(-3, 3, 25).tolist() for _ in range(3)]
        imp = [rng.uniform(-3, 3, 40).tolist() for _ in range(3)]
        ds = dataset_from_columns(gen, imp, names=("m1", "m2", "m3"))
        path = tmp_path / "ds.csv"
        write_scores(ds, path)
        assert load_scores(path) == ds

    def test_awkward_floats_survive(self, tmp_path):
        ds = dataset_from_columns([[0.1, 1 / 3, 2**-45]], [[1 - 2**-53, 5e-300, 1e22]])
        path = tmp_path / "ds.csv"
        write_scores(ds, path)
        assert load_scores(path) == ds


class TestModelPersistence:
    def test_save_and_load(self, tmp_path):
        rng = np.random.default_rng(21)
        gen = [(0.6 + 0.1 * rng.standard_normal(30)).tolist() for _ in range(2)]
        imp = [(0.4 + 0.1 * rng.standard_normal(60)).tolist() for _ in range(2)]
        train = dataset_from_columns(gen, imp)
        model = build_model(train)
        trained = train_fusion(train)
        path = tmp_path / "model.json"
        save_model(path, model, trained)
        model2, trained2 = load_model(path)
        assert model2.names == model.names
        for i in range(2):
            assert list(model2.genuine_sorted(i)) == list(model.genuine_sorted(i))
            assert list(model2.imposter_sorted(i)) == list(model.imposter_sorted(i))
        assert trained2 == trained

    def test_mangled_training_section_rejected(self, tmp_path):
        from fusebench.core import FusebenchError

        train = dataset_from_columns([[0.6, 0.7], [0.5, 0.8]], [[0.3, 0.4], [0.2, 0.1]])
        path = tmp_path / "model.json"
        save_model(path, build_model(train), train_fusion(train))
        doc = json.loads(path.read_text())
        doc["training"]["weights"] = [1.0]
        path.write_text(json.dumps(doc))
        with pytest.raises(FusebenchError, match="classifier count"):
            load_model(path)

    def test_training_section_required(self, tmp_path):
        from fusebench.reliability import model_to_dict
        from fusebench.core import FusebenchError

        train = dataset_from_columns([[0.6, 0.7]], [[0.3, 0.4]])
        doc = model_to_dict(build_model(train))
        path = tmp_path / "model.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(FusebenchError, match="training"):
            load_model(path)


class TestEvalConfig:
    def test_defaults(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("{}")
        assert load_config(path) == EvalConfig()

    def test_explicit_values(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(
            json.dumps(
                {
                    "strategies": ["mdrr", "sum"],
                    "weights": [0.6, 0.4],
                    "lambda": 3.5,
                    "thresholds": [0.5, 0.45],
                    "sum_threshold": 0.52,
                }
            )
        )
        cfg = load_config(path)
        assert cfg.strategies == ("mdrr", "sum")
        assert cfg.weights == (0.6, 0.4)
        assert cfg.lam == 3.5
        assert cfg.thresholds == (0.5, 0.45)
        assert cfg.sum_threshold == 0.52
        assert cfg.weighted_sum_threshold == "training-eer"
