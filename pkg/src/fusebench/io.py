"""Score-file ingestion and model/config/report persistence.

Score files are plain CSV with header ``pattern_id,label,score_<name>,...``;
the header defines the classifier registry and its order. Labels must be
exactly ``genuine`` or ``imposter``. Scores must be finite decimals with a
leading digit (optionally signed, optionally with an exponent); locale
separators and NaN/infinity spellings are rejected. Files are UTF-8 with
LF or CRLF line endings.

Floats are rendered with their shortest round-tripping repr, so a write
followed by a load reproduces every 64-bit score bit-exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import ClassifierRegistry, Dataset, FusebenchError, Label, ScoreSample
from .fusion import TrainedFusion, trained_from_dict, trained_to_dict
from .metrics import EvaluationReport, RocPoint, report_to_dict, roc_csv
from .reliability import ReliabilityModel, model_from_dict, model_to_dict

SCORE_COLUMN_PREFIX = "score_"
LABEL_NAMES = {"genuine": Label.GENUINE, "imposter": Label.IMPOSTER}

_SCORE_RE = re.compile(r"^-?\d+(\.\d+)?([eE][+-]?\d+)?$")


class ParseError(FusebenchError):
    def __init__(self, line: int, column: int, reason: str) -> None:
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason


class MissingHeaderError(FusebenchError):
    pass


class EmptyFileError(FusebenchError):
    pass


def _parse_header(header: str) -> ClassifierRegistry:
    fields = header.split(",")
    if len(fields) < 3 or fields[0] != "pattern_id" or fields[1] != "label":
        raise MissingHeaderError(
            "header must be 'pattern_id,label' followed by score_<name> columns"
        )
    names = []
    for field in fields[2:]:
        if not field.startswith(SCORE_COLUMN_PREFIX) or field == SCORE_COLUMN_PREFIX:
            raise MissingHeaderError(f"malformed score column {field!r}")
        names.append(field[len(SCORE_COLUMN_PREFIX):])
    try:
        return ClassifierRegistry(tuple(names))
    except ValueError as exc:
        raise MissingHeaderError(str(exc)) from exc


def load_scores(path: str | Path) -> Dataset:
    """Read a score CSV into a Dataset.

    Parse problems raise :class:`ParseError` with 1-based line and column
    numbers. Duplicate pattern ids do not fail here; they are surfaced by
    dataset validation as a data-quality finding.
    """
    text = Path(path).read_text(encoding="utf-8-sig")
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EmptyFileError(f"{path}: empty score file")
    registry = _parse_header(lines[0])
    samples = []
    arity = 2 + registry.n
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        fields = line.split(",")
        if len(fields) != arity:
            raise ParseError(lineno, len(fields), f"expected {arity} fields, got {len(fields)}")
        pattern_id = fields[0]
        if not pattern_id:
            raise ParseError(lineno, 1, "empty pattern_id")
        if fields[1] not in LABEL_NAMES:
            raise ParseError(lineno, 2, f"label must be 'genuine' or 'imposter', got {fields[1]!r}")
        label = LABEL_NAMES[fields[1]]
        scores = []
        for j, field in enumerate(fields[2:], start=3):
            if not _SCORE_RE.match(field):
                raise ParseError(lineno, j, f"not a finite decimal score: {field!r}")
            scores.append(float(field))
        samples.append(ScoreSample(pattern_id, label, tuple(scores)))
    return Dataset.from_samples(registry, samples)


def write_scores(dataset: Dataset, path: str | Path) -> None:
    lines = [
        "pattern_id,label,"
        + ",".join(SCORE_COLUMN_PREFIX + name for name in dataset.registry.names)
    ]
    for sample in dataset.samples:
        label = "genuine" if sample.label == Label.GENUINE else "imposter"
        scores = ",".join(repr(float(s)) for s in sample.scores)
        lines.append(f"{sample.pattern_id},{label},{scores}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# -- model persistence ---------------------------------------------------------

def save_model(path: str | Path, model: ReliabilityModel, trained: TrainedFusion) -> None:
    doc = model_to_dict(model)
    doc["training"] = trained_to_dict(trained)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> tuple[ReliabilityModel, TrainedFusion]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FusebenchError(f"{path}: not valid JSON: {exc}") from exc
    model = model_from_dict(doc)
    if "training" not in doc:
        raise FusebenchError(f"{path}: model file lacks the training section")
    trained = trained_from_dict(doc["training"])
    if trained.names != model.names:
        raise FusebenchError(f"{path}: training section classifiers do not match model")
    return model, trained


# -- evaluation config ---------------------------------------------------------

TRAINING_EER_POLICY = "training-eer"


@dataclass(frozen=True)
class EvalConfig:
    """Parsed evaluation config: strategy list plus threshold/weight policies.

    ``weights`` is either the literal policy string ``"auto"`` or an explicit
    list; threshold entries are either ``"training-eer"`` or explicit values.
    """

    strategies: tuple[str, ...] = ("mdrr", "vote", "wvote", "sum", "wsum")
    weights: str | tuple[float, ...] = "auto"
    lam: float = 2.0
    thresholds: str | tuple[float, ...] = TRAINING_EER_POLICY
    sum_threshold: str | float = TRAINING_EER_POLICY
    weighted_sum_threshold: str | float = TRAINING_EER_POLICY


def load_config(path: str | Path) -> EvalConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FusebenchError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FusebenchError(f"{path}: config must be a JSON object")
    cfg = EvalConfig()
    strategies = doc.get("strategies", list(cfg.strategies))
    weights = doc.get("weights", cfg.weights)
    if weights != "auto":
        weights = tuple(float(w) for w in weights)
    thresholds = doc.get("thresholds", cfg.thresholds)
    if thresholds != TRAINING_EER_POLICY:
        thresholds = tuple(float(t) for t in thresholds)

    def threshold_policy(key: str, default):
        value = doc.get(key, default)
        return value if value == TRAINING_EER_POLICY else float(value)

    return EvalConfig(
        strategies=tuple(strategies),
        weights=weights,
        lam=float(doc.get("lambda", cfg.lam)),
        thresholds=thresholds,
        sum_threshold=threshold_policy("sum_threshold", cfg.sum_threshold),
        weighted_sum_threshold=threshold_policy(
            "weighted_sum_threshold", cfg.weighted_sum_threshold
        ),
    )


# -- report / ROC export -------------------------------------------------------

def write_report(path: str | Path, report: EvaluationReport) -> None:
    Path(path).write_text(
        json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8"
    )


def write_roc(path: str | Path, roc: Sequence[RocPoint]) -> None:
    Path(path).write_text(roc_csv(roc), encoding="utf-8")
