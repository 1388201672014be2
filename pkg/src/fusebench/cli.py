"""Command-line driver for the train / fuse / evaluate pipeline.

Subcommands:

* ``synth``   generate train/test score CSVs from a synthesis spec
* ``train``   build a reliability model + operating data from a training CSV
* ``eval``    evaluate strategies on a test CSV against a saved model
* ``weights`` print integration weights for a list of training EERs

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .core import FusebenchError, validate_dataset
from .fusion import (
    ConfigError,
    Strategy,
    compute_weights,
    config_for,
    evaluate_individuals,
    evaluate_strategy,
    parse_strategy,
    train_fusion,
)
from .io import (
    EvalConfig,
    TRAINING_EER_POLICY,
    load_config,
    load_model,
    load_scores,
    save_model,
    write_report,
    write_roc,
    write_scores,
)
from .metrics import (
    EvaluationReport,
    StrategyReport,
    hter_percent_from_counts,
    percent,
    percent_from_counts,
)
from .reliability import build_model
from .synth import generate, spec_from_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="fusebench", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate synthetic score CSVs")
    p_synth.add_argument("--spec", required=True, help="synthesis spec JSON")
    p_synth.add_argument("--out-train", required=True, help="output training CSV")
    p_synth.add_argument("--out-test", required=True, help="output test CSV")
    p_synth.add_argument("--seed-override", type=int, default=None)

    p_train = sub.add_parser("train", help="build and save a model from training scores")
    p_train.add_argument("--scores", required=True, help="training score CSV")
    p_train.add_argument("--model", required=True, help="output model JSON")

    p_eval = sub.add_parser("eval", help="evaluate fusion strategies on test scores")
    p_eval.add_argument("--scores", required=True, help="test score CSV")
    p_eval.add_argument("--model", required=True, help="model JSON from 'train'")
    p_eval.add_argument("--config", default=None, help="evaluation config JSON")
    p_eval.add_argument("--strategies", default=None, help="comma-separated strategy names")
    p_eval.add_argument("--lambda", dest="lam", type=float, default=None)
    p_eval.add_argument("--report", default=None, help="write JSON report here")
    p_eval.add_argument("--roc-dir", default=None, help="write per-column ROC CSVs here")

    p_weights = sub.add_parser("weights", help="integration weights from training EERs")
    p_weights.add_argument("eers", nargs="+", type=float, help="training EERs as rates in (0, 0.5]")

    return parser


def _require_dataset(path: str):
    dataset = load_scores(path)
    result = validate_dataset(dataset)
    if not result.ok:
        first = result.violations[0]
        raise FusebenchError(f"{path}: {first.kind}: {first.message}")
    return dataset


def _cmd_synth(args) -> int:
    doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    if args.seed_override is not None:
        doc["seed"] = args.seed_override
    spec = spec_from_dict(doc)
    train, test = generate(spec)
    write_scores(train, args.out_train)
    write_scores(test, args.out_test)
    print(f"wrote {args.out_train} ({len(train)} samples) "
          f"and {args.out_test} ({len(test)} samples)")
    return EXIT_OK


def _cmd_train(args) -> int:
    train = _require_dataset(args.scores)
    model = build_model(train)
    trained = train_fusion(train)
    save_model(args.model, model, trained)
    print(f"model written to {args.model}")
    for i, name in enumerate(trained.names):
        print(
            f"  {name}: training EER {percent(trained.eers[i])}% "
            f"at threshold {trained.thresholds[i]!r}, weight {trained.weights[i]!r}"
        )
    return EXIT_OK


def _strategy_configs(trained, cfg: EvalConfig, strategies: list[Strategy]):
    weights = None if cfg.weights == "auto" else tuple(cfg.weights)
    thresholds = None if cfg.thresholds == TRAINING_EER_POLICY else tuple(cfg.thresholds)
    configs = {}
    for strategy in strategies:
        explicit = None
        if strategy is Strategy.SUM and cfg.sum_threshold != TRAINING_EER_POLICY:
            explicit = float(cfg.sum_threshold)
        if strategy is Strategy.WEIGHTED_SUM and cfg.weighted_sum_threshold != TRAINING_EER_POLICY:
            explicit = float(cfg.weighted_sum_threshold)
        configs[strategy] = config_for(
            strategy,
            trained,
            lam=cfg.lam,
            weights=weights,
            thresholds=thresholds,
            sum_threshold=explicit,
        )
    return configs


def _report_table(report: EvaluationReport) -> str:
    headers = ["metric"] + [e.name for e in report.entries]
    rows = [
        ("FA number", [str(e.counts.fa) for e in report.entries]),
        ("FAR", [percent_from_counts(e.counts.fa, e.counts.n_imposter) + "%" for e in report.entries]),
        ("FR number", [str(e.counts.fr) for e in report.entries]),
        ("FRR", [percent_from_counts(e.counts.fr, e.counts.n_genuine) + "%" for e in report.entries]),
        ("HTER", [hter_percent_from_counts(e.counts) + "%" for e in report.entries]),
    ]
    widths = [len(h) for h in headers]
    for label, values in rows:
        widths[0] = max(widths[0], len(label))
        for i, v in enumerate(values, start=1):
            widths[i] = max(widths[i], len(v))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()]
    for label, values in rows:
        cells = [label.ljust(widths[0])] + [
            v.rjust(widths[i + 1]) for i, v in enumerate(values)
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def _cmd_eval(args) -> int:
    test = _require_dataset(args.scores)
    model, trained = load_model(args.model)
    cfg = load_config(args.config) if args.config else EvalConfig()
    strategy_names = (
        args.strategies.split(",") if args.strategies is not None else list(cfg.strategies)
    )
    strategies = [parse_strategy(name.strip()) for name in strategy_names]
    if args.lam is not None:
        cfg = dataclasses.replace(cfg, lam=args.lam)
    configs = _strategy_configs(trained, cfg, strategies)

    entries: list[StrategyReport] = list(evaluate_individuals(test, trained))
    for strategy in strategies:
        entries.append(evaluate_strategy(test, model, configs[strategy]))
    report = EvaluationReport(tuple(entries))

    print(_report_table(report))
    if args.report:
        write_report(args.report, report)
    if args.roc_dir:
        roc_dir = Path(args.roc_dir)
        roc_dir.mkdir(parents=True, exist_ok=True)
        for entry in report.entries:
            if entry.roc is not None:
                write_roc(roc_dir / f"roc_{entry.name}.csv", entry.roc)
    return EXIT_OK


def _cmd_weights(args) -> int:
    weights = compute_weights(args.eers)
    for i, w in enumerate(weights, start=1):
        print(f"w{i} = {w!r}")
    return EXIT_OK


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "weights":
            return _cmd_weights(args)
        raise _UsageError(f"unknown command {args.command!r}")
    except (_UsageError, ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FusebenchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
