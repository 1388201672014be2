"""Decision-level fusion of binary verification classifiers.

Builds empirical decision-reliability models from labeled training scores,
fuses any number of classifiers with reliability-ratio, voting, or
normalized-sum strategies, and evaluates everything with a FAR/FRR/EER/HTER
harness. A seeded synthetic benchmark generator makes the whole pipeline
reproducible without proprietary data.
"""

from .core import (
    ClassifierRegistry,
    Dataset,
    FusebenchError,
    Label,
    ScoreSample,
    ValidationResult,
    Violation,
    validate_dataset,
)
from .fusion import (
    ConfigError,
    DegenerateRangeError,
    FusedDecision,
    FusionConfig,
    Strategy,
    TrainedFusion,
    ZeroEerError,
    compute_gap,
    compute_weights,
    config_for,
    decide_sample,
    evaluate_individuals,
    evaluate_strategy,
    fuse_mdrr,
    fuse_sum,
    fuse_voting,
    fuse_weighted_voting,
    normalize_minmax,
    train_fusion,
)
from .io import load_model, load_scores, save_model, write_scores
from .metrics import (
    ConfusionCounts,
    DegenerateCountsError,
    EerPoint,
    EmptyInputError,
    EvaluationReport,
    InvalidRocError,
    RocPoint,
    StrategyReport,
    confusion,
    eer,
    eer_point,
    rates,
    roc_sweep,
)
from .reliability import (
    EmptyClassError,
    ReliabilityModel,
    ReliabilityPair,
    build_model,
    decide_single,
    reliability_genuine,
    reliability_imposter,
    reliability_ratio,
)
from .synth import InvalidSpecError, ScoreDistribution, SynthSpec, generate, sb1_spec

__all__ = [
    "ClassifierRegistry",
    "ConfigError",
    "ConfusionCounts",
    "Dataset",
    "DegenerateCountsError",
    "DegenerateRangeError",
    "EerPoint",
    "EmptyClassError",
    "EmptyInputError",
    "EvaluationReport",
    "FusebenchError",
    "FusedDecision",
    "FusionConfig",
    "InvalidRocError",
    "InvalidSpecError",
    "Label",
    "ReliabilityModel",
    "ReliabilityPair",
    "RocPoint",
    "ScoreDistribution",
    "ScoreSample",
    "Strategy",
    "StrategyReport",
    "SynthSpec",
    "TrainedFusion",
    "ValidationResult",
    "Violation",
    "ZeroEerError",
    "build_model",
    "compute_gap",
    "compute_weights",
    "config_for",
    "confusion",
    "decide_sample",
    "decide_single",
    "eer",
    "eer_point",
    "evaluate_individuals",
    "evaluate_strategy",
    "fuse_mdrr",
    "fuse_sum",
    "fuse_voting",
    "fuse_weighted_voting",
    "generate",
    "load_model",
    "load_scores",
    "normalize_minmax",
    "rates",
    "reliability_genuine",
    "reliability_imposter",
    "reliability_ratio",
    "roc_sweep",
    "save_model",
    "sb1_spec",
    "train_fusion",
    "validate_dataset",
    "write_scores",
]
