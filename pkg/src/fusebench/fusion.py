"""Decision-level fusion strategies and their training-time calibration.

Five strategies are provided:

* ``mdrr``  - maximum decision-reliability-ratio fusion: pick the class
  achieving the largest weighted reliability ratio across classifiers;
  when the two classes' best ratios are too close (the gap is at or below
  a threshold), fall back to weighted voting over the per-classifier
  reliability decisions.
* ``vote``  - majority voting over per-classifier threshold decisions.
* ``wvote`` - the same votes, weighted by per-classifier trust.
* ``sum``   - mean of min-max normalized scores against a fused threshold.
* ``wsum``  - weighted normalized sum against a fused threshold.

All decision ties resolve to Imposter, uniformly: a false accept is the
costlier verification error.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import Dataset, FusebenchError, Label, require_valid
from .metrics import (
    StrategyReport,
    confusion_from_arrays,
    eer_point,
    roc_sweep,
    strategy_report,
)
from .reliability import ReliabilityModel, ReliabilityPair, ratio_matrix, reliability_ratio

WEIGHT_SUM_TOLERANCE = 1e-9
DEFAULT_GAP_THRESHOLD = 2.0


class ZeroEerError(FusebenchError):
    """A zero training EER makes inverse-EER weights undefined."""


class DegenerateRangeError(FusebenchError):
    """Min-max normalization needs min < max."""


class ConfigError(FusebenchError):
    """A fusion configuration is incomplete or inconsistent."""


class Strategy(str, Enum):
    MDRR = "mdrr"
    VOTING = "vote"
    WEIGHTED_VOTING = "wvote"
    SUM = "sum"
    WEIGHTED_SUM = "wsum"


SCORE_OUTPUT_STRATEGIES = frozenset({Strategy.SUM, Strategy.WEIGHTED_SUM})


def parse_strategy(name: str) -> Strategy:
    try:
        return Strategy(name)
    except ValueError:
        valid = ", ".join(s.value for s in Strategy)
        raise ConfigError(f"unknown strategy {name!r} (valid: {valid})") from None


@dataclass(frozen=True)
class FusionConfig:
    """Everything one strategy needs to decide a sample.

    Unused fields may stay ``None``; :meth:`validate` checks the pieces the
    selected strategy actually requires.
    """

    strategy: Strategy
    weights: tuple[float, ...] | None = None
    lam: float = DEFAULT_GAP_THRESHOLD
    thresholds: tuple[float, ...] | None = None
    sum_threshold: float | None = None
    minmax: tuple[tuple[float, float], ...] | None = None

    def validate(self, n_classifiers: int) -> None:
        s = self.strategy
        if s in (Strategy.MDRR, Strategy.WEIGHTED_VOTING, Strategy.WEIGHTED_SUM):
            if self.weights is None:
                raise ConfigError(f"{s.value} requires weights")
            if len(self.weights) != n_classifiers:
                raise ConfigError(
                    f"{len(self.weights)} weights for {n_classifiers} classifiers"
                )
            if any(w <= 0 for w in self.weights):
                raise ConfigError("weights must be positive")
            if abs(sum(self.weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
                raise ConfigError(f"weights must sum to 1, got {sum(self.weights)!r}")
        if s is Strategy.MDRR and not self.lam > 0:
            raise ConfigError(f"gap threshold must be positive, got {self.lam!r}")
        if s in (Strategy.VOTING, Strategy.WEIGHTED_VOTING):
            if self.thresholds is None or len(self.thresholds) != n_classifiers:
                raise ConfigError(f"{s.value} requires one decision threshold per classifier")
        if s in SCORE_OUTPUT_STRATEGIES:
            if self.minmax is None or len(self.minmax) != n_classifiers:
                raise ConfigError(f"{s.value} requires one (min, max) range per classifier")
            for lo, hi in self.minmax:
                if not lo < hi:
                    raise DegenerateRangeError(f"normalization range ({lo!r}, {hi!r}) has min >= max")
            if self.sum_threshold is None:
                raise ConfigError(f"{s.value} requires a fused-score threshold")


@dataclass(frozen=True)
class FusedDecision:
    """A fused label plus the diagnostics that produced it."""

    label: Label
    rr_pairs: tuple[ReliabilityPair, ...] | None = None
    gap: float | None = None
    fallback_used: bool = False
    fused_score: float | None = None


def compute_weights(training_eers: Sequence[float]) -> list[float]:
    """Normalized inverse-EER integration weights.

    w_i = (1/eer_i) / sum_j (1/eer_j): a classifier that errs half as often
    on the training set carries twice the trust. EERs must lie in (0, 0.5].
    """
    if not training_eers:
        raise ValueError("need at least one EER")
    for e in training_eers:
        if e == 0:
            raise ZeroEerError("zero training EER makes inverse-EER weights undefined")
        if not 0 < e <= 0.5:
            raise ValueError(f"training EER {e!r} outside (0, 0.5]")
    inverses = [1.0 / e for e in training_eers]
    total = sum(inverses)
    return [v / total for v in inverses]


def fuse_voting(decisions: Sequence[Label]) -> Label:
    """Majority vote; ties decide Imposter."""
    genuine = sum(1 for d in decisions if d == Label.GENUINE)
    return Label.GENUINE if genuine > len(decisions) - genuine else Label.IMPOSTER


def fuse_weighted_voting(decisions: Sequence[Label], weights: Sequence[float]) -> Label:
    """Weighted vote; ties decide Imposter.

    Scale-free: multiplying every weight by a positive constant cannot
    change the outcome.
    """
    if len(decisions) != len(weights):
        raise ValueError("decisions and weights must align")
    genuine_total = 0.0
    imposter_total = 0.0
    for decision, weight in zip(decisions, weights):
        if decision == Label.GENUINE:
            genuine_total += weight
        else:
            imposter_total += weight
    return Label.GENUINE if genuine_total > imposter_total else Label.IMPOSTER


def normalize_minmax(score: float, lo: float, hi: float) -> float:
    """(score - lo) / (hi - lo), clamped into [0, 1]."""
    if not lo < hi:
        raise DegenerateRangeError(f"normalization range ({lo!r}, {hi!r}) has min >= max")
    return min(max((score - lo) / (hi - lo), 0.0), 1.0)


def fuse_sum(
    scores: Sequence[float],
    minmax: Sequence[tuple[float, float]],
    threshold: float,
    weights: Sequence[float] | None = None,
) -> tuple[Label, float]:
    """Normalized-sum fusion: (label, fused score).

    Unweighted, the fused score is the mean of the normalized scores;
    weighted, their weighted sum. Genuine iff fused >= threshold.
    """
    if len(scores) != len(minmax):
        raise ValueError("scores and ranges must align")
    total = 0.0
    if weights is None:
        for score, (lo, hi) in zip(scores, minmax):
            total += normalize_minmax(score, lo, hi)
        fused = total / len(scores)
    else:
        if len(weights) != len(scores):
            raise ValueError("scores and weights must align")
        for score, (lo, hi), weight in zip(scores, minmax, weights):
            total += weight * normalize_minmax(score, lo, hi)
        fused = total
    return (Label.GENUINE if fused >= threshold else Label.IMPOSTER), fused


def compute_gap(rr_pairs: Sequence[ReliabilityPair]) -> float:
    """How decisively the classifiers separate the two classes for a sample.

    The ratio of the per-class maxima of the reliability ratios, taken in
    whichever direction is >= 1. Always at least 1; weights do not enter.
    """
    if not rr_pairs:
        raise ValueError("need at least one reliability pair")
    max_genuine = max(p.rr_genuine for p in rr_pairs)
    max_imposter = max(p.rr_imposter for p in rr_pairs)
    return max(max_imposter / max_genuine, max_genuine / max_imposter)


def fuse_mdrr(
    rr_pairs: Sequence[ReliabilityPair],
    single_decisions: Sequence[Label],
    config: FusionConfig,
) -> FusedDecision:
    """Maximum decision-reliability-ratio fusion for one sample.

    Outside the fuzzy zone (gap > lam) the winner is the (classifier, class)
    pair with the largest weighted ratio; inside it, weighted voting over
    the per-classifier decisions takes over.
    """
    if config.weights is None or len(config.weights) != len(rr_pairs):
        raise ConfigError("mdrr requires one weight per classifier")
    gap = compute_gap(rr_pairs)
    if gap > config.lam:
        best_genuine = max(w * p.rr_genuine for w, p in zip(config.weights, rr_pairs))
        best_imposter = max(w * p.rr_imposter for w, p in zip(config.weights, rr_pairs))
        label = Label.GENUINE if best_genuine > best_imposter else Label.IMPOSTER
        fallback = False
    else:
        label = fuse_weighted_voting(single_decisions, config.weights)
        fallback = True
    return FusedDecision(
        label=label, rr_pairs=tuple(rr_pairs), gap=gap, fallback_used=fallback
    )


def decide_sample(
    scores: Sequence[float], model: ReliabilityModel | None, config: FusionConfig
) -> FusedDecision:
    """Apply one strategy to a single sample's score vector."""
    strategy = config.strategy
    if strategy is Strategy.MDRR:
        if model is None:
            raise ConfigError("mdrr requires a reliability model")
        pairs = [reliability_ratio(model, i, s) for i, s in enumerate(scores)]
        singles = [
            Label.GENUINE if p.rr_genuine > p.rr_imposter else Label.IMPOSTER
            for p in pairs
        ]
        return fuse_mdrr(pairs, singles, config)
    if strategy in (Strategy.VOTING, Strategy.WEIGHTED_VOTING):
        if config.thresholds is None:
            raise ConfigError(f"{strategy.value} requires thresholds")
        votes = [
            Label.GENUINE if s >= t else Label.IMPOSTER
            for s, t in zip(scores, config.thresholds)
        ]
        if strategy is Strategy.VOTING:
            return FusedDecision(label=fuse_voting(votes))
        assert config.weights is not None
        return FusedDecision(label=fuse_weighted_voting(votes, config.weights))
    assert strategy in SCORE_OUTPUT_STRATEGIES
    if config.minmax is None or config.sum_threshold is None:
        raise ConfigError(f"{strategy.value} requires minmax ranges and a threshold")
    weights = config.weights if strategy is Strategy.WEIGHTED_SUM else None
    label, fused = fuse_sum(scores, config.minmax, config.sum_threshold, weights)
    return FusedDecision(label=label, fused_score=fused)


# -- training-time calibration ------------------------------------------------

@dataclass(frozen=True)
class TrainedFusion:
    """Operating data derived from a training dataset.

    Per-classifier training EERs and decision thresholds, min-max score
    ranges, inverse-EER weights, and fused-score thresholds for the two
    normalized-sum strategies (equal-weight and auto-weight variants).
    """

    names: tuple[str, ...]
    eers: tuple[float, ...]
    thresholds: tuple[float, ...]
    score_min: tuple[float, ...]
    score_max: tuple[float, ...]
    weights: tuple[float, ...]
    sum_threshold: float
    weighted_sum_threshold: float

    @property
    def minmax(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.score_min, self.score_max))


def _score_matrix(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    matrix = np.array([s.scores for s in dataset.samples], dtype=np.float64)
    truth = np.array([s.label == Label.GENUINE for s in dataset.samples], dtype=bool)
    return matrix, truth


def _normalized_matrix(matrix: np.ndarray, minmax: Sequence[tuple[float, float]]) -> np.ndarray:
    columns = []
    for i, (lo, hi) in enumerate(minmax):
        if not lo < hi:
            raise DegenerateRangeError(f"normalization range ({lo!r}, {hi!r}) has min >= max")
        columns.append(np.clip((matrix[:, i] - lo) / (hi - lo), 0.0, 1.0))
    return np.stack(columns, axis=1)


def _fused_sum_scores(norm: np.ndarray, weights: Sequence[float] | None) -> np.ndarray:
    acc = np.zeros(norm.shape[0], dtype=np.float64)
    if weights is None:
        for i in range(norm.shape[1]):
            acc += norm[:, i]
        return acc / norm.shape[1]
    for i in range(norm.shape[1]):
        acc += weights[i] * norm[:, i]
    return acc


def _sum_threshold(matrix, truth, minmax, weights) -> float:
    fused = _fused_sum_scores(_normalized_matrix(matrix, minmax), weights)
    sweep = roc_sweep(fused[truth], fused[~truth])
    return eer_point(sweep).threshold


def train_fusion(train: Dataset) -> TrainedFusion:
    """Derive every operating quantity the strategies need from training data.

    Decision thresholds sit at each classifier's training-EER operating
    point; fused-score thresholds are the EER points of the normalized sums
    on the training set. Inverse-EER weights clamp zero EERs to half a
    sample's worth of error so that perfectly separable training data still
    yields a usable (equal-weight) configuration.
    """
    require_valid(train)
    matrix, truth = _score_matrix(train)
    names = train.registry.names
    eers: list[float] = []
    thresholds: list[float] = []
    for i in range(train.registry.n):
        point = eer_point(roc_sweep(matrix[truth, i], matrix[~truth, i]))
        if point.rate > 0.5:
            raise FusebenchError(
                f"classifier {names[i]!r} has training EER {point.rate:.2%}; "
                "scores must be similarities (negate distance-type outputs)"
            )
        eers.append(point.rate)
        thresholds.append(point.threshold)
    score_min = tuple(float(matrix[:, i].min()) for i in range(train.registry.n))
    score_max = tuple(float(matrix[:, i].max()) for i in range(train.registry.n))
    minmax = tuple(zip(score_min, score_max))
    floor = 1.0 / (2 * len(train.samples))
    weights = compute_weights([max(e, floor) for e in eers])
    return TrainedFusion(
        names=names,
        eers=tuple(eers),
        thresholds=tuple(thresholds),
        score_min=score_min,
        score_max=score_max,
        weights=tuple(weights),
        sum_threshold=_sum_threshold(matrix, truth, minmax, None),
        weighted_sum_threshold=_sum_threshold(matrix, truth, minmax, weights),
    )


def config_for(
    strategy: Strategy,
    trained: TrainedFusion,
    lam: float = DEFAULT_GAP_THRESHOLD,
    weights: Sequence[float] | None = None,
    thresholds: Sequence[float] | None = None,
    sum_threshold: float | None = None,
) -> FusionConfig:
    """Build a strategy's config from trained operating data plus overrides."""
    custom_weights = weights is not None
    if strategy is Strategy.WEIGHTED_SUM and custom_weights and sum_threshold is None:
        raise ConfigError(
            "wsum with custom weights needs an explicit fused-score threshold; "
            "the trained threshold was calibrated for the auto weights"
        )
    if sum_threshold is None and strategy in SCORE_OUTPUT_STRATEGIES:
        sum_threshold = (
            trained.sum_threshold
            if strategy is Strategy.SUM
            else trained.weighted_sum_threshold
        )
    return FusionConfig(
        strategy=strategy,
        weights=tuple(weights) if weights is not None else trained.weights,
        lam=lam,
        thresholds=tuple(thresholds) if thresholds is not None else trained.thresholds,
        sum_threshold=sum_threshold,
        minmax=trained.minmax,
    )


def trained_to_dict(trained: TrainedFusion) -> dict:
    return {
        "names": list(trained.names),
        "eers": [float(x) for x in trained.eers],
        "thresholds": [float(x) for x in trained.thresholds],
        "score_min": [float(x) for x in trained.score_min],
        "score_max": [float(x) for x in trained.score_max],
        "weights": [float(x) for x in trained.weights],
        "sum_threshold": float(trained.sum_threshold),
        "weighted_sum_threshold": float(trained.weighted_sum_threshold),
    }


def trained_from_dict(doc: dict) -> TrainedFusion:
    trained = TrainedFusion(
        names=tuple(doc["names"]),
        eers=tuple(doc["eers"]),
        thresholds=tuple(doc["thresholds"]),
        score_min=tuple(doc["score_min"]),
        score_max=tuple(doc["score_max"]),
        weights=tuple(doc["weights"]),
        sum_threshold=doc["sum_threshold"],
        weighted_sum_threshold=doc["weighted_sum_threshold"],
    )
    n = len(trained.names)
    for field in ("eers", "thresholds", "score_min", "score_max", "weights"):
        if len(getattr(trained, field)) != n:
            raise FusebenchError(f"training section {field} does not match classifier count")
    return trained


# -- dataset-level evaluation --------------------------------------------------

def _decide_matrix(
    matrix: np.ndarray, model: ReliabilityModel | None, config: FusionConfig
) -> tuple[np.ndarray, np.ndarray | None]:
    """Vectorized decisions for a score matrix: (genuine mask, fused scores).

    Accumulation order mirrors the scalar path in :func:`decide_sample` so
    the two agree bit for bit.
    """
    strategy = config.strategy
    if strategy is Strategy.MDRR:
        if model is None:
            raise ConfigError("mdrr requires a reliability model")
        rr_gen, rr_imp = ratio_matrix(model, matrix)
        weights = np.asarray(config.weights, dtype=np.float64)
        max_gen = rr_gen.max(axis=1)
        max_imp = rr_imp.max(axis=1)
        gap = np.maximum(max_imp / max_gen, max_gen / max_imp)
        direct = (weights * rr_gen).max(axis=1) > (weights * rr_imp).max(axis=1)
        singles = rr_gen > rr_imp
        genuine_total = np.zeros(matrix.shape[0], dtype=np.float64)
        imposter_total = np.zeros(matrix.shape[0], dtype=np.float64)
        for i in range(matrix.shape[1]):
            genuine_total += np.where(singles[:, i], weights[i], 0.0)
            imposter_total += np.where(singles[:, i], 0.0, weights[i])
        fallback = genuine_total > imposter_total
        return np.where(gap > config.lam, direct, fallback), None
    if strategy in (Strategy.VOTING, Strategy.WEIGHTED_VOTING):
        votes = matrix >= np.asarray(config.thresholds, dtype=np.float64)
        if strategy is Strategy.VOTING:
            genuine_votes = votes.sum(axis=1)
            return genuine_votes > matrix.shape[1] - genuine_votes, None
        weights = np.asarray(config.weights, dtype=np.float64)
        genuine_total = np.zeros(matrix.shape[0], dtype=np.float64)
        imposter_total = np.zeros(matrix.shape[0], dtype=np.float64)
        for i in range(matrix.shape[1]):
            genuine_total += np.where(votes[:, i], weights[i], 0.0)
            imposter_total += np.where(votes[:, i], 0.0, weights[i])
        return genuine_total > imposter_total, None
    assert strategy in SCORE_OUTPUT_STRATEGIES
    weights_seq = config.weights if strategy is Strategy.WEIGHTED_SUM else None
    fused = _fused_sum_scores(_normalized_matrix(matrix, config.minmax), weights_seq)
    return fused >= config.sum_threshold, fused


def evaluate_strategy(
    test: Dataset,
    model: ReliabilityModel | None,
    config: FusionConfig,
    name: str | None = None,
) -> StrategyReport:
    """Apply one configured strategy to every test sample.

    Deterministic; decisions are independent per sample, so the confusion
    counts do not depend on processing order. Score-output strategies also
    report the test-set ROC sweep and EER of their fused scores.
    """
    require_valid(test)
    if model is not None and test.registry.names != model.names:
        raise FusebenchError(
            f"test classifiers {test.registry.names} do not match model {model.names}"
        )
    config.validate(test.registry.n)
    matrix, truth = _score_matrix(test)
    predicted, fused = _decide_matrix(matrix, model, config)
    counts = confusion_from_arrays(predicted, truth)
    if fused is not None:
        sweep = roc_sweep(fused[truth], fused[~truth])
        return strategy_report(
            name or config.strategy.value, counts, eer_point(sweep).rate, sweep
        )
    return strategy_report(name or config.strategy.value, counts)


def evaluate_individuals(test: Dataset, trained: TrainedFusion) -> list[StrategyReport]:
    """Evaluate each classifier alone at its training-EER threshold.

    Individual classifiers are score-output, so their test ROC and EER are
    included alongside the fixed-threshold confusion counts.
    """
    require_valid(test)
    if test.registry.names != trained.names:
        raise FusebenchError(
            f"test classifiers {test.registry.names} do not match trained {trained.names}"
        )
    matrix, truth = _score_matrix(test)
    reports = []
    for i, clf_name in enumerate(trained.names):
        predicted = matrix[:, i] >= trained.thresholds[i]
        counts = confusion_from_arrays(predicted, truth)
        sweep = roc_sweep(matrix[truth, i], matrix[~truth, i])
        reports.append(strategy_report(clf_name, counts, eer_point(sweep).rate, sweep))
    return reports
