"""Empirical decision-reliability models built from training scores.

For a test score s and one classifier, the reliability of a *genuine*
decision is the fraction of training genuine scores at or below s; the
reliability of an *imposter* decision is the fraction of training imposter
scores at or above s. Both are empirical rank statistics answered by
binary search over the sorted training arrays.

The decision-reliability *ratio* divides one reliability by the other.
Raw ratios blow up whenever a raw reliability is 0 (scores beyond the
training range), so ratios and decisions use add-one smoothed counts,
(count + 1) / (n + 1), which keeps every ratio finite and positive while
preserving the score ordering. The raw fractions are exposed unsmoothed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Dataset, FusebenchError, Label, require_valid

SMOOTHING_TAG = "add-one"
MODEL_VERSION = "fusebench-model/1"


class EmptyClassError(FusebenchError):
    """Raised when a training class has no samples."""


@dataclass(frozen=True)
class ReliabilityPair:
    """Reliabilities of the two possible decisions for one score.

    ``r_genuine`` / ``r_imposter`` are the raw empirical fractions;
    ``rr_genuine`` / ``rr_imposter`` are the smoothed ratios and are exact
    reciprocals of each other by construction.
    """

    r_genuine: float
    r_imposter: float
    rr_genuine: float
    rr_imposter: float


class ReliabilityModel:
    """Per-classifier sorted training score arrays supporting rank queries.

    Immutable after construction; all queries are read-only and safe for
    concurrent use.
    """

    def __init__(
        self,
        names: Sequence[str],
        genuine: Sequence[Sequence[float]],
        imposter: Sequence[Sequence[float]],
    ) -> None:
        if not (len(names) == len(genuine) == len(imposter)):
            raise ValueError("names and score arrays must align")
        self.names = tuple(names)
        self._genuine: list[np.ndarray] = []
        self._imposter: list[np.ndarray] = []
        for gen, imp in zip(genuine, imposter):
            if len(gen) == 0 or len(imp) == 0:
                raise EmptyClassError("training data must contain both classes")
            g = np.sort(np.asarray(gen, dtype=np.float64))
            m = np.sort(np.asarray(imp, dtype=np.float64))
            g.flags.writeable = False
            m.flags.writeable = False
            self._genuine.append(g)
            self._imposter.append(m)

    @property
    def n_classifiers(self) -> int:
        return len(self.names)

    def genuine_sorted(self, classifier: int) -> np.ndarray:
        return self._genuine[classifier]

    def imposter_sorted(self, classifier: int) -> np.ndarray:
        return self._imposter[classifier]

    def n_genuine(self, classifier: int) -> int:
        return len(self._genuine[classifier])

    def n_imposter(self, classifier: int) -> int:
        return len(self._imposter[classifier])

    def score_range(self, classifier: int) -> tuple[float, float]:
        """(min, max) over all training scores of one classifier."""
        g = self._genuine[classifier]
        m = self._imposter[classifier]
        return min(float(g[0]), float(m[0])), max(float(g[-1]), float(m[-1]))


def build_model(train: Dataset) -> ReliabilityModel:
    """Build the per-classifier reliability tables from a training dataset.

    Deterministic; duplicates are retained with multiplicity. Raises
    :class:`EmptyClassError` if either class is empty.
    """
    if train.genuine_count == 0 or train.imposter_count == 0:
        raise EmptyClassError(
            f"training set needs both classes, got {train.genuine_count} genuine "
            f"and {train.imposter_count} imposter samples"
        )
    require_valid(train)
    names = train.registry.names
    genuine = [train.genuine_scores(i) for i in range(train.registry.n)]
    imposter = [train.imposter_scores(i) for i in range(train.registry.n)]
    return ReliabilityModel(names, genuine, imposter)


def _check_query(model: ReliabilityModel, classifier: int, score: float) -> None:
    if not 0 <= classifier < model.n_classifiers:
        raise IndexError(f"classifier index {classifier} out of range")
    if not math.isfinite(score):
        raise ValueError(f"query score must be finite, got {score!r}")


def reliability_genuine(model: ReliabilityModel, classifier: int, score: float) -> float:
    """Fraction of training genuine scores <= score (inclusive boundary)."""
    _check_query(model, classifier, score)
    gen = model.genuine_sorted(classifier)
    count = int(np.searchsorted(gen, score, side="right"))
    return count / len(gen)


def reliability_imposter(model: ReliabilityModel, classifier: int, score: float) -> float:
    """Fraction of training imposter scores >= score (inclusive boundary)."""
    _check_query(model, classifier, score)
    imp = model.imposter_sorted(classifier)
    count = len(imp) - int(np.searchsorted(imp, score, side="left"))
    return count / len(imp)


def reliability_ratio(model: ReliabilityModel, classifier: int, score: float) -> ReliabilityPair:
    """Raw reliabilities plus the smoothed decision-reliability ratios."""
    _check_query(model, classifier, score)
    gen = model.genuine_sorted(classifier)
    imp = model.imposter_sorted(classifier)
    count_le = int(np.searchsorted(gen, score, side="right"))
    count_ge = len(imp) - int(np.searchsorted(imp, score, side="left"))
    smoothed_gen = (count_le + 1) / (len(gen) + 1)
    smoothed_imp = (count_ge + 1) / (len(imp) + 1)
    return ReliabilityPair(
        r_genuine=count_le / len(gen),
        r_imposter=count_ge / len(imp),
        rr_genuine=smoothed_gen / smoothed_imp,
        rr_imposter=smoothed_imp / smoothed_gen,
    )


def decide_single(model: ReliabilityModel, classifier: int, score: float) -> Label:
    """One classifier's reliability-based decision for a score.

    Genuine when the smoothed genuine reliability strictly exceeds the
    smoothed imposter reliability; exact ties decide Imposter (the costlier
    error in verification is a false accept).
    """
    _check_query(model, classifier, score)
    gen = model.genuine_sorted(classifier)
    imp = model.imposter_sorted(classifier)
    count_le = int(np.searchsorted(gen, score, side="right"))
    count_ge = len(imp) - int(np.searchsorted(imp, score, side="left"))
    smoothed_gen = (count_le + 1) / (len(gen) + 1)
    smoothed_imp = (count_ge + 1) / (len(imp) + 1)
    return Label.GENUINE if smoothed_gen > smoothed_imp else Label.IMPOSTER


def ratio_matrix(
    model: ReliabilityModel, scores: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized smoothed ratios for a (n_samples, n_classifiers) score matrix.

    Returns (rr_genuine, rr_imposter) matrices of the same shape. Arithmetic
    is identical, operation for operation, to :func:`reliability_ratio`.
    """
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] != model.n_classifiers:
        raise ValueError("scores must be (n_samples, n_classifiers)")
    rr_gen = np.empty_like(scores)
    rr_imp = np.empty_like(scores)
    for i in range(model.n_classifiers):
        gen = model.genuine_sorted(i)
        imp = model.imposter_sorted(i)
        count_le = np.searchsorted(gen, scores[:, i], side="right")
        count_ge = len(imp) - np.searchsorted(imp, scores[:, i], side="left")
        smoothed_gen = (count_le + 1) / (len(gen) + 1)
        smoothed_imp = (count_ge + 1) / (len(imp) + 1)
        rr_gen[:, i] = smoothed_gen / smoothed_imp
        rr_imp[:, i] = smoothed_imp / smoothed_gen
    return rr_gen, rr_imp


def model_to_dict(model: ReliabilityModel) -> dict:
    """Serialize to the versioned JSON document layout.

    Scores round-trip bit-exactly: JSON rendering of Python floats uses the
    shortest repr, which parses back to the identical 64-bit value.
    """
    return {
        "version": MODEL_VERSION,
        "smoothing": SMOOTHING_TAG,
        "classifiers": list(model.names),
        "per_classifier": [
            {
                "name": model.names[i],
                "genuine_sorted": [float(x) for x in model.genuine_sorted(i)],
                "imposter_sorted": [float(x) for x in model.imposter_sorted(i)],
                "n_genuine": model.n_genuine(i),
                "n_imposter": model.n_imposter(i),
            }
            for i in range(model.n_classifiers)
        ],
    }


def model_from_dict(doc: dict) -> ReliabilityModel:
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise FusebenchError(f"unsupported model version {version!r}, expected {MODEL_VERSION!r}")
    smoothing = doc.get("smoothing")
    if smoothing != SMOOTHING_TAG:
        raise FusebenchError(f"unsupported smoothing scheme {smoothing!r}")
    names = [entry["name"] for entry in doc["per_classifier"]]
    if names != list(doc.get("classifiers", names)):
        raise FusebenchError("classifier list does not match per-classifier entries")
    model = ReliabilityModel(
        names,
        [entry["genuine_sorted"] for entry in doc["per_classifier"]],
        [entry["imposter_sorted"] for entry in doc["per_classifier"]],
    )
    for i, entry in enumerate(doc["per_classifier"]):
        if entry["n_genuine"] != model.n_genuine(i) or entry["n_imposter"] != model.n_imposter(i):
            raise FusebenchError(f"stored counts disagree with arrays for {names[i]!r}")
    return model
