"""Shared data model: labels, score samples, classifier registry, datasets.

Scores are real-valued similarities: larger means "more likely the same
subject". Distance-type matcher outputs must be negated by the caller
before they enter this model; no orientation auto-detection is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Sequence


class FusebenchError(Exception):
    """Base class for all data/processing errors raised by this package."""


class Label(IntEnum):
    """Binary verification outcome: genuine pair (1) or imposter pair (0)."""

    IMPOSTER = 0
    GENUINE = 1


@dataclass(frozen=True)
class ScoreSample:
    """One comparison attempt: an id, its ground-truth label, and one
    similarity score per classifier (index-aligned with the registry)."""

    pattern_id: str
    label: Label
    scores: tuple[float, ...]

    @classmethod
    def of(cls, pattern_id: str, label: Label, scores: Iterable[float]) -> "ScoreSample":
        return cls(pattern_id, Label(label), tuple(float(s) for s in scores))


@dataclass(frozen=True)
class ClassifierRegistry:
    """Ordered, distinct names of the N classifiers being fused."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.names) < 1:
            raise ValueError("registry needs at least one classifier")
        if any(not n for n in self.names):
            raise ValueError("classifier names must be non-empty")
        if len(set(self.names)) != len(self.names):
            raise ValueError("classifier names must be distinct")

    @property
    def n(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True)
class Dataset:
    """A labeled score benchmark: samples plus per-class tallies.

    Construction is permissive (malformed samples are representable so
    that :func:`validate_dataset` can report them); pipeline entry points
    validate before use.
    """

    registry: ClassifierRegistry
    samples: tuple[ScoreSample, ...]
    genuine_count: int
    imposter_count: int

    @classmethod
    def from_samples(
        cls, registry: ClassifierRegistry, samples: Iterable[ScoreSample]
    ) -> "Dataset":
        samples = tuple(samples)
        n_gen = sum(1 for s in samples if s.label is Label.GENUINE)
        return cls(registry, samples, n_gen, len(samples) - n_gen)

    def genuine_scores(self, classifier: int) -> list[float]:
        return [s.scores[classifier] for s in self.samples if s.label is Label.GENUINE]

    def imposter_scores(self, classifier: int) -> list[float]:
        return [s.scores[classifier] for s in self.samples if s.label is Label.IMPOSTER]

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class Violation:
    """One data-quality finding; ``kind`` is a stable machine-readable tag."""

    kind: str
    message: str


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_dataset(dataset: Dataset) -> ValidationResult:
    """Check a dataset against the model invariants.

    Violations are data, not failures: the result lists everything found
    (score arity, non-finite scores, duplicate or empty pattern ids, an
    empty class, count mismatches) and is empty for a well-formed dataset.
    Pure function: repeated calls return identical results.
    """
    violations: list[Violation] = []
    n = dataset.registry.n
    seen: set[str] = set()
    gen = imp = 0
    for sample in dataset.samples:
        if len(sample.scores) != n:
            violations.append(
                Violation(
                    "score arity",
                    f"sample {sample.pattern_id!r} has {len(sample.scores)} scores, expected {n}",
                )
            )
        for j, score in enumerate(sample.scores):
            if not math.isfinite(score):
                violations.append(
                    Violation(
                        "non-finite score",
                        f"sample {sample.pattern_id!r} score {j} is {score!r}",
                    )
                )
        if not sample.pattern_id:
            violations.append(Violation("empty pattern_id", "sample with empty pattern_id"))
        elif sample.pattern_id in seen:
            violations.append(
                Violation("duplicate pattern_id", f"pattern_id {sample.pattern_id!r} repeats")
            )
        else:
            seen.add(sample.pattern_id)
        if sample.label is Label.GENUINE:
            gen += 1
        else:
            imp += 1
    if gen == 0:
        violations.append(Violation("empty class", "dataset has no genuine samples"))
    if imp == 0:
        violations.append(Violation("empty class", "dataset has no imposter samples"))
    if gen != dataset.genuine_count or imp != dataset.imposter_count:
        violations.append(
            Violation(
                "count mismatch",
                f"stored counts ({dataset.genuine_count} genuine, {dataset.imposter_count} "
                f"imposter) do not match label tallies ({gen}, {imp})",
            )
        )
    return ValidationResult(tuple(violations))


def require_valid(dataset: Dataset) -> Dataset:
    """Raise :class:`FusebenchError` on the first violation; return the dataset."""
    result = validate_dataset(dataset)
    if not result.ok:
        first = result.violations[0]
        raise FusebenchError(f"invalid dataset ({first.kind}): {first.message}")
    return dataset
