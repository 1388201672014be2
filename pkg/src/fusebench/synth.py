"""Seeded synthetic score-benchmark generator.

Produces train/test dataset pairs whose shape mirrors a real verification
benchmark: many more imposter comparisons than genuine ones, per-classifier
genuine/imposter score distributions that overlap, and errors that are
correlated across classifiers.

The correlation mechanism is a single latent "pattern quality" draw per
sample, mixed with per-classifier independent noise: with correlation rho,
score = location + spread * (sqrt(rho) * latent + sqrt(1 - rho) * noise),
truncated into [0, 1]. Complementary errors between classifiers are exactly
what decision-level fusion exploits, so the knob matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ClassifierRegistry, Dataset, FusebenchError, Label, ScoreSample


class InvalidSpecError(FusebenchError):
    pass


@dataclass(frozen=True)
class ScoreDistribution:
    """One classifier's genuine and imposter score distributions."""

    name: str
    genuine_location: float
    genuine_spread: float
    imposter_location: float
    imposter_spread: float


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    classifiers: tuple[ScoreDistribution, ...]
    correlation: float
    n_train_genuine: int
    n_train_imposter: int
    n_test_genuine: int
    n_test_imposter: int

    def validate(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must fit in an unsigned 64-bit integer")
        if not self.classifiers:
            raise InvalidSpecError("need at least one classifier")
        if not 0.0 <= self.correlation <= 1.0:
            raise InvalidSpecError(f"correlation {self.correlation!r} outside [0, 1]")
        for c in self.classifiers:
            # zero spread is allowed: it degenerates to point-mass scores,
            # the exact separable limit used by endpoint tests
            if c.genuine_spread < 0 or c.imposter_spread < 0:
                raise InvalidSpecError(f"{c.name}: spreads must be non-negative")
            if not c.genuine_location > c.imposter_location:
                raise InvalidSpecError(
                    f"{c.name}: genuine location must exceed imposter location "
                    "(similarity orientation)"
                )
            if not all(
                math.isfinite(v)
                for v in (
                    c.genuine_location,
                    c.genuine_spread,
                    c.imposter_location,
                    c.imposter_spread,
                )
            ):
                raise InvalidSpecError(f"{c.name}: parameters must be finite")
        for count in (
            self.n_train_genuine,
            self.n_train_imposter,
            self.n_test_genuine,
            self.n_test_imposter,
        ):
            if count < 1:
                raise InvalidSpecError("all sample counts must be >= 1")


def _draw_block(
    rng: np.random.Generator, spec: SynthSpec, n: int, genuine: bool
) -> np.ndarray:
    k = len(spec.classifiers)
    latent = rng.standard_normal(n)
    noise = rng.standard_normal((n, k))
    shared = math.sqrt(spec.correlation)
    independent = math.sqrt(1.0 - spec.correlation)
    mixed = shared * latent[:, None] + independent * noise
    locations = np.array(
        [c.genuine_location if genuine else c.imposter_location for c in spec.classifiers]
    )
    spreads = np.array(
        [c.genuine_spread if genuine else c.imposter_spread for c in spec.classifiers]
    )
    return np.clip(locations + spreads * mixed, 0.0, 1.0)


def _make_samples(prefix: str, scores: np.ndarray, label: Label) -> list[ScoreSample]:
    return [
        ScoreSample(f"{prefix}-{i:05d}", label, tuple(float(v) for v in row))
        for i, row in enumerate(scores, start=1)
    ]


def generate(spec: SynthSpec) -> tuple[Dataset, Dataset]:
    """Generate (train, test) datasets; a pure function of the spec."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    registry = ClassifierRegistry(tuple(c.name for c in spec.classifiers))
    blocks = [
        ("tr-g", spec.n_train_genuine, Label.GENUINE),
        ("tr-i", spec.n_train_imposter, Label.IMPOSTER),
        ("te-g", spec.n_test_genuine, Label.GENUINE),
        ("te-i", spec.n_test_imposter, Label.IMPOSTER),
    ]
    samples: dict[str, list[ScoreSample]] = {}
    for prefix, count, label in blocks:
        scores = _draw_block(rng, spec, count, label is Label.GENUINE)
        samples[prefix] = _make_samples(prefix, scores, label)
    train = Dataset.from_samples(registry, samples["tr-g"] + samples["tr-i"])
    test = Dataset.from_samples(registry, samples["te-g"] + samples["te-i"])
    return train, test


def spec_to_dict(spec: SynthSpec) -> dict:
    return {
        "seed": spec.seed,
        "correlation": spec.correlation,
        "classifiers": [
            {
                "name": c.name,
                "genuine": {"location": c.genuine_location, "spread": c.genuine_spread},
                "imposter": {"location": c.imposter_location, "spread": c.imposter_spread},
            }
            for c in spec.classifiers
        ],
        "train": {"genuine": spec.n_train_genuine, "imposter": spec.n_train_imposter},
        "test": {"genuine": spec.n_test_genuine, "imposter": spec.n_test_imposter},
    }


def spec_from_dict(doc: dict) -> SynthSpec:
    try:
        spec = SynthSpec(
            seed=int(doc["seed"]),
            correlation=float(doc["correlation"]),
            classifiers=tuple(
                ScoreDistribution(
                    name=c["name"],
                    genuine_location=float(c["genuine"]["location"]),
                    genuine_spread=float(c["genuine"]["spread"]),
                    imposter_location=float(c["imposter"]["location"]),
                    imposter_spread=float(c["imposter"]["spread"]),
                )
                for c in doc["classifiers"]
            ),
            n_train_genuine=int(doc["train"]["genuine"]),
            n_train_imposter=int(doc["train"]["imposter"]),
            n_test_genuine=int(doc["test"]["genuine"]),
            n_test_imposter=int(doc["test"]["imposter"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpecError(f"malformed synthesis spec: {exc}") from exc
    spec.validate()
    return spec


def sb1_spec() -> SynthSpec:
    """The pinned SB-1 benchmark: four correlated classifiers whose training
    EERs span roughly 2-7%, with a heavily imposter-skewed test set."""
    return SynthSpec(
        seed=42,
        correlation=0.5,
        classifiers=(
            ScoreDistribution("a1", 0.62, 0.080, 0.30, 0.080),
            ScoreDistribution("a2", 0.60, 0.085, 0.27, 0.085),
            ScoreDistribution("a3", 0.58, 0.100, 0.24, 0.100),
            ScoreDistribution("a4", 0.55, 0.110, 0.22, 0.110),
        ),
        n_train_genuine=300,
        n_train_imposter=2000,
        n_test_genuine=600,
        n_test_imposter=24000,
    )
