"""Verification error metrics: FAR, FRR, ROC sweeps, EER, HTER.

Conventions used throughout:

* FAR = false accepts / imposter accesses, FRR = false rejects / genuine
  accesses, HTER = (FAR + FRR) / 2.
* A threshold t accepts a score s iff s >= t.
* Display percentages are truncated (not rounded) to two decimals;
  raw rates are carried at full precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from typing import Iterable, Sequence

import numpy as np

from .core import FusebenchError, Label


class EmptyInputError(FusebenchError):
    pass


class DegenerateCountsError(FusebenchError):
    pass


class InvalidRocError(FusebenchError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    """False accept / false reject tallies with the per-class totals."""

    fa: int
    fr: int
    n_genuine: int
    n_imposter: int

    def __post_init__(self) -> None:
        if not 0 <= self.fa <= self.n_imposter:
            raise ValueError(f"fa={self.fa} outside [0, {self.n_imposter}]")
        if not 0 <= self.fr <= self.n_genuine:
            raise ValueError(f"fr={self.fr} outside [0, {self.n_genuine}]")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.fa + other.fa,
            self.fr + other.fr,
            self.n_genuine + other.n_genuine,
            self.n_imposter + other.n_imposter,
        )


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    far: float
    frr: float


@dataclass(frozen=True)
class EerPoint:
    """EER rate plus an operating threshold realizing it.

    The threshold is centered between the two adjacent sweep candidates
    that bracket the FAR/FRR crossing, which maximizes the margin to the
    nearest training scores on both sides.
    """

    rate: float
    threshold: float


@dataclass(frozen=True)
class StrategyReport:
    """Evaluation of one strategy (or one individual classifier).

    ``eer`` and ``roc`` are present only for score-output strategies.
    """

    name: str
    counts: ConfusionCounts
    far: float
    frr: float
    hter: float
    eer: float | None = None
    roc: tuple[RocPoint, ...] | None = None


@dataclass(frozen=True)
class EvaluationReport:
    entries: tuple[StrategyReport, ...]

    def entry(self, name: str) -> StrategyReport:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def confusion(decisions: Iterable[tuple[Label, Label]]) -> ConfusionCounts:
    """Count errors in a stream of (predicted, true) label pairs."""
    fa = fr = n_gen = n_imp = 0
    for predicted, true in decisions:
        if true is Label.GENUINE or true == Label.GENUINE:
            n_gen += 1
            if predicted == Label.IMPOSTER:
                fr += 1
        else:
            n_imp += 1
            if predicted == Label.GENUINE:
                fa += 1
    if n_gen + n_imp == 0:
        raise EmptyInputError("no decisions to count")
    return ConfusionCounts(fa, fr, n_gen, n_imp)


def confusion_from_arrays(predicted_genuine: np.ndarray, true_genuine: np.ndarray) -> ConfusionCounts:
    """Array form of :func:`confusion` over boolean masks."""
    predicted_genuine = np.asarray(predicted_genuine, dtype=bool)
    true_genuine = np.asarray(true_genuine, dtype=bool)
    if predicted_genuine.shape != true_genuine.shape or predicted_genuine.size == 0:
        raise EmptyInputError("prediction and truth arrays must be non-empty and aligned")
    fa = int(np.count_nonzero(predicted_genuine & ~true_genuine))
    fr = int(np.count_nonzero(~predicted_genuine & true_genuine))
    n_gen = int(np.count_nonzero(true_genuine))
    return ConfusionCounts(fa, fr, n_gen, true_genuine.size - n_gen)


def rates(counts: ConfusionCounts) -> tuple[float, float, float]:
    """(far, frr, hter) for a confusion tally."""
    if counts.n_genuine < 1 or counts.n_imposter < 1:
        raise DegenerateCountsError("both classes must be represented to compute rates")
    far = counts.fa / counts.n_imposter
    frr = counts.fr / counts.n_genuine
    return far, frr, (far + frr) / 2


def roc_sweep(
    genuine_scores: Sequence[float], imposter_scores: Sequence[float]
) -> list[RocPoint]:
    """FAR/FRR at every candidate threshold, sorted by ascending threshold.

    Candidates are all distinct scores plus one sentinel below the minimum
    (accept everything: far=1, frr=0) and one above the maximum (reject
    everything: far=0, frr=1).
    """
    gen = np.sort(np.asarray(genuine_scores, dtype=np.float64))
    imp = np.sort(np.asarray(imposter_scores, dtype=np.float64))
    if gen.size == 0 or imp.size == 0:
        raise EmptyInputError("both score lists must be non-empty")
    if not (np.isfinite(gen).all() and np.isfinite(imp).all()):
        raise ValueError("scores must be finite")
    distinct = np.unique(np.concatenate([gen, imp]))
    thresholds = np.concatenate([[distinct[0] - 1.0], distinct, [distinct[-1] + 1.0]])
    far = (imp.size - np.searchsorted(imp, thresholds, side="left")) / imp.size
    frr = np.searchsorted(gen, thresholds, side="left") / gen.size
    return [
        RocPoint(float(t), float(a), float(r))
        for t, a, r in zip(thresholds, far, frr)
    ]


def _check_roc(roc: Sequence[RocPoint]) -> None:
    if not roc:
        raise InvalidRocError("empty ROC")
    for point in roc:
        if not (0.0 <= point.far <= 1.0 and 0.0 <= point.frr <= 1.0):
            raise InvalidRocError(f"rates outside [0,1] at threshold {point.threshold}")
    for prev, cur in zip(roc, roc[1:]):
        if cur.threshold < prev.threshold:
            raise InvalidRocError("thresholds must be non-decreasing")
        if cur.far > prev.far or cur.frr < prev.frr:
            raise InvalidRocError(
                f"monotonicity violated between thresholds {prev.threshold} and {cur.threshold}"
            )


def eer_point(roc: Sequence[RocPoint]) -> EerPoint:
    """Locate the FAR=FRR crossing of a threshold sweep.

    When no point has far == frr exactly, the rate is linearly interpolated
    between the two bracketing points of the (far - frr) sign change.
    """
    _check_roc(roc)
    diffs = [p.far - p.frr for p in roc]
    j = next((k for k, d in enumerate(diffs) if d <= 0.0), None)
    if j is None:
        raise InvalidRocError("sweep has no FAR/FRR crossing")
    if j == 0:
        # First point already at or past the crossing (no accept-all sentinel).
        return EerPoint(rate=(roc[0].far + roc[0].frr) / 2, threshold=roc[0].threshold)
    lo, hi = roc[j - 1], roc[j]
    threshold = (lo.threshold + hi.threshold) / 2
    if diffs[j] == 0.0:
        return EerPoint(rate=hi.far, threshold=threshold)
    alpha = diffs[j - 1] / (diffs[j - 1] - diffs[j])
    rate = lo.far + alpha * (hi.far - lo.far)
    return EerPoint(rate=rate, threshold=threshold)


def eer(roc: Sequence[RocPoint]) -> float:
    """Equal error rate of a sweep (see :func:`eer_point`)."""
    return eer_point(roc).rate


def strategy_report(
    name: str,
    counts: ConfusionCounts,
    eer_value: float | None = None,
    roc: Sequence[RocPoint] | None = None,
) -> StrategyReport:
    far, frr, hter = rates(counts)
    return StrategyReport(
        name=name,
        counts=counts,
        far=far,
        frr=frr,
        hter=hter,
        eer=eer_value,
        roc=tuple(roc) if roc is not None else None,
    )


# -- display helpers ---------------------------------------------------------

def percent_from_counts(numerator: int, denominator: int) -> str:
    """Exact 2-decimal percentage of an integer ratio, truncated."""
    if denominator <= 0:
        raise DegenerateCountsError("denominator must be positive")
    hundredths = numerator * 10000 // denominator
    return f"{hundredths // 100}.{hundredths % 100:02d}"


def hter_percent_from_counts(counts: ConfusionCounts) -> str:
    """Exact 2-decimal HTER percentage, truncated."""
    if counts.n_genuine < 1 or counts.n_imposter < 1:
        raise DegenerateCountsError("both classes must be represented")
    numerator = counts.fa * counts.n_genuine + counts.fr * counts.n_imposter
    denominator = 2 * counts.n_genuine * counts.n_imposter
    hundredths = numerator * 10000 // denominator
    return f"{hundredths // 100}.{hundredths % 100:02d}"


def percent(rate: float) -> str:
    """2-decimal percentage of a float rate, truncated.

    Goes through the shortest decimal repr so that rates like 0.006 render
    as "0.60" rather than tripping over their binary representation.
    """
    value = Decimal(repr(float(rate))) * 100
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_DOWN))


def roc_csv(roc: Sequence[RocPoint]) -> str:
    """Render a sweep as `threshold,far,frr` CSV at full precision."""
    lines = ["threshold,far,frr"]
    for point in roc:
        lines.append(f"{point.threshold!r},{point.far!r},{point.frr!r}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvaluationReport) -> dict:
    """JSON-ready view of a report: counts, raw rates, display percentages."""
    entries = []
    for e in report.entries:
        entry = {
            "name": e.name,
            "fa": e.counts.fa,
            "fr": e.counts.fr,
            "n_genuine": e.counts.n_genuine,
            "n_imposter": e.counts.n_imposter,
            "far": e.far,
            "frr": e.frr,
            "hter": e.hter,
            "far_pct": percent_from_counts(e.counts.fa, e.counts.n_imposter),
            "frr_pct": percent_from_counts(e.counts.fr, e.counts.n_genuine),
            "hter_pct": hter_percent_from_counts(e.counts),
        }
        if e.eer is not None:
            entry["eer"] = e.eer
            entry["eer_pct"] = percent(e.eer)
        entries.append(entry)
    return {"strategies": entries}
