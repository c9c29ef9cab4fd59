"""Threshold sweeps, per-message classification, and report rendering.

A message is classified into every taxonomy class whose score reaches the
threshold (inclusive), so one anomaly can be e.g. both a template and a
contextual anomaly, or fall outside the taxonomy entirely when no score
reaches it. Thresholds are exact rationals: "0.7" means 7/10, and a sweep at
1.0 keeps only scores that are exactly one.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .model import AnomalyKind, LabeledCorpus, Label
from .scoring import ScoreTriple
from .templating import MiningResult

REPORT_SCHEMA_VERSION = 1


def _as_fraction(value: float | str | int | Fraction) -> Fraction:
    # Fraction(str(0.7)) == 7/10, while Fraction(0.7) would be the binary float.
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


DEFAULT_THRESHOLDS: tuple[Fraction, ...] = (
    Fraction(6, 10),
    Fraction(7, 10),
    Fraction(8, 10),
    Fraction(9, 10),
    Fraction(1),
)


@dataclass(frozen=True)
class ThresholdSweep:
    """A strictly increasing series of thresholds, each within (0, 1]."""

    thresholds: tuple[Fraction, ...] = DEFAULT_THRESHOLDS

    def __post_init__(self) -> None:
        values = tuple(_as_fraction(t) for t in self.thresholds)
        object.__setattr__(self, "thresholds", values)
        if not values:
            raise ValueError("at least one threshold is required")
        for t in values:
            if not 0 < t <= 1:
                raise ValueError(f"threshold {t} outside (0, 1]")
        if any(a >= b for a, b in zip(values, values[1:])):
            raise ValueError("thresholds must be strictly increasing")

    @classmethod
    def parse(cls, text: str) -> "ThresholdSweep":
        """Parse a comma-separated threshold list like "0.6,0.7,1"."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError("no thresholds given")
        return cls(tuple(Fraction(p) for p in parts))


def classify(score: ScoreTriple, threshold: Fraction | float | str) -> frozenset[AnomalyKind]:
    """Taxonomy classes whose score reaches the threshold; empty set = outside taxonomy."""
    t = _as_fraction(threshold)
    if not 0 < t <= 1:
        raise ValueError(f"threshold {t} outside (0, 1]")
    kinds = set()
    if score.template_score >= t:
        kinds.add(AnomalyKind.TEMPLATE)
    if score.attribute_score is not None and score.attribute_score >= t:
        kinds.add(AnomalyKind.ATTRIBUTE)
    if score.context_score >= t:
        kinds.add(AnomalyKind.CONTEXTUAL)
    return frozenset(kinds)


@dataclass(frozen=True, slots=True)
class DatasetStats:
    """Message and template counts split by label.

    A template is "anomalous" when at least one anomalous message matched it;
    templates matched by both label classes are counted on both sides and
    also reported as the intersection.
    """

    normal_messages: int
    anomalous_messages: int
    normal_templates: int
    anomalous_templates: int
    intersection_templates: int


def dataset_statistics(corpus: LabeledCorpus, mining: MiningResult) -> DatasetStats:
    normal_ids = set()
    anomalous_ids = set()
    for rec, tid in zip(corpus.records, mining.assignment):
        (anomalous_ids if rec.label is Label.ANOMALOUS else normal_ids).add(tid)
    return DatasetStats(
        normal_messages=corpus.normal_count,
        anomalous_messages=corpus.anomalous_count,
        normal_templates=len(normal_ids),
        anomalous_templates=len(anomalous_ids),
        intersection_templates=len(normal_ids & anomalous_ids),
    )


@dataclass(frozen=True)
class ThresholdRow:
    """Classification tallies at one threshold, over the anomalous messages."""

    threshold: Fraction
    counts: Mapping[AnomalyKind, int]
    classified: int
    unclassified: int

    @property
    def total(self) -> int:
        return self.classified + self.unclassified


def _percent(part: int, whole: int) -> float:
    return 100.0 * part / whole if whole else 0.0


@dataclass(frozen=True)
class TaxonomyReport:
    """Full sweep result: dataset statistics plus one row per threshold."""

    stats: DatasetStats
    rows: tuple[ThresholdRow, ...]
    config: Mapping[str, object] = field(default_factory=dict)
    source: Mapping[str, object] = field(default_factory=dict)
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_json_dict(self) -> dict:
        total = self.stats.anomalous_messages
        return {
            "schemaVersion": self.schema_version,
            "source": dict(self.source),
            "config": dict(self.config),
            "dataset": {
                "normalMessages": self.stats.normal_messages,
                "anomalousMessages": self.stats.anomalous_messages,
                "normalTemplates": self.stats.normal_templates,
                "anomalousTemplates": self.stats.anomalous_templates,
                "intersectionTemplates": self.stats.intersection_templates,
            },
            "thresholds": [
                {
                    "threshold": str(row.threshold),
                    "thresholdValue": float(row.threshold),
                    "counts": {kind.value: row.counts.get(kind, 0) for kind in AnomalyKind},
                    "percentages": {
                        kind.value: _percent(row.counts.get(kind, 0), total)
                        for kind in AnomalyKind
                    },
                    "classified": row.classified,
                    "unclassified": row.unclassified,
                    "unclassifiedPercentage": _percent(row.unclassified, total),
                }
                for row in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """Percentage matrix, one row per threshold — plots straight into a figure."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["threshold", "template_pct", "attribute_pct", "contextual_pct", "unclassified_pct"]
        )
        total = self.stats.anomalous_messages
        for row in self.rows:
            writer.writerow(
                [
                    f"{float(row.threshold):g}",
                    f"{_percent(row.counts.get(AnomalyKind.TEMPLATE, 0), total):.6f}",
                    f"{_percent(row.counts.get(AnomalyKind.ATTRIBUTE, 0), total):.6f}",
                    f"{_percent(row.counts.get(AnomalyKind.CONTEXTUAL, 0), total):.6f}",
                    f"{_percent(row.unclassified, total):.6f}",
                ]
            )
        return buf.getvalue()

    def to_text(self) -> str:
        """Human-readable summary table."""
        s = self.stats
        lines = [
            f"messages: {s.normal_messages + s.anomalous_messages} "
            f"({s.normal_messages} normal, {s.anomalous_messages} anomalous)",
            f"templates: {s.normal_templates} normal, {s.anomalous_templates} anomalous, "
            f"{s.intersection_templates} shared",
            "",
            f"{'threshold':>9}  {'template':>10}  {'attribute':>10}  "
            f"{'contextual':>10}  {'unclassified':>12}",
        ]
        total = s.anomalous_messages
        for row in self.rows:
            lines.append(
                f"{float(row.threshold):>9g}  "
                f"{_percent(row.counts.get(AnomalyKind.TEMPLATE, 0), total):>9.2f}%  "
                f"{_percent(row.counts.get(AnomalyKind.ATTRIBUTE, 0), total):>9.2f}%  "
                f"{_percent(row.counts.get(AnomalyKind.CONTEXTUAL, 0), total):>9.2f}%  "
                f"{_percent(row.unclassified, total):>11.2f}%"
            )
        return "\n".join(lines) + "\n"


def sweep_report(
    scores: Mapping[int, ScoreTriple],
    sweep: ThresholdSweep | None = None,
    stats: DatasetStats | None = None,
    config: Mapping[str, object] | None = None,
    source: Mapping[str, object] | None = None,
) -> TaxonomyReport:
    """Classify every scored message at every threshold and tally the outcome.

    `stats` normally comes from dataset_statistics; when omitted, a minimal
    stand-in is derived from the score map itself (message counts only).
    """
    sweep = sweep or ThresholdSweep()
    if stats is None:
        stats = DatasetStats(
            normal_messages=0,
            anomalous_messages=len(scores),
            normal_templates=0,
            anomalous_templates=0,
            intersection_templates=0,
        )
    # Score triples repeat across messages (few distinct templates and
    # signatures), so classify each distinct triple once and weight by count.
    distinct = Counter(scores.values())
    rows = []
    for t in sweep.thresholds:
        counts: dict[AnomalyKind, int] = {kind: 0 for kind in AnomalyKind}
        classified = 0
        for triple, weight in distinct.items():
            kinds = classify(triple, t)
            if kinds:
                classified += weight
                for kind in kinds:
                    counts[kind] += weight
        rows.append(
            ThresholdRow(
                threshold=t,
                counts=counts,
                classified=classified,
                unclassified=len(scores) - classified,
            )
        )
    return TaxonomyReport(
        stats=stats,
        rows=tuple(rows),
        config=dict(config or {}),
        source=dict(source or {}),
    )
