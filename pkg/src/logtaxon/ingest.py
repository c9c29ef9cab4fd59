"""Reading labeled log datasets and generating synthetic ones.

Supported on-disk shape: one message per line, a fixed number of
whitespace-separated header fields in front, the label in one of them
(supercomputer dumps put "-" first for normal lines and an alert tag
otherwise), and the free-text content after the header. Files may be
gzip-compressed; that is sniffed from the magic bytes, not the name.
"""

from __future__ import annotations

import gzip
import io
import random
from dataclasses import dataclass, field
from typing import IO, Mapping

from .model import AnomalyKind, LabeledCorpus, Label, LogRecord, split_corpus


@dataclass(frozen=True, slots=True)
class DatasetFormat:
    """Line layout: header width, which header field is the label, normal marker."""

    header_fields: int = 1
    label_field: int = 0
    normal_token: str = "-"

    def __post_init__(self) -> None:
        if self.header_fields < 1:
            raise ValueError("header_fields must be at least 1")
        if not 0 <= self.label_field < self.header_fields:
            raise ValueError("label_field must index a header field")


# Header widths of the common supercomputer dumps:
#   bgl:         label ts date node ts2 node2 facility subsystem level | content
#   thunderbird: label ts date user month day time location | component[pid]: content
#   spirit:     label ts date system month day time system2 | component: content
# The syslog component token ("kernel:", "crond[123]:") stays in the content
# for thunderbird and spirit, so it participates in template mining.
PRESETS: dict[str, DatasetFormat] = {
    "generic": DatasetFormat(header_fields=1),
    "bgl": DatasetFormat(header_fields=9),
    "thunderbird": DatasetFormat(header_fields=8),
    "spirit": DatasetFormat(header_fields=8),
}


@dataclass(frozen=True, slots=True)
class IngestSummary:
    lines_read: int
    records: int
    malformed_skipped: int


def _open_text(path: str) -> IO[str]:
    raw = open(path, "rb")
    magic = raw.read(2)
    raw.seek(0)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.GzipFile(fileobj=raw), encoding="utf-8", errors="replace")
    return io.TextIOWrapper(raw, encoding="utf-8", errors="replace")


def read_dataset(
    path: str,
    format: DatasetFormat = PRESETS["generic"],
    limit: int | None = None,
) -> tuple[LabeledCorpus, IngestSummary]:
    """Parse a dataset file into a corpus, skipping (and counting) malformed lines.

    A line is malformed when it has fewer fields than the header needs. Blank
    lines count as malformed too. `limit` caps the number of parsed records,
    not raw lines. Raises ValueError("empty corpus") when nothing parses.
    """
    records: list[LogRecord] = []
    lines_read = 0
    malformed = 0
    with _open_text(path) as fh:
        for line in fh:
            lines_read += 1
            parts = line.split(maxsplit=format.header_fields)
            if len(parts) < format.header_fields:
                malformed += 1
                continue
            label = (
                Label.NORMAL
                if parts[format.label_field] == format.normal_token
                else Label.ANOMALOUS
            )
            meta = " ".join(
                parts[i] for i in range(format.header_fields) if i != format.label_field
            )
            content = parts[format.header_fields].rstrip("\n") if len(parts) > format.header_fields else ""
            records.append(LogRecord(index=len(records) + 1, label=label, meta=meta, content=content))
            if limit is not None and len(records) >= limit:
                break
    corpus = split_corpus(records)  # raises "empty corpus" when records is empty
    return corpus, IngestSummary(lines_read, len(records), malformed)


def write_dataset(corpus: LabeledCorpus, path: str, anomalous_token: str = "ANOM") -> None:
    """Write a corpus in the generic one-header-field layout (round-trips with read_dataset)."""
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "wt", encoding="utf-8") as fh:
        for rec in corpus:
            label = "-" if rec.label is Label.NORMAL else anomalous_token
            fh.write(f"{label} {rec.content}\n")


@dataclass(frozen=True, slots=True)
class AttributePool:
    """Values a template slot can draw: normal lines sample `normal`, injected
    attribute anomalies sample `anomalous` (tokens no normal line ever uses)."""

    name: str
    normal: tuple[str, ...]
    anomalous: tuple[str, ...] = ()


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a generated corpus.

    `templates` are message patterns whose "<pool>" tokens get filled from the
    named pool. `sequence_patterns` (indices into templates) repeat round-robin
    to give the stream a stable rhythm; without one, templates cycle in order.
    `anomaly_templates` are patterns only anomalies use. Injected anomalies
    replace the scheduled message (template/attribute kinds) or insert an
    extra one (contextual kind), keeping kinds separable on purpose.
    """

    templates: tuple[str, ...]
    pools: Mapping[str, AttributePool] = field(default_factory=dict)
    length: int = 1000
    anomaly_rate: float = 0.05
    seed: int = 0
    anomaly_templates: tuple[str, ...] = ()
    sequence_patterns: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.templates:
            raise ValueError("at least one template is required")
        if not 0 <= self.anomaly_rate <= 1:
            raise ValueError("anomaly_rate must be within [0, 1]")
        if self.length < 1:
            raise ValueError("length must be positive")
        for i in self.sequence_patterns:
            if not 0 <= i < len(self.templates):
                raise ValueError(f"sequence pattern index {i} out of range")
        for tpl in self.templates + self.anomaly_templates:
            for slot in _slots_of(tpl):
                pool = self.pools.get(slot)
                if pool is None:
                    raise ValueError(f"template {tpl!r} references unknown pool {slot!r}")
                if not pool.normal:
                    raise ValueError(f"pool {slot!r} has no normal values")
        can_inject = self.anomaly_templates or any(
            self.pools[s].anomalous for t in self.templates for s in _slots_of(t)
        )
        if self.anomaly_rate > 0 and not can_inject:
            raise ValueError(
                "anomaly_rate > 0 needs anomaly_templates or a template slot "
                "whose pool has anomalous values"
            )


def _slots_of(template: str) -> list[str]:
    return [tok[1:-1] for tok in template.split() if tok.startswith("<") and tok.endswith(">")]


def _fill(template: str, pools: Mapping[str, AttributePool], rng: random.Random, anomalous_slots: bool) -> str:
    out = []
    for tok in template.split():
        if tok.startswith("<") and tok.endswith(">"):
            pool = pools[tok[1:-1]]
            values = pool.anomalous if anomalous_slots and pool.anomalous else pool.normal
            out.append(rng.choice(values))
        else:
            out.append(tok)
    return " ".join(out)


def generate_synthetic(spec: SyntheticSpec) -> tuple[LabeledCorpus, dict[int, AnomalyKind]]:
    """Generate a labeled corpus with known injected anomaly kinds.

    Returns the corpus and {1-based index: injected kind} ground truth.
    Deterministic for a fixed spec (seeded RNG, no global state).
    """
    rng = random.Random(spec.seed)
    schedule = spec.sequence_patterns or tuple(range(len(spec.templates)))

    attribute_templates = tuple(
        t for t in spec.templates if any(spec.pools[s].anomalous for s in _slots_of(t))
    )
    kinds: list[AnomalyKind] = []
    if spec.anomaly_templates:
        kinds.append(AnomalyKind.TEMPLATE)
        kinds.append(AnomalyKind.CONTEXTUAL)
    if attribute_templates:
        kinds.append(AnomalyKind.ATTRIBUTE)

    records: list[LogRecord] = []
    truth: dict[int, AnomalyKind] = {}

    def emit(label: Label, content: str, kind: AnomalyKind | None = None) -> None:
        records.append(LogRecord(index=len(records) + 1, label=label, meta="", content=content))
        if kind is not None:
            truth[len(records)] = kind

    step = 0
    while len(records) < spec.length:
        scheduled = spec.templates[schedule[step % len(schedule)]]
        step += 1
        if kinds and rng.random() < spec.anomaly_rate:
            kind = rng.choice(kinds)
            if kind is AnomalyKind.TEMPLATE:
                tpl = rng.choice(spec.anomaly_templates)
                emit(Label.ANOMALOUS, _fill(tpl, spec.pools, rng, False), kind)
                continue
            if kind is AnomalyKind.ATTRIBUTE:
                tpl = rng.choice(attribute_templates)
                emit(Label.ANOMALOUS, _fill(tpl, spec.pools, rng, True), kind)
                continue
            # Contextual: an off-schedule extra message interrupting the rhythm.
            tpl = rng.choice(spec.anomaly_templates)
            emit(Label.ANOMALOUS, _fill(tpl, spec.pools, rng, False), kind)
            if len(records) >= spec.length:
                break
        emit(Label.NORMAL, _fill(scheduled, spec.pools, rng, False))
    return split_corpus(records), truth
