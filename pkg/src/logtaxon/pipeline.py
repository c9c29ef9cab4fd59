"""End-to-end analysis: tokenize, mine, score, and report in one call."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .context import ContextBounds, ContextSignature, build_all_contexts
from .model import LabeledCorpus, TokenSequence
from .report import TaxonomyReport, ThresholdSweep, dataset_statistics, sweep_report
from .scoring import AttributeScope, CountTable, ScoreTriple, build_count_table, score_corpus
from .templating import MinerConfig, MiningResult, attributes_for_corpus, mine_templates, tokenize_corpus


@dataclass(frozen=True)
class Analysis:
    """Everything one pipeline run produced, from tokens to the final report."""

    corpus: LabeledCorpus
    mining: MiningResult
    attribute_sets: tuple[TokenSequence, ...]
    signatures: tuple[ContextSignature, ...]
    table: CountTable
    scores: dict[int, ScoreTriple]
    report: TaxonomyReport


def analyze_corpus(
    corpus: LabeledCorpus,
    *,
    miner_config: MinerConfig | None = None,
    bounds: ContextBounds | None = None,
    sweep: ThresholdSweep | None = None,
    threads: int = 1,
    attribute_scope: AttributeScope = "global",
    include_normal_scores: bool = False,
    source: Mapping[str, object] | None = None,
) -> Analysis:
    """Run the full pipeline over a raw (untokenized) corpus.

    The report's config block echoes the analysis parameters so a run can be
    reproduced from its own output. Thread count is deliberately not part of
    it: results are identical at any thread count, and the echo only holds
    what shapes them.
    """
    miner_config = miner_config or MinerConfig()
    bounds = bounds or ContextBounds()
    sweep = sweep or ThresholdSweep()

    tokenized = tokenize_corpus(corpus, miner_config.mask_rules)
    mining = mine_templates(tokenized, miner_config, threads=threads)
    attribute_sets = attributes_for_corpus(tokenized, mining, threads=threads)
    signatures = build_all_contexts(mining.assignment, bounds, threads=threads)
    table = build_count_table(
        tokenized, mining.assignment, attribute_sets, signatures, attribute_scope
    )
    scores = score_corpus(
        tokenized,
        table,
        mining.assignment,
        attribute_sets,
        signatures,
        include_normal=include_normal_scores,
    )
    stats = dataset_statistics(tokenized, mining)
    config = {
        "minerDepth": miner_config.tree_depth,
        "minerSimilarity": miner_config.similarity_threshold,
        "minerMaxChildren": miner_config.max_children,
        "maskRules": [r.name for r in miner_config.mask_rules],
        "contextBefore": bounds.before,
        "contextAfter": bounds.after,
        "attributeScope": attribute_scope,
        "thresholds": [str(t) for t in sweep.thresholds],
    }
    report = sweep_report(
        {i: s for i, s in scores.items() if tokenized.record(i).label.value == "anomalous"}
        if include_normal_scores
        else scores,
        sweep,
        stats,
        config=config,
        source=source,
    )
    return Analysis(
        corpus=tokenized,
        mining=mining,
        attribute_sets=attribute_sets,
        signatures=signatures,
        table=table,
        scores=scores,
        report=report,
    )
