"""logtaxon: template mining and anomaly-taxonomy scoring for labeled logs."""

from .context import ContextBounds, ContextSignature, build_all_contexts, build_context
from .ingest import (
    PRESETS,
    AttributePool,
    DatasetFormat,
    IngestSummary,
    SyntheticSpec,
    generate_synthetic,
    read_dataset,
    write_dataset,
)
from .model import (
    AnomalyKind,
    LabeledCorpus,
    Label,
    LogRecord,
    TokenSequence,
    Vocabulary,
    build_vocabulary,
    split_corpus,
)
from .pipeline import Analysis, analyze_corpus
from .report import (
    DEFAULT_THRESHOLDS,
    DatasetStats,
    TaxonomyReport,
    ThresholdRow,
    ThresholdSweep,
    classify,
    dataset_statistics,
    sweep_report,
)
from .scoring import (
    CountTable,
    ScoreTriple,
    build_count_table,
    score_attribute,
    score_context,
    score_corpus,
    score_template,
)
from .templating import (
    DEFAULT_MASK_RULES,
    MaskRule,
    MinerConfig,
    MiningResult,
    Template,
    TemplateMatcher,
    attributes_for_corpus,
    extract_attributes,
    load_forest,
    load_mask_rules,
    mine_templates,
    save_forest,
    tokenize,
    tokenize_corpus,
)

__version__ = "0.1.0"

__all__ = [
    "AnomalyKind",
    "Analysis",
    "AttributePool",
    "ContextBounds",
    "ContextSignature",
    "CountTable",
    "DEFAULT_MASK_RULES",
    "DEFAULT_THRESHOLDS",
    "DatasetFormat",
    "DatasetStats",
    "IngestSummary",
    "Label",
    "LabeledCorpus",
    "LogRecord",
    "MaskRule",
    "MinerConfig",
    "MiningResult",
    "PRESETS",
    "ScoreTriple",
    "SyntheticSpec",
    "TaxonomyReport",
    "Template",
    "TemplateMatcher",
    "ThresholdRow",
    "ThresholdSweep",
    "TokenSequence",
    "Vocabulary",
    "analyze_corpus",
    "attributes_for_corpus",
    "build_all_contexts",
    "build_context",
    "build_count_table",
    "build_vocabulary",
    "classify",
    "dataset_statistics",
    "extract_attributes",
    "generate_synthetic",
    "load_forest",
    "load_mask_rules",
    "mine_templates",
    "read_dataset",
    "save_forest",
    "score_attribute",
    "score_context",
    "score_corpus",
    "score_template",
    "split_corpus",
    "sweep_report",
    "tokenize",
    "tokenize_corpus",
    "write_dataset",
]
