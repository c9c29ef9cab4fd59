"""Command-line front end: analyze a dataset file or synthesize a demo one."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from .context import ContextBounds
from .ingest import (
    PRESETS,
    AttributePool,
    DatasetFormat,
    SyntheticSpec,
    generate_synthetic,
    read_dataset,
    write_dataset,
)
from .pipeline import Analysis, analyze_corpus
from .report import ThresholdSweep
from .templating import DEFAULT_MASK_RULES, MinerConfig, load_mask_rules, save_forest

OUT_DIR_ENV = "LOGTAXON_OUT_DIR"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logtaxon",
        description="Mine log templates and classify labeled anomalies by taxonomy class.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze a labeled dataset file")
    analyze.add_argument("--input", required=True, help="dataset file (plain or gzip)")
    analyze.add_argument(
        "--preset",
        "--format",
        dest="preset",
        choices=sorted(PRESETS),
        default="generic",
        help="line layout preset (default: generic)",
    )
    analyze.add_argument("--header-fields", type=int, help="override preset header width")
    analyze.add_argument("--label-field", type=int, help="override which header field is the label")
    analyze.add_argument("--normal-token", help="override the normal-label marker (default '-')")
    analyze.add_argument("--limit", type=int, help="parse at most this many records")
    analyze.add_argument("--context-before", type=int, default=10, metavar="N")
    analyze.add_argument("--context-after", type=int, default=0, metavar="N")
    analyze.add_argument(
        "--thresholds",
        default="0.6,0.7,0.8,0.9,1.0",
        help="comma-separated sweep, each in (0,1] (default: 0.6,0.7,0.8,0.9,1.0)",
    )
    analyze.add_argument(
        "--out-dir",
        default=os.environ.get(OUT_DIR_ENV, "logtaxon_out"),
        help=f"artifact directory (default: ${OUT_DIR_ENV} or logtaxon_out)",
    )
    analyze.add_argument("--threads", type=int, default=1)
    analyze.add_argument("--mask-rules", help="JSON file of token mask rules")
    analyze.add_argument("--miner-depth", type=int, default=4)
    analyze.add_argument("--miner-similarity", type=float, default=0.4)
    analyze.add_argument("--miner-max-children", type=int, default=100)
    analyze.add_argument(
        "--attribute-scope",
        choices=["global", "per-position"],
        default="global",
        help="pool attribute tokens corpus-wide or per template slot",
    )
    analyze.add_argument(
        "--dump-scores", action="store_true", help="also write per-message scores.csv"
    )
    analyze.add_argument(
        "--dump-contexts", action="store_true", help="also write per-message contexts.csv"
    )
    analyze.add_argument(
        "--score-normal",
        action="store_true",
        help="score normal messages too (affects score dump, not the report)",
    )

    synth = sub.add_parser("synth", help="generate a small synthetic labeled dataset")
    synth.add_argument("--out", required=True, help="output file ('.gz' for compressed)")
    synth.add_argument("--length", type=int, default=2000)
    synth.add_argument("--anomaly-rate", type=float, default=0.05)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--truth", help="also write {index: kind} ground truth as JSON")
    return parser


DEMO_SPEC_TEMPLATES = (
    "session opened for user <user> from <ip>",
    "request served in <ms> ms with status <status>",
    "disk <disk> health check passed",
)
DEMO_SPEC_POOLS = {
    "user": AttributePool("user", ("alice", "bob", "carol"), ("mallory",)),
    "ip": AttributePool("ip", ("10.0.0.1", "10.0.0.2", "192.168.1.9")),
    "ms": AttributePool("ms", ("12", "35", "310")),
    "status": AttributePool("status", ("200", "204"), ("503",)),
    "disk": AttributePool("disk", ("sda", "sdb")),
}
DEMO_SPEC_ANOMALY_TEMPLATES = (
    "kernel panic on cpu <ms>",
    "raid array degraded on disk <disk>",
)


def _run_synth(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        templates=DEMO_SPEC_TEMPLATES,
        pools=DEMO_SPEC_POOLS,
        anomaly_templates=DEMO_SPEC_ANOMALY_TEMPLATES,
        length=args.length,
        anomaly_rate=args.anomaly_rate,
        seed=args.seed,
    )
    corpus, truth = generate_synthetic(spec)
    write_dataset(corpus, args.out)
    if args.truth:
        with open(args.truth, "w", encoding="utf-8") as fh:
            json.dump({str(i): kind.value for i, kind in sorted(truth.items())}, fh, indent=2)
            fh.write("\n")
    print(
        f"wrote {len(corpus)} records ({corpus.anomalous_count} anomalous) to {args.out}",
        file=sys.stderr,
    )
    return 0


def _format_for(args: argparse.Namespace) -> DatasetFormat:
    base = PRESETS[args.preset]
    return DatasetFormat(
        header_fields=args.header_fields if args.header_fields is not None else base.header_fields,
        label_field=args.label_field if args.label_field is not None else base.label_field,
        normal_token=args.normal_token if args.normal_token is not None else base.normal_token,
    )


def _frac_fields(value: Fraction | None) -> tuple[str, str, str]:
    if value is None:
        return "", "", ""
    return f"{float(value):.6f}", str(value.numerator), str(value.denominator)


def _write_scores_csv(analysis: Analysis, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "index",
                "templateId",
                "alpha",
                "beta",
                "gamma",
                "alpha_num",
                "alpha_den",
                "beta_num",
                "beta_den",
                "gamma_num",
                "gamma_den",
            ]
        )
        for index in sorted(analysis.scores):
            triple = analysis.scores[index]
            a_f, a_n, a_d = _frac_fields(triple.template_score)
            b_f, b_n, b_d = _frac_fields(triple.attribute_score)
            g_f, g_n, g_d = _frac_fields(triple.context_score)
            writer.writerow(
                [index, analysis.mining.template_id(index), a_f, b_f, g_f, a_n, a_d, b_n, b_d, g_n, g_d]
            )


def _write_contexts_csv(analysis: Analysis, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "templateIds"])
        for index, sig in enumerate(analysis.signatures, start=1):
            writer.writerow([index, " ".join(str(t) for t in sorted(sig))])


def _run_analyze(args: argparse.Namespace) -> int:
    started = time.monotonic()
    fmt = _format_for(args)
    mask_rules = load_mask_rules(args.mask_rules) if args.mask_rules else DEFAULT_MASK_RULES
    miner = MinerConfig(
        tree_depth=args.miner_depth,
        similarity_threshold=args.miner_similarity,
        max_children=args.miner_max_children,
        mask_rules=mask_rules,
    )
    bounds = ContextBounds(before=args.context_before, after=args.context_after)
    sweep = ThresholdSweep.parse(args.thresholds)

    print(f"reading {args.input} ...", file=sys.stderr)
    corpus, summary = read_dataset(args.input, fmt, limit=args.limit)
    if summary.malformed_skipped:
        print(
            f"skipped {summary.malformed_skipped} malformed of {summary.lines_read} lines",
            file=sys.stderr,
        )
    print(
        f"parsed {summary.records} records "
        f"({corpus.anomalous_count} anomalous); mining templates ...",
        file=sys.stderr,
    )

    analysis = analyze_corpus(
        corpus,
        miner_config=miner,
        bounds=bounds,
        sweep=sweep,
        threads=args.threads,
        attribute_scope=args.attribute_scope,
        include_normal_scores=args.score_normal,
        source={
            "input": os.path.basename(args.input),
            "preset": args.preset,
            "limit": args.limit,
            "records": summary.records,
            "malformedSkipped": summary.malformed_skipped,
        },
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    marker = out_dir / "INCOMPLETE"
    marker.touch()
    try:
        (out_dir / "report.json").write_text(analysis.report.to_json(), encoding="utf-8")
        (out_dir / "report.csv").write_text(analysis.report.to_csv(), encoding="utf-8")
        save_forest(analysis.mining, analysis.corpus, str(out_dir / "templates.json"))
        if args.dump_scores:
            _write_scores_csv(analysis, out_dir / "scores.csv")
        if args.dump_contexts:
            _write_contexts_csv(analysis, out_dir / "contexts.csv")
    except OSError:
        print(f"failed writing artifacts; left {marker}", file=sys.stderr)
        raise
    marker.unlink()

    print(analysis.report.to_text(), end="")
    elapsed = time.monotonic() - started
    print(
        f"mined {len(analysis.mining.templates)} templates; "
        f"artifacts in {out_dir} ({elapsed:.1f}s)",
        file=sys.stderr,
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            return _run_synth(args)
        return _run_analyze(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
