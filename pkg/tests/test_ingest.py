import gzip

import pytest

from logtaxon.ingest import (
    PRESETS,
    AttributePool,
    DatasetFormat,
    SyntheticSpec,
    generate_synthetic,
    read_dataset,
    write_dataset,
)
from logtaxon.model import AnomalyKind, Label

BGL_NORMAL = (
    "- 1117838570 2005.06.03 R02-M1-N0-C:J12-U11 2005-06-03-15.42.50.363779 "
    "R02-M1-N0-C:J12-U11 RAS KERNEL INFO instruction cache parity error corrected"
)
BGL_ALERT = (
    "KERNDTLB 1117869872 2005.06.04 R23-M0-NE-C:J05-U01 2005-06-04-00.24.32.432192 "
    "R23-M0-NE-C:J05-U01 RAS KERNEL FATAL data TLB error interrupt"
)
SPIRIT_ALERT = (
    "ATA 1104566771 2005.01.01 sadmin1 Jan 1 00:06:11 sadmin1/sadmin1 "
    "kernel: hda: drive not ready for command"
)


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def test_bgl_preset_splits_label_and_content(tmp_path):
    path = tmp_path / "bgl.log"
    write_lines(path, [BGL_NORMAL, BGL_ALERT])
    corpus, summary = read_dataset(str(path), PRESETS["bgl"])
    assert summary.records == 2 and summary.malformed_skipped == 0
    first, second = corpus.records
    assert first.label is Label.NORMAL
    assert first.content == "instruction cache parity error corrected"
    assert "RAS KERNEL INFO" in first.meta
    assert second.label is Label.ANOMALOUS
    assert second.content == "data TLB error interrupt"


def test_spirit_preset_keeps_component_in_content(tmp_path):
    path = tmp_path / "spirit.log"
    write_lines(path, [SPIRIT_ALERT])
    corpus, _ = read_dataset(str(path), PRESETS["spirit"])
    assert corpus.record(1).label is Label.ANOMALOUS
    assert corpus.record(1).content == "kernel: hda: drive not ready for command"


def test_generic_preset_one_header_field(tmp_path):
    path = tmp_path / "gen.log"
    write_lines(path, ["- all fine here", "FAIL something broke"])
    corpus, _ = read_dataset(str(path))
    assert corpus.normal_count == 1
    assert corpus.anomalous_count == 1
    assert corpus.record(2).content == "something broke"


def test_gzip_input_detected_by_magic_bytes(tmp_path):
    path = tmp_path / "data.log"  # deliberately no .gz suffix
    with gzip.open(path, "wt", encoding="utf-8") as fh:
        fh.write("- hello world\nX bad news\n")
    corpus, summary = read_dataset(str(path))
    assert summary.records == 2
    assert corpus.record(2).label is Label.ANOMALOUS


def test_malformed_lines_are_skipped_and_counted(tmp_path):
    path = tmp_path / "bgl.log"
    write_lines(path, [BGL_NORMAL, "", "too short", BGL_ALERT])
    corpus, summary = read_dataset(str(path), PRESETS["bgl"])
    assert summary.lines_read == 4
    assert summary.records == 2
    assert summary.malformed_skipped == 2
    assert len(corpus) == 2


def test_header_only_line_has_empty_content(tmp_path):
    path = tmp_path / "gen.log"
    write_lines(path, ["-"])
    corpus, summary = read_dataset(str(path))
    assert summary.malformed_skipped == 0
    assert corpus.record(1).content == ""


def test_limit_caps_records_not_lines(tmp_path):
    path = tmp_path / "gen.log"
    write_lines(path, ["", "- one", "- two", "- three"])
    corpus, summary = read_dataset(str(path), limit=2)
    assert summary.records == 2
    assert corpus.record(2).content == "two"


def test_smaller_limit_reads_a_prefix(tmp_path):
    path = tmp_path / "gen.log"
    write_lines(path, [f"- message {i}" for i in range(30)])
    small, _ = read_dataset(str(path), limit=10)
    large, _ = read_dataset(str(path), limit=25)
    assert [r.content for r in small] == [r.content for r in large][:10]


def test_empty_file_raises(tmp_path):
    path = tmp_path / "empty.log"
    path.write_text("")
    with pytest.raises(ValueError, match="empty corpus"):
        read_dataset(str(path))


def test_all_malformed_raises(tmp_path):
    path = tmp_path / "bad.log"
    write_lines(path, ["", ""])
    with pytest.raises(ValueError, match="empty corpus"):
        read_dataset(str(path), PRESETS["bgl"])


def test_write_read_round_trip(tmp_path):
    spec = SyntheticSpec(
        templates=("alpha <p> beta", "gamma delta"),
        pools={"p": AttributePool("p", ("u", "v"))},
        anomaly_templates=("omega failure",),
        length=50,
        anomaly_rate=0.2,
        seed=3,
    )
    corpus, _ = generate_synthetic(spec)
    path = tmp_path / "round.log.gz"
    write_dataset(corpus, str(path))
    back, summary = read_dataset(str(path))
    assert summary.malformed_skipped == 0
    assert len(back) == len(corpus)
    for a, b in zip(corpus, back):
        assert (a.label, a.content) == (b.label, b.content)


def test_format_validation():
    with pytest.raises(ValueError):
        DatasetFormat(header_fields=0)
    with pytest.raises(ValueError):
        DatasetFormat(header_fields=2, label_field=2)


# --- synthetic corpora -------------------------------------------------------


def demo_spec(**overrides):
    kwargs = dict(
        templates=("login by <who>", "heartbeat ok"),
        pools={"who": AttributePool("who", ("ann", "ben"), ("zed",))},
        anomaly_templates=("core dumped",),
        length=300,
        anomaly_rate=0.1,
        seed=11,
    )
    kwargs.update(overrides)
    return SyntheticSpec(**kwargs)


def test_synthetic_is_deterministic():
    a, truth_a = generate_synthetic(demo_spec())
    b, truth_b = generate_synthetic(demo_spec())
    assert truth_a == truth_b
    assert [(r.label, r.content) for r in a] == [(r.label, r.content) for r in b]


def test_synthetic_seed_changes_output():
    a, _ = generate_synthetic(demo_spec())
    b, _ = generate_synthetic(demo_spec(seed=12))
    assert [(r.label, r.content) for r in a] != [(r.label, r.content) for r in b]


def test_synthetic_length_and_truth_alignment():
    corpus, truth = generate_synthetic(demo_spec())
    assert len(corpus) == 300
    assert set(truth) == {r.index for r in corpus.anomalous_records()}
    assert all(kind in AnomalyKind for kind in truth.values())


def test_synthetic_zero_rate_is_all_normal():
    corpus, truth = generate_synthetic(demo_spec(anomaly_rate=0.0))
    assert corpus.anomalous_count == 0
    assert truth == {}


def test_synthetic_attribute_anomalies_use_anomalous_pool():
    corpus, truth = generate_synthetic(demo_spec(length=2000))
    attr_indices = [i for i, k in truth.items() if k is AnomalyKind.ATTRIBUTE]
    assert attr_indices, "expected at least one attribute anomaly at 10% rate"
    for i in attr_indices:
        assert "zed" in corpus.record(i).content


def test_synthetic_validation_errors():
    with pytest.raises(ValueError, match="unknown pool"):
        demo_spec(templates=("hello <nope>",))
    with pytest.raises(ValueError, match="anomaly_rate"):
        demo_spec(anomaly_rate=1.5)
    with pytest.raises(ValueError):
        SyntheticSpec(templates=(), length=10)
    with pytest.raises(ValueError, match="anomaly_rate > 0"):
        SyntheticSpec(templates=("just this",), anomaly_rate=0.5)
    with pytest.raises(ValueError, match="out of range"):
        demo_spec(sequence_patterns=(0, 5))


def test_sequence_patterns_drive_the_rhythm():
    spec = demo_spec(anomaly_rate=0.0, sequence_patterns=(0, 0, 1), length=6)
    corpus, _ = generate_synthetic(spec)
    contents = [r.content for r in corpus]
    assert contents[2] == "heartbeat ok"
    assert contents[5] == "heartbeat ok"
    assert all(c.startswith("login") for c in contents[:2])
