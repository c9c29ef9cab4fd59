from fractions import Fraction

import pytest

from logtaxon.context import ContextBounds, build_all_contexts
from logtaxon.model import Label, LogRecord, split_corpus
from logtaxon.scoring import (
    CountTable,
    build_count_table,
    score_attribute,
    score_context,
    score_corpus,
    score_template,
)


def labeled(*labels):
    """Corpus whose records only carry labels ('A'/'N'); content is irrelevant."""
    return split_corpus(
        LogRecord(i, Label.ANOMALOUS if ch == "A" else Label.NORMAL, "", "", tokens=())
        for i, ch in enumerate(labels, start=1)
    )


def table_for(corpus, assignment, attribute_sets=None, bounds=ContextBounds(2, 1), scope="global"):
    attribute_sets = attribute_sets or ((),) * len(corpus)
    signatures = build_all_contexts(assignment, bounds)
    return build_count_table(corpus, assignment, attribute_sets, signatures, scope), signatures


# --- template score ----------------------------------------------------------


def test_template_score_all_anomalous_is_exactly_one():
    table = CountTable({7: (5, 0)}, {}, {})
    assert score_template(table, 7) == Fraction(1)


def test_template_score_mixed():
    table = CountTable({1: (3, 1)}, {}, {})
    assert score_template(table, 1) == Fraction(3, 4)


def test_template_score_counts_from_corpus():
    corpus = labeled("A", "A", "N")
    table, _ = table_for(corpus, [4, 4, 4])
    assert table.template_counts[4] == (2, 1)
    assert score_template(table, 4) == Fraction(2, 3)


def test_template_score_unknown_id():
    table = CountTable({}, {}, {})
    with pytest.raises(KeyError):
        score_template(table, 1)


# --- attribute score ---------------------------------------------------------


def test_attribute_score_is_max_over_tokens():
    table = CountTable({}, {"a": (3, 7), "b": (9, 1)}, {})
    assert score_attribute(table, ("a", "b")) == Fraction(9, 10)


def test_attribute_score_single_token():
    table = CountTable({}, {"x": (2, 8)}, {})
    assert score_attribute(table, ("x",)) == Fraction(1, 5)


def test_attribute_score_absent_without_attributes():
    table = CountTable({}, {}, {})
    assert score_attribute(table, ()) is None


def test_attribute_counting_is_per_occurrence():
    # 'x' twice in one anomalous message and once in a normal one: 2/3, not 1/2.
    corpus = labeled("A", "N")
    table, _ = table_for(corpus, [1, 1], attribute_sets=(("x", "x"), ("x", "y")))
    assert table.attribute_counts["x"] == (2, 1)
    assert score_attribute(table, ("x", "x")) == Fraction(2, 3)


def test_attribute_scope_global_pools_across_templates():
    corpus = labeled("A", "N", "N")
    table, _ = table_for(corpus, [1, 1, 2], attribute_sets=(("x",), ("x",), ("x",)))
    assert score_attribute(table, ("x",)) == Fraction(1, 3)


def test_attribute_scope_per_position_separates_slots():
    corpus = labeled("A", "N", "N")
    table, _ = table_for(
        corpus,
        [1, 1, 2],
        attribute_sets=(("x",), ("x",), ("x",)),
        scope="per-position",
    )
    assert table.attribute_counts[(1, 0, "x")] == (1, 1)
    assert score_attribute(table, ("x",), template_id=1) == Fraction(1, 2)
    assert score_attribute(table, ("x",), template_id=2) == Fraction(0)


def test_per_position_scoring_requires_template_id():
    table = CountTable({}, {(1, 0, "x"): (1, 1)}, {}, attribute_scope="per-position")
    with pytest.raises(ValueError):
        score_attribute(table, ("x",))


# --- context score -----------------------------------------------------------


def test_context_score_all_anomalous():
    sig = frozenset({1, 2})
    table = CountTable({}, {}, {sig: (4, 0)})
    assert score_context(table, sig) == Fraction(1)


def test_context_score_mixed():
    sig = frozenset({3})
    table = CountTable({}, {}, {sig: (1, 3)})
    assert score_context(table, sig) == Fraction(1, 4)


def test_inserted_message_gets_unique_context():
    # Templates cycle 1,2,3; one extra message (template 4) lands at
    # position 5 and is the only record seeing {1,2,3} around itself.
    assignment = [1, 2, 3, 1, 4, 2, 3, 1, 2, 3]
    corpus = labeled("N", "N", "N", "N", "A", "N", "N", "N", "N", "N")
    table, sigs = table_for(corpus, assignment, bounds=ContextBounds(before=2, after=1))
    expected = [
        {2},
        {1, 3},
        {1, 2},
        {2, 3, 4},
        {1, 2, 3},
        {1, 3, 4},
        {1, 2, 4},
        {2, 3},
        {1, 3},
        {1, 2},
    ]
    assert [set(s) for s in sigs] == expected
    assert score_context(table, sigs[4]) == Fraction(1)
    # The repeated rhythm signatures stay fully normal.
    assert score_context(table, sigs[2]) == Fraction(0)
    assert table.context_counts[frozenset({1, 2})] == (0, 2)


def test_context_score_unknown_signature():
    table = CountTable({}, {}, {})
    with pytest.raises(KeyError):
        score_context(table, frozenset({1}))


# --- whole-corpus scoring ------------------------------------------------------


def test_score_corpus_covers_anomalous_records_only():
    corpus = labeled("N", "A", "N", "A")
    table, sigs = table_for(corpus, [1, 1, 2, 2])
    scores = score_corpus(corpus, table, [1, 1, 2, 2], ((),) * 4, sigs)
    assert sorted(scores) == [2, 4]
    assert scores[2].template_score == Fraction(1, 2)
    assert scores[2].attribute_score is None


def test_score_corpus_include_normal():
    corpus = labeled("N", "A")
    table, sigs = table_for(corpus, [1, 1])
    scores = score_corpus(corpus, table, [1, 1], ((), ()), sigs, include_normal=True)
    assert sorted(scores) == [1, 2]


def test_count_conservation():
    corpus = labeled("A", "N", "A", "N", "N")
    assignment = [1, 2, 1, 2, 1]
    attrs = (("p",), ("q",), ("p",), ("p",), ("q",))
    table, sigs = table_for(corpus, assignment, attribute_sets=attrs)
    for counts, total in [
        (table.template_counts, 5),
        (table.context_counts, 5),
        (table.attribute_counts, 5),  # one token per record here
    ]:
        assert sum(a + n for a, n in counts.values()) == total
    anom = sum(a for a, _ in table.template_counts.values())
    assert anom == corpus.anomalous_count


def test_build_count_table_checks_alignment():
    corpus = labeled("A", "N")
    with pytest.raises(ValueError):
        build_count_table(corpus, [1], ((), ()), (frozenset(), frozenset()))


def test_build_count_table_rejects_unknown_scope():
    corpus = labeled("A")
    with pytest.raises(ValueError):
        build_count_table(corpus, [1], ((),), (frozenset(),), "per-template")
