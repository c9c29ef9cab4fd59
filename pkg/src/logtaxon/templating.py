"""Tokenization, masking, and fixed-depth prefix-tree template mining.

The miner clusters equal-length token sequences under a shallow routing tree
(root -> sequence length -> leading tokens -> cluster list) and merges a
message into the best cluster when the literal-token overlap ratio reaches a
configurable threshold. Mining runs in two passes: pass 1 grows and refines
clusters online, pass 2 re-assigns every message against the frozen forest so
early messages end up on the final shape of their template.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from sys import intern
from typing import Callable, Iterable, Sequence

from .model import LabeledCorpus, Label, LogRecord, TokenSequence, split_corpus

WILDCARD = "*"

_HAS_DIGIT = re.compile(r"\d")


@dataclass(frozen=True)
class MaskRule:
    """Rewrites a whole token when `pattern` matches it entirely.

    `replacement` is a regex expansion template, so a rule can keep part of
    the original token (e.g. a `key=` prefix) around the mask. Mask tokens use
    the angle-bracket-colon form `<:NAME:>`, which whitespace splitting can
    never produce on its own.
    """

    name: str
    pattern: str
    replacement: str

    @cached_property
    def regex(self) -> re.Pattern[str]:
        return re.compile(self.pattern)

    @cached_property
    def _expands(self) -> bool:
        # A replacement without backreferences is returned as-is; m.expand()
        # re-parses the template on every call and dominates masking time.
        return "\\" in self.replacement

    def apply(self, token: str) -> str | None:
        """Rewritten token if the rule matches, else None."""
        m = self.regex.fullmatch(token)
        if m is None:
            return None
        return m.expand(self.replacement) if self._expands else self.replacement


# Ordered by priority: dotted quads first, then plain decimals, so that the
# broad hex rule only sees tokens the earlier rules left alone.
DEFAULT_MASK_RULES: tuple[MaskRule, ...] = (
    MaskRule("IP", r"\d{1,3}(?:\.\d{1,3}){3}", "<:IP:>"),
    MaskRule("NUM", r"[-+]?\d+", "<:NUM:>"),
    MaskRule(
        "HEX",
        r"(?P<pre>[A-Za-z_][\w.\-]*=)?(?:0[xX])?[0-9a-fA-F]{2,}",
        r"\g<pre><:HEX:>",
    ),
)


def load_mask_rules(path: str) -> tuple[MaskRule, ...]:
    """Read mask rules from a JSON file: a list of {name, pattern, replacement?}.

    A missing replacement defaults to "<:NAME:>".
    """
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ValueError(f"mask rule file {path!r} must contain a JSON list")
    rules = []
    for entry in raw:
        name = entry["name"]
        rules.append(MaskRule(name, entry["pattern"], entry.get("replacement", f"<:{name}:>")))
    return tuple(rules)


def tokenize(content: str, rules: Sequence[MaskRule] = DEFAULT_MASK_RULES) -> TokenSequence:
    """Split content on whitespace runs and mask each token with the first matching rule."""
    out = []
    for token in content.split():
        for rule in rules:
            masked = rule.apply(token)
            if masked is not None:
                token = masked
                break
        out.append(intern(token))
    return tuple(out)


def tokenize_corpus(
    corpus: LabeledCorpus, rules: Sequence[MaskRule] = DEFAULT_MASK_RULES
) -> LabeledCorpus:
    """Return a copy of the corpus with every record's tokens filled in.

    Raw tokens repeat enormously across a log, so the masking outcome is
    memoized per distinct token instead of re-running the rules each time.
    """
    cache: dict[str, str] = {}

    def mask(token: str) -> str:
        try:
            return cache[token]
        except KeyError:
            pass
        out = token
        for rule in rules:
            masked = rule.apply(token)
            if masked is not None:
                out = masked
                break
        out = intern(out)
        cache[token] = out
        return out

    return split_corpus(
        r.with_tokens(tuple(mask(t) for t in r.content.split())) for r in corpus
    )


@dataclass(frozen=True)
class MinerConfig:
    """Knobs of the template miner.

    tree_depth counts the root, the length level, the token routing levels,
    and the leaf level, so the default of 4 routes on one leading token.
    Template counts on real datasets are sensitive to all three numeric
    parameters, which is why they are exposed here and on the CLI.
    """

    tree_depth: int = 4
    similarity_threshold: float = 0.4
    max_children: int = 100
    mask_rules: tuple[MaskRule, ...] = DEFAULT_MASK_RULES

    def __post_init__(self) -> None:
        if self.tree_depth < 2:
            raise ValueError("tree_depth must be at least 2")
        if not 0 < self.similarity_threshold <= 1:
            raise ValueError("similarity_threshold must be in (0, 1]")
        if self.max_children < 2:
            raise ValueError("max_children must be at least 2")

    @property
    def routing_levels(self) -> int:
        return max(0, self.tree_depth - 3)


@dataclass(frozen=True)
class Template:
    """A mined token pattern; wildcard positions hold WILDCARD ("*")."""

    id: int
    tokens: TokenSequence

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    @property
    def wildcard_positions(self) -> tuple[int, ...]:
        return tuple(i for i, tok in enumerate(self.tokens) if tok == WILDCARD)

    @property
    def num_wildcards(self) -> int:
        return len(self.wildcard_positions)


class _Cluster:
    __slots__ = ("id", "tokens")

    def __init__(self, cluster_id: int, tokens: list[str]):
        self.id = cluster_id
        self.tokens = tokens


class _Node:
    __slots__ = ("children", "clusters")

    def __init__(self) -> None:
        self.children: dict[object, _Node] = {}
        self.clusters: list[_Cluster] = []


def _similarity(template: Sequence[str], tokens: Sequence[str]) -> tuple[float, int]:
    """Literal-match ratio and wildcard count of a template against a message."""
    matches = 0
    wildcards = 0
    for t, w in zip(template, tokens):
        if t == WILDCARD:
            wildcards += 1
        elif t == w:
            matches += 1
    return matches / len(template), wildcards


class _Forest:
    """Length-partitioned routing tree holding template clusters at its leaves."""

    def __init__(self, config: MinerConfig):
        self.config = config
        self.root: dict[int, _Node] = {}
        self.clusters: list[_Cluster] = []

    def _routing_tokens(self, tokens: Sequence[str]) -> Sequence[str]:
        # Never route on the last token; it stays available for similarity.
        if not tokens:
            return ()
        return tokens[: min(self.config.routing_levels, len(tokens) - 1)]

    def _descend(self, tokens: Sequence[str]) -> _Node | None:
        node = self.root.get(len(tokens))
        if node is None:
            return None
        for token in self._routing_tokens(tokens):
            child = node.children.get(token) or node.children.get(WILDCARD)
            if child is None:
                return None
            node = child
        return node

    def _descend_for_insert(self, tokens: Sequence[str]) -> _Node:
        node = self.root.setdefault(len(tokens), _Node())
        for token in self._routing_tokens(tokens):
            if token in node.children:
                node = node.children[token]
                continue
            if _HAS_DIGIT.search(token) or token == WILDCARD:
                node = node.children.setdefault(WILDCARD, _Node())
                continue
            if WILDCARD in node.children:
                if len(node.children) < self.config.max_children:
                    node = node.children.setdefault(token, _Node())
                else:
                    node = node.children[WILDCARD]
            elif len(node.children) + 1 < self.config.max_children:
                node = node.children.setdefault(token, _Node())
            else:
                node = node.children.setdefault(WILDCARD, _Node())
        return node

    def _best_match(
        self, clusters: Sequence[_Cluster], tokens: Sequence[str]
    ) -> tuple[_Cluster | None, _Cluster | None]:
        """(cluster meeting the threshold, best cluster regardless) for a leaf."""
        best: _Cluster | None = None
        best_key = (-1.0, -1)
        for cluster in clusters:
            sim, wildcards = _similarity(cluster.tokens, tokens)
            key = (sim, wildcards)
            if key > best_key:
                best_key = key
                best = cluster
        if best is not None and best_key[0] >= self.config.similarity_threshold:
            return best, best
        return None, best

    def _new_cluster(self, tokens: Sequence[str], node: _Node) -> _Cluster:
        cluster = _Cluster(len(self.clusters) + 1, list(tokens))
        self.clusters.append(cluster)
        node.clusters.append(cluster)
        return cluster

    def learn(self, tokens: Sequence[str]) -> int:
        """Pass-1 step: match-or-create a cluster and refine its template."""
        if not tokens:
            node = self.root.setdefault(0, _Node())
            if node.clusters:
                return node.clusters[0].id
            return self._new_cluster((), node).id
        node = self._descend(tokens)
        matched = None
        if node is not None and node.clusters:
            matched, _ = self._best_match(node.clusters, tokens)
        if matched is None:
            return self._new_cluster(tokens, self._descend_for_insert(tokens)).id
        for i, (t, w) in enumerate(zip(matched.tokens, tokens)):
            if t != WILDCARD and t != w:
                matched.tokens[i] = WILDCARD
        return matched.id

    def assign(self, tokens: Sequence[str]) -> int:
        """Pass-2 step: pick a cluster from the frozen forest for a message.

        Falls back to the most similar leaf cluster when none reaches the
        threshold (possible once a template has gained wildcards after the
        message was first seen), so assignment is total for mined corpora.
        """
        node = self._descend(tokens)
        if node is None or not node.clusters:
            raise RuntimeError(
                f"no template cluster for a sequence of {len(tokens)} tokens; "
                "the forest was mined from a different corpus"
            )
        if not tokens:
            return node.clusters[0].id
        matched, best = self._best_match(node.clusters, tokens)
        chosen = matched or best
        assert chosen is not None
        return chosen.id

    def insert_frozen(self, cluster_id: int, tokens: Sequence[str]) -> None:
        """Place an existing template into the tree without refining anything."""
        node = self._descend_for_insert(tokens)
        cluster = _Cluster(cluster_id, list(tokens))
        self.clusters.append(cluster)
        node.clusters.append(cluster)


@dataclass(frozen=True)
class MiningResult:
    """Frozen templates plus the per-record assignment, aligned with corpus order."""

    templates: tuple[Template, ...]
    assignment: tuple[int, ...]

    def template(self, template_id: int) -> Template:
        tpl = self.templates[template_id - 1]
        assert tpl.id == template_id
        return tpl

    def template_id(self, index: int) -> int:
        """Template id of the record at 1-based corpus index."""
        return self.assignment[index - 1]

    def template_of(self, index: int) -> Template:
        return self.template(self.template_id(index))


def _ordered_map(fn: Callable, items: Sequence, threads: int) -> list:
    """Map fn over items, optionally on a thread pool, preserving order.

    Items are handed out as contiguous slices: one task per item would drown
    the work in executor overhead.
    """
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    step = max(1, -(-len(items) // (threads * 4)))
    slices = [items[i : i + step] for i in range(0, len(items), step)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(lambda chunk: [fn(x) for x in chunk], slices)
        return [x for part in parts for x in part]


def mine_templates(
    corpus: LabeledCorpus, config: MinerConfig | None = None, threads: int = 1
) -> MiningResult:
    """Mine templates over a tokenized corpus and assign one id per record.

    Deterministic for a fixed corpus order and config; the thread count only
    parallelizes the pure assignment pass and never changes the result.
    """
    config = config or MinerConfig()
    token_lists: list[TokenSequence] = []
    for rec in corpus:
        if rec.tokens is None:
            raise ValueError(f"record {rec.index} is not tokenized")
        token_lists.append(rec.tokens)

    forest = _Forest(config)
    for tokens in token_lists:  # order-dependent tree growth, keep sequential
        forest.learn(tokens)

    assignment = _ordered_map(forest.assign, token_lists, threads)
    templates = tuple(Template(c.id, tuple(intern(t) for t in c.tokens)) for c in forest.clusters)
    return MiningResult(templates, tuple(assignment))


def extract_attributes(record: LogRecord, template: Template) -> TokenSequence:
    """Tokens at the template's wildcard positions, in position order."""
    if record.tokens is None:
        raise ValueError(f"record {record.index} is not tokenized")
    if len(record.tokens) != len(template.tokens):
        raise RuntimeError(
            f"record {record.index} has {len(record.tokens)} tokens but template "
            f"{template.id} has {len(template.tokens)}; the miner must keep lengths equal"
        )
    return tuple(record.tokens[i] for i in template.wildcard_positions)


def attributes_for_corpus(
    corpus: LabeledCorpus, mining: MiningResult, threads: int = 1
) -> tuple[TokenSequence, ...]:
    """Attribute sets for every record, aligned with corpus order."""
    pairs = list(zip(corpus.records, (mining.template(t) for t in mining.assignment)))
    return tuple(_ordered_map(lambda p: extract_attributes(p[0], p[1]), pairs, threads))


FOREST_SCHEMA_VERSION = 1


def save_forest(mining: MiningResult, corpus: LabeledCorpus, path: str) -> None:
    """Write the frozen forest as JSON with per-label member counts."""
    counts = {t.id: [0, 0] for t in mining.templates}
    for rec, tid in zip(corpus.records, mining.assignment):
        counts[tid][0 if rec.label is Label.ANOMALOUS else 1] += 1
    doc = {
        "schemaVersion": FOREST_SCHEMA_VERSION,
        "templates": [
            {
                "id": t.id,
                "tokens": list(t.tokens),
                "anomalousCount": counts[t.id][0],
                "normalCount": counts[t.id][1],
            }
            for t in mining.templates
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_forest(path: str) -> tuple[tuple[Template, ...], dict[int, tuple[int, int]]]:
    """Read a saved forest; returns templates and {id: (anomalous, normal)} counts."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schemaVersion") != FOREST_SCHEMA_VERSION:
        raise ValueError(f"unsupported forest schema in {path!r}")
    templates = []
    counts = {}
    for entry in doc["templates"]:
        templates.append(Template(entry["id"], tuple(entry["tokens"])))
        counts[entry["id"]] = (entry["anomalousCount"], entry["normalCount"])
    templates.sort(key=lambda t: t.id)
    return tuple(templates), counts


class TemplateMatcher:
    """Assigns messages against a previously mined template set.

    Rebuilds the routing tree by inserting templates in id order; useful for
    inspecting or re-applying a saved forest to new data.
    """

    def __init__(self, templates: Iterable[Template], config: MinerConfig | None = None):
        self._forest = _Forest(config or MinerConfig())
        for tpl in sorted(templates, key=lambda t: t.id):
            self._forest.insert_frozen(tpl.id, tpl.tokens)

    def assign(self, tokens: Sequence[str]) -> int:
        return self._forest.assign(tokens)
