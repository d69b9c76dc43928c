"""Corpus mining: turn raw text into tag-labeled infilling examples.

Seven heuristics produce examples. Marker-driven tags (cause/effect/contrast)
replace a discourse-marked clause; the descriptive tag replaces clauses that
contain known adjectives; idioms are matched with possessive-aware regexes;
biography examples come from post-modifier records; rephrase pairs are
filtered by similarity, edit distance and lexical complexity.

All mined text is stored in tokenized form (token surfaces joined by single
spaces) so substituting the answer spans back into the tagged text
reproduces the tokenized source sentence exactly.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from typing import Callable, Iterable, Sequence

from .align import word_edit_distance
from .clauses import Clause, extract_clauses
from .keywords import extract_keywords
from .lexicon import FrequencyLexicon, count_low_frequency_words
from .resources import default_idioms, marker_lines, read_lines, resource_path
from .scoring import SimilarityScorer
from .tags import TagKind, surface_token
from .tokens import Token, tokenize
from .sentences import split_sentences

__all__ = [
    "MarkerTable",
    "IdiomPattern",
    "MinedExample",
    "MiningConfig",
    "DatasetStats",
    "DatasetError",
    "load_marker_table",
    "compile_idiom_pattern",
    "mine_marker_examples",
    "mine_descriptive",
    "mine_idiom",
    "convert_postmodifier",
    "build_para_example",
    "build_adjective_lexicon",
    "compute_stats",
    "split_dataset",
    "mine_documents",
    "read_examples",
    "write_examples",
    "atomic_write_text",
]

log = logging.getLogger(__name__)


# --- domain types -----------------------------------------------------------


@dataclass(frozen=True)
class MarkerTable:
    kind: TagKind
    markers: tuple[str, ...]

    def __post_init__(self):
        if not self.markers:
            raise ValueError("marker table must not be empty")


@dataclass(frozen=True)
class IdiomPattern:
    raw: str
    pattern: re.Pattern


@dataclass(frozen=True)
class MinedExample:
    id: str
    tag: TagKind
    context: str | None
    tagged_text: str
    answer_spans: tuple[str, ...]
    source: dict
    keywords: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "tag": self.tag.value,
            "context": self.context,
            "tagged_text": self.tagged_text,
            "answer_spans": list(self.answer_spans),
            "source": self.source,
            "keywords": list(self.keywords),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MinedExample":
        try:
            return cls(
                id=str(data["id"]),
                tag=TagKind(data["tag"]),
                context=data.get("context"),
                tagged_text=data["tagged_text"],
                answer_spans=tuple(data["answer_spans"]),
                source=dict(data.get("source", {})),
                keywords=tuple(data.get("keywords", ())),
            )
        except (KeyError, ValueError) as exc:
            raise DatasetError(f"malformed record {data.get('id', '<no id>')!r}: {exc}") from exc


@dataclass(frozen=True)
class MiningConfig:
    max_keywords: int = 2
    keyword_max_ngram: int = 2  # longer keywords tend to swallow the clause
    keyword_top_n: int = 10
    min_descriptive_span_tokens: int = 5  # spans must be strictly longer
    max_example_tokens: int = 300
    scorer_low: float = 0.7
    scorer_high: float = 0.9
    min_edit_distance: int = 5
    low_frequency_rank: int = 20_000


@dataclass(frozen=True)
class DatasetStats:
    per_tag: dict
    split_totals: dict
    token_count: int
    mean_example_words: float

    def to_dict(self) -> dict:
        return {
            "per_tag": self.per_tag,
            "split_totals": self.split_totals,
            "token_count": self.token_count,
            "mean_example_words": round(self.mean_example_words, 2),
        }


class DatasetError(ValueError):
    """Raised for unreadable or malformed dataset records."""


# --- resource construction --------------------------------------------------

_MARKER_FILES = {
    TagKind.CAUSE: ("cause",),
    TagKind.EFFECT: ("effect",),
    TagKind.CNTRA: ("concession", "comparison"),
}


def load_marker_table(kind: TagKind, path: str | Path | None = None) -> MarkerTable:
    """Bundled marker table for a kind, or one marker per line from ``path``."""
    if path is not None:
        markers = tuple(m.lower() for m in read_lines(Path(path).read_text(encoding="utf-8")))
    else:
        names = _MARKER_FILES.get(kind)
        if names is None:
            raise ValueError(f"no marker table for tag {kind.value}")
        markers = tuple(m for name in names for m in marker_lines(name))
    return MarkerTable(kind, markers)


_POSSESSIVE_SLOT = r"(?:my|your|his|her|its|our|their|one's|[A-Za-z]+['’]s)"


def compile_idiom_pattern(raw_idiom: str) -> IdiomPattern:
    """Case-insensitive idiom matcher with possessive-slot expansion.

    The placeholder word "one's" matches any possessive pronoun as well as
    ``<word>'s``; whitespace runs are tolerated.
    """
    raw = raw_idiom.strip()
    if not raw:
        raise ValueError("idiom must be non-empty")
    parts = []
    for word in raw.split():
        if word.lower() in ("one's", "one’s"):
            parts.append(_POSSESSIVE_SLOT)
        else:
            parts.append(re.escape(word).replace(r"\'", "['’]"))
    pattern = re.compile(r"\b" + r"\s+".join(parts) + r"\b", re.IGNORECASE)
    return IdiomPattern(raw, pattern)


def load_idiom_patterns(path: str | Path | None = None) -> list[IdiomPattern]:
    if path is not None:
        idioms = read_lines(Path(path).read_text(encoding="utf-8"))
    else:
        idioms = default_idioms()
    return [compile_idiom_pattern(idiom) for idiom in idioms]


_DEFAULT_ADJ_SUFFIXES = ("ful", "ous", "ive", "able", "ible", "less", "ish", "ic", "al")


def build_adjective_lexicon(
    freq: FrequencyLexicon,
    suffix_rules: Sequence[str] | None = None,
    exclusions: Iterable[str] | None = None,
    min_length: int = 5,
) -> frozenset[str]:
    """Descriptive-adjective set: frequency-list words matching a suffix rule."""
    suffixes = tuple(suffix_rules) if suffix_rules is not None else _DEFAULT_ADJ_SUFFIXES
    if exclusions is None:
        exclusions = read_lines(resource_path("adjective_exclusions.txt").read_text(encoding="utf-8"))
    excluded = {w.lower() for w in exclusions}
    out = set()
    for word, _count in freq.entries:
        if len(word) < min_length or not word.isalpha():
            continue
        if word in excluded:
            continue
        if any(word.endswith(suf) for suf in suffixes):
            out.add(word)
    return frozenset(out)


# --- example construction ---------------------------------------------------


def _example_id(corpus: str, document: str, offset: int, tag: TagKind, extra: str = "") -> str:
    key = f"{corpus}\x00{document}\x00{offset}\x00{tag.value}\x00{extra}"
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]


def _join(tokens: Iterable[Token | str]) -> str:
    return " ".join(t.surface if isinstance(t, Token) else t for t in tokens)


def _token_range(tokens: Sequence[Token], start: int, end: int) -> tuple[int, int]:
    """Indices of tokens fully inside the char range [start, end)."""
    lo = 0
    while lo < len(tokens) and tokens[lo].start < start:
        lo += 1
    hi = lo
    while hi < len(tokens) and tokens[hi].end <= end:
        hi += 1
    return lo, hi


def _word_count(text: str | None) -> int:
    if not text:
        return 0
    return sum(1 for t in tokenize(text) if t.is_word)


def _example_token_total(context: str | None, tagged_text: str, spans: Sequence[str]) -> int:
    total = len(tokenize(context)) if context else 0
    total += len(tokenize(tagged_text))
    total += sum(len(tokenize(s)) for s in spans)
    return total


Keyworder = Callable[[str], list[str]]


def default_keyworder(config: MiningConfig = MiningConfig()) -> Keyworder:
    def keyworder(text: str) -> list[str]:
        candidates = extract_keywords(
            text, max_ngram=config.keyword_max_ngram, top_n=config.keyword_top_n
        )
        return [c.phrase for c in candidates]

    return keyworder


def _select_keyword_ranges(
    tokens: Sequence[Token],
    lo: int,
    hi: int,
    protected: set[int],
    phrases: Sequence[str],
    max_keywords: int,
) -> list[tuple[int, int]]:
    """Map keyword phrases onto unique, non-overlapping token ranges.

    A phrase is used only if it occurs exactly once inside [lo, hi) and does
    not touch protected tokens (the leading marker, matched adjectives).
    """
    surfaces = [t.surface.lower() for t in tokens]
    chosen: list[tuple[int, int]] = []
    for phrase in phrases:
        if len(chosen) >= max_keywords:
            break
        words = phrase.split(" ")
        hits = []
        for i in range(lo, hi - len(words) + 1):
            if surfaces[i : i + len(words)] == words:
                hits.append((i, i + len(words)))
        if len(hits) != 1:
            continue
        a, b = hits[0]
        if any(k in protected for k in range(a, b)):
            continue
        if any(not (b <= ca or cb <= a) for ca, cb in chosen):
            continue
        chosen.append((a, b))
    chosen.sort()
    return chosen


def _carve(
    tokens: Sequence[Token],
    lo: int,
    hi: int,
    keyword_ranges: Sequence[tuple[int, int]],
    tag: TagKind,
) -> tuple[str, list[str], list[str]] | None:
    """Replace tokens[lo:hi] by tag tokens around preserved keywords.

    Returns (tagged_text, answer_spans, keyword_surfaces); None when the
    region would produce no answer span at all.
    """
    token_surface = surface_token(tag)
    pieces: list[tuple[int, int]] = []
    cursor = lo
    for a, b in keyword_ranges:
        pieces.append((cursor, a))
        cursor = b
    pieces.append((cursor, hi))

    spans = []
    parts: list[str] = []
    for i, (a, b) in enumerate(pieces):
        if b > a:
            spans.append(_join(tokens[a:b]))
            parts.append(token_surface)
        if i < len(keyword_ranges):
            ka, kb = keyword_ranges[i]
            parts.append(_join(tokens[ka:kb]))
    if not spans:
        return None

    tagged_tokens = [t.surface for t in tokens[:lo]] + parts + [t.surface for t in tokens[hi:]]
    keyword_surfaces = [_join(tokens[a:b]) for a, b in keyword_ranges]
    return " ".join(tagged_tokens), spans, keyword_surfaces


def _tokenized(text: str | None) -> str | None:
    if text is None:
        return None
    return _join(tokenize(text))


@dataclass(frozen=True)
class _DocContext:
    corpus: str
    document: str


def mine_marker_examples(
    sentences: Sequence[str],
    table: MarkerTable,
    keyworder: Keyworder | None = None,
    config: MiningConfig = MiningConfig(),
    provenance: _DocContext | None = None,
) -> list[MinedExample]:
    """Examples for clauses led by a discourse marker from ``table``.

    The matched clause (marker included) becomes the answer region; keywords
    extracted from the clause stay literal, bracketed by tag tokens.
    """
    keyworder = keyworder or default_keyworder(config)
    prov = provenance or _DocContext("adhoc", "adhoc")
    out: list[MinedExample] = []
    for idx, sentence in enumerate(sentences):
        tokens = tokenize(sentence)
        if not tokens:
            continue
        clauses = extract_clauses(sentence, markers=table.markers)
        for clause in clauses:
            if clause.leading_marker is None:
                continue
            lo, hi = _token_range(tokens, clause.start, clause.end)
            if hi <= lo:
                continue
            marker_len = len(tokenize(clause.leading_marker))
            protected = set(range(lo, min(lo + marker_len, hi)))
            phrases = keyworder(clause.text)
            ranges = _select_keyword_ranges(tokens, lo, hi, protected, phrases, config.max_keywords)
            carved = _carve(tokens, lo, hi, ranges, table.kind)
            if carved is None:
                continue
            tagged_text, spans, kw = carved
            context = _tokenized(sentences[idx - 1]) if idx > 0 else None
            if _example_token_total(context, tagged_text, spans) > config.max_example_tokens:
                continue
            out.append(
                MinedExample(
                    id=_example_id(prov.corpus, prov.document, clause.start, table.kind, f"s{idx}"),
                    tag=table.kind,
                    context=context,
                    tagged_text=tagged_text,
                    answer_spans=tuple(spans),
                    source={
                        "corpus": prov.corpus,
                        "document": prov.document,
                        "sentence": idx,
                        "marker": clause.leading_marker,
                    },
                    keywords=tuple(kw),
                )
            )
    return out


def mine_descriptive(
    sentences: Sequence[str],
    adjectives: frozenset[str] | set[str],
    keyworder: Keyworder | None = None,
    config: MiningConfig = MiningConfig(),
    provenance: _DocContext | None = None,
) -> list[MinedExample]:
    """Examples for clauses containing known descriptive adjectives.

    Only spans strictly longer than the configured token minimum survive.
    """
    keyworder = keyworder or default_keyworder(config)
    prov = provenance or _DocContext("adhoc", "adhoc")
    out: list[MinedExample] = []
    for idx, sentence in enumerate(sentences):
        tokens = tokenize(sentence)
        if not tokens:
            continue
        for clause in extract_clauses(sentence):
            lo, hi = _token_range(tokens, clause.start, clause.end)
            adj_positions = {
                k for k in range(lo, hi) if tokens[k].surface.lower() in adjectives
            }
            if not adj_positions:
                continue
            if hi - lo <= config.min_descriptive_span_tokens:
                continue
            phrases = keyworder(clause.text)
            ranges = _select_keyword_ranges(tokens, lo, hi, adj_positions, phrases, config.max_keywords)
            carved = _carve(tokens, lo, hi, ranges, TagKind.DESCP)
            if carved is None:
                continue
            tagged_text, spans, kw = carved
            context = _tokenized(sentences[idx - 1]) if idx > 0 else None
            if _example_token_total(context, tagged_text, spans) > config.max_example_tokens:
                continue
            out.append(
                MinedExample(
                    id=_example_id(prov.corpus, prov.document, clause.start, TagKind.DESCP, f"s{idx}"),
                    tag=TagKind.DESCP,
                    context=context,
                    tagged_text=tagged_text,
                    answer_spans=tuple(spans),
                    source={"corpus": prov.corpus, "document": prov.document, "sentence": idx},
                    keywords=tuple(kw),
                )
            )
    return out


def mine_idiom(
    sentences: Sequence[str],
    patterns: Sequence[IdiomPattern],
    config: MiningConfig = MiningConfig(),
    provenance: _DocContext | None = None,
) -> list[MinedExample]:
    """One example per idiom match; the matched surface is the single span."""
    prov = provenance or _DocContext("adhoc", "adhoc")
    out: list[MinedExample] = []
    for idx, sentence in enumerate(sentences):
        tokens = tokenize(sentence)
        if not tokens:
            continue
        for pattern in patterns:
            for m in pattern.pattern.finditer(sentence):
                lo, hi = _token_range(tokens, m.start(), m.end())
                if hi <= lo:
                    continue
                carved = _carve(tokens, lo, hi, [], TagKind.IDIOM)
                if carved is None:
                    continue
                tagged_text, spans, _ = carved
                context = _tokenized(sentences[idx - 1]) if idx > 0 else None
                if _example_token_total(context, tagged_text, spans) > config.max_example_tokens:
                    continue
                out.append(
                    MinedExample(
                        id=_example_id(
                            prov.corpus, prov.document, m.start(), TagKind.IDIOM, f"s{idx}:{pattern.raw}"
                        ),
                        tag=TagKind.IDIOM,
                        context=context,
                        tagged_text=tagged_text,
                        answer_spans=tuple(spans),
                        source={
                            "corpus": prov.corpus,
                            "document": prov.document,
                            "sentence": idx,
                            "idiom": pattern.raw,
                        },
                    )
                )
    return out


def convert_postmodifier(
    record: dict,
    config: MiningConfig = MiningConfig(),
    provenance: _DocContext | None = None,
) -> MinedExample | None:
    """Biography example from a {sentence, post_modifier, context} record.

    The post-modifier must occur exactly once; otherwise the record is
    skipped with a warning.
    """
    prov = provenance or _DocContext("post-modifiers", record.get("id", "record"))
    sentence = record["sentence"]
    post_modifier = record["post_modifier"]
    tokens = tokenize(sentence)
    surfaces = [t.surface for t in tokens]
    pm_tokens = [t.surface for t in tokenize(post_modifier)]
    if not pm_tokens:
        log.warning("empty post-modifier; record %s skipped", prov.document)
        return None
    hits = [
        i
        for i in range(len(surfaces) - len(pm_tokens) + 1)
        if surfaces[i : i + len(pm_tokens)] == pm_tokens
    ]
    if len(hits) != 1:
        log.warning(
            "post-modifier %r %s in sentence; record %s skipped",
            post_modifier,
            "not found" if not hits else "ambiguous",
            prov.document,
        )
        return None
    lo = hits[0]
    hi = lo + len(pm_tokens)
    carved = _carve(tokens, lo, hi, [], TagKind.BIO)
    if carved is None:
        return None
    tagged_text, spans, _ = carved
    context = _tokenized(record.get("context"))
    if _example_token_total(context, tagged_text, spans) > config.max_example_tokens:
        return None
    return MinedExample(
        id=_example_id(prov.corpus, prov.document, lo, TagKind.BIO),
        tag=TagKind.BIO,
        context=context,
        tagged_text=tagged_text,
        answer_spans=tuple(spans),
        source={"corpus": prov.corpus, "document": prov.document},
    )


def build_para_example(
    pair: dict,
    scorer: SimilarityScorer,
    lexicon: FrequencyLexicon,
    config: MiningConfig = MiningConfig(),
    provenance: _DocContext | None = None,
) -> MinedExample | None:
    """Rephrase example from a {source, target[, score]} pair, or None.

    Kept iff the similarity score falls strictly inside the configured band,
    the word-level edit distance is at least the minimum, and the target has
    more low-frequency words than the source.
    """
    prov = provenance or _DocContext("pairs", pair.get("id", "pair"))
    source, target = pair["source"], pair["target"]
    if not source.strip() or not target.strip():
        return None
    similarity = scorer.score(source, target, pair.get("score"))
    if not (config.scorer_low < similarity < config.scorer_high):
        return None
    src_tokens = tokenize(source)
    tgt_tokens = tokenize(target)
    distance = word_edit_distance(
        [t.surface for t in src_tokens], [t.surface for t in tgt_tokens]
    )
    if distance < config.min_edit_distance:
        return None
    low_src = count_low_frequency_words(src_tokens, lexicon, config.low_frequency_rank)
    low_tgt = count_low_frequency_words(tgt_tokens, lexicon, config.low_frequency_rank)
    if low_tgt <= low_src:
        return None
    token = surface_token(TagKind.PARA)
    tagged_text = f"{token} {_join(src_tokens)} {token}"
    spans = (_join(tgt_tokens),)
    if _example_token_total(None, tagged_text, spans) > config.max_example_tokens:
        return None
    return MinedExample(
        id=_example_id(prov.corpus, prov.document, 0, TagKind.PARA, source[:64]),
        tag=TagKind.PARA,
        context=None,
        tagged_text=tagged_text,
        answer_spans=spans,
        source={"corpus": prov.corpus, "document": prov.document, "similarity": round(similarity, 4)},
    )


# --- dataset plumbing --------------------------------------------------------


def read_examples(path: str | Path) -> list[MinedExample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON") from exc
            out.append(MinedExample.from_dict(data))
    return out


def atomic_write_text(path: str | Path, text: str):
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_examples(path: str | Path, examples: Iterable[MinedExample]):
    lines = [json.dumps(ex.to_dict(), ensure_ascii=False, sort_keys=True) for ex in examples]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def _validate_example(ex: MinedExample):
    from .codec import parse_markup  # local import: codec depends on tags only

    parsed = parse_markup(ex.tagged_text)
    if parsed.slot_count != len(ex.answer_spans):
        raise DatasetError(
            f"malformed record {ex.id}: {parsed.slot_count} slots vs {len(ex.answer_spans)} spans"
        )


def _example_word_length(ex: MinedExample) -> int:
    tagged_words = 0
    from .tags import find_tag_tokens

    cursor = 0
    for start, end, _ in find_tag_tokens(ex.tagged_text):
        tagged_words += _word_count(ex.tagged_text[cursor:start])
        cursor = end
    tagged_words += _word_count(ex.tagged_text[cursor:])
    return (
        _word_count(ex.context)
        + tagged_words
        + sum(_word_count(span) for span in ex.answer_spans)
    )


def compute_stats(splits: dict[str, list[MinedExample]]) -> DatasetStats:
    """Exact per-tag counts, token total and mean example length in words."""
    per_tag: dict[str, dict[str, int]] = {}
    split_totals: dict[str, int] = {}
    token_count = 0
    word_lengths: list[int] = []
    for split, examples in splits.items():
        split_totals[split] = len(examples)
        for ex in examples:
            _validate_example(ex)
            row = per_tag.setdefault(ex.tag.value, {s: 0 for s in splits})
            row[split] = row.get(split, 0) + 1
            words = _example_word_length(ex)
            word_lengths.append(words)
            token_count += words
    mean = sum(word_lengths) / len(word_lengths) if word_lengths else 0.0
    return DatasetStats(
        per_tag={tag: dict(v) for tag, v in sorted(per_tag.items())},
        split_totals=dict(sorted(split_totals.items())),
        token_count=token_count,
        mean_example_words=mean,
    )


def split_dataset(
    examples: Sequence[MinedExample],
    per_tag_dev: int = 500,
    per_tag_test: int = 500,
    seed: int = 0,
) -> dict[str, list[MinedExample]]:
    """Deterministic per-tag train/dev/test split.

    Tags with fewer examples than dev+test fall back to a 10%/10% split
    (at least one each when there are three or more examples).
    """
    by_tag: dict[TagKind, list[MinedExample]] = {}
    for ex in examples:
        by_tag.setdefault(ex.tag, []).append(ex)

    splits: dict[str, list[MinedExample]] = {"train": [], "dev": [], "test": []}
    for tag in sorted(by_tag, key=lambda t: t.value):
        pool = sorted(by_tag[tag], key=lambda e: e.id)
        Random(f"{seed}:{tag.value}").shuffle(pool)
        n = len(pool)
        if n >= per_tag_dev + per_tag_test:
            n_dev, n_test = per_tag_dev, per_tag_test
        elif n >= 3:
            n_dev = n_test = max(1, n // 10)
        else:
            n_dev = n_test = 0
        splits["dev"].extend(pool[:n_dev])
        splits["test"].extend(pool[n_dev : n_dev + n_test])
        splits["train"].extend(pool[n_dev + n_test :])
    for part in splits.values():
        part.sort(key=lambda e: e.id)
    return splits


# --- whole-corpus orchestration ----------------------------------------------


@dataclass
class MiningResources:
    marker_tables: dict[TagKind, MarkerTable] = field(default_factory=dict)
    idiom_patterns: list[IdiomPattern] = field(default_factory=list)
    adjectives: frozenset[str] = frozenset()
    keyworder: Keyworder | None = None
    config: MiningConfig = MiningConfig()


def default_resources(
    tags: Sequence[TagKind],
    config: MiningConfig = MiningConfig(),
    lexicon: FrequencyLexicon | None = None,
) -> MiningResources:
    res = MiningResources(config=config, keyworder=default_keyworder(config))
    for kind in tags:
        if kind in _MARKER_FILES:
            res.marker_tables[kind] = load_marker_table(kind)
    if TagKind.IDIOM in tags:
        res.idiom_patterns = load_idiom_patterns()
    if TagKind.DESCP in tags:
        from .lexicon import load_default_lexicon

        res.adjectives = build_adjective_lexicon(lexicon or load_default_lexicon())
    return res


def _mine_one_document(
    doc_id: str,
    text: str,
    corpus: str,
    tags: Sequence[TagKind],
    res: MiningResources,
) -> list[MinedExample]:
    sentences = [s.text for s in split_sentences(text)]
    prov = _DocContext(corpus, doc_id)
    out: list[MinedExample] = []
    for kind in tags:
        if kind in res.marker_tables:
            out.extend(
                mine_marker_examples(sentences, res.marker_tables[kind], res.keyworder, res.config, prov)
            )
        elif kind is TagKind.DESCP:
            out.extend(mine_descriptive(sentences, res.adjectives, res.keyworder, res.config, prov))
        elif kind is TagKind.IDIOM:
            out.extend(mine_idiom(sentences, res.idiom_patterns, res.config, prov))
    return out


def mine_documents(
    documents: Sequence[tuple[str, str]],
    tags: Sequence[TagKind],
    resources: MiningResources,
    corpus: str = "corpus",
    workers: int = 1,
) -> list[MinedExample]:
    """Mine (doc_id, text) pairs; output is sorted by id, so results are
    byte-identical regardless of worker count."""
    if workers <= 1:
        results = [
            _mine_one_document(doc_id, text, corpus, tags, resources)
            for doc_id, text in documents
        ]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda item: _mine_one_document(item[0], item[1], corpus, tags, resources),
                    documents,
                )
            )
    merged = [ex for chunk in results for ex in chunk]
    merged.sort(key=lambda e: (e.id, e.tag.value))
    return merged


def load_documents(path: str | Path) -> list[tuple[str, str]]:
    """Corpus input: a directory of .txt/.jsonl files, or one JSONL of {id, text}."""
    path = Path(path)
    docs: list[tuple[str, str]] = []
    if path.is_dir():
        for file in sorted(path.glob("**/*")):
            if file.is_file() and file.suffix in (".txt", ".jsonl"):
                if file.suffix == ".txt":
                    docs.append((file.stem, file.read_text(encoding="utf-8")))
                else:
                    docs.extend(_load_jsonl_docs(file))
    elif path.suffix == ".jsonl":
        docs.extend(_load_jsonl_docs(path))
    else:
        docs.append((path.stem, path.read_text(encoding="utf-8")))
    return docs


def _load_jsonl_docs(path: Path) -> list[tuple[str, str]]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
                docs.append((str(data["id"]), data["text"]))
            except (json.JSONDecodeError, KeyError) as exc:
                raise DatasetError(f"{path}:{lineno}: expected JSONL with id/text") from exc
    return docs
