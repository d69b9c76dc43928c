"""Unsupervised single-document keyword extraction.

Implements the YAKE statistical scorer: each term is rated by casing,
position, frequency, relatedness to context, and sentence dispersion; n-gram
candidates (1..3 words, never starting or ending on a stopword) combine term
scores, and near-duplicates are removed by string similarity. Lower score
means a more important keyword. Everything is deterministic for a fixed
input.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from statistics import median
from typing import Sequence

from .align import levenshtein_ratio
from .resources import default_stopwords
from .sentences import split_sentences
from .tokens import tokenize

__all__ = ["KeywordCandidate", "extract_keywords"]


@dataclass(frozen=True)
class KeywordCandidate:
    phrase: str
    score: float
    positions: tuple[int, ...]

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self.phrase.split(" "))


class _TermStats:
    __slots__ = ("tf", "tf_upper", "tf_acronym", "sentence_ids", "stopword")

    def __init__(self):
        self.tf = 0
        self.tf_upper = 0
        self.tf_acronym = 0
        self.sentence_ids: set[int] = set()
        self.stopword = False


def _is_acronym(surface: str) -> bool:
    return len(surface) > 1 and surface.isalpha() and surface.isupper()


def _is_candidate_term(surface: str) -> bool:
    return any(ch.isalpha() for ch in surface)


def _term_scores(
    chunks: list[list[tuple[str, str, int, int]]],
    n_sentences: int,
    stopwords: frozenset[str],
) -> tuple[dict[str, float], dict[str, _TermStats], dict[tuple[str, str], int]]:
    """Score every term; also return raw stats and the adjacency counts."""
    stats: dict[str, _TermStats] = defaultdict(_TermStats)
    cooccur: dict[tuple[str, str], int] = Counter()
    sentence_first_word: dict[int, int] = {}

    for chunk in chunks:
        for k, (term, surface, sent_id, tok_idx) in enumerate(chunk):
            st = stats[term]
            st.tf += 1
            st.sentence_ids.add(sent_id)
            st.stopword = term in stopwords
            first = sentence_first_word.setdefault(sent_id, tok_idx)
            if _is_acronym(surface):
                st.tf_acronym += 1
            elif surface[:1].isupper() and tok_idx != first:
                st.tf_upper += 1
            if k > 0:
                cooccur[(chunk[k - 1][0], term)] += 1

    if not stats:
        return {}, stats, cooccur

    max_tf = max(st.tf for st in stats.values())
    content_tfs = [st.tf for st in stats.values() if not st.stopword]
    if content_tfs:
        mean_tf = sum(content_tfs) / len(content_tfs)
        var = sum((x - mean_tf) ** 2 for x in content_tfs) / len(content_tfs)
        std_tf = math.sqrt(var)
    else:
        mean_tf, std_tf = 0.0, 0.0

    left_total: Counter[str] = Counter()
    left_distinct: Counter[str] = Counter()
    right_total: Counter[str] = Counter()
    right_distinct: Counter[str] = Counter()
    for (lhs, rhs), count in cooccur.items():
        left_total[rhs] += count
        left_distinct[rhs] += 1
        right_total[lhs] += count
        right_distinct[lhs] += 1

    scores: dict[str, float] = {}
    for term, st in stats.items():
        casing = max(st.tf_acronym, st.tf_upper) / (1.0 + math.log(st.tf))
        position = math.log(math.log(3.0 + median(sorted(st.sentence_ids))))
        frequency = st.tf / (mean_tf + std_tf) if (mean_tf + std_tf) > 0 else 0.0
        dl = left_distinct[term] / left_total[term] if left_total[term] else 0.0
        dr = right_distinct[term] / right_total[term] if right_total[term] else 0.0
        relatedness = 1.0 + (dl + dr) * (st.tf / max_tf)
        dispersion = len(st.sentence_ids) / n_sentences
        scores[term] = (relatedness * position) / (
            casing + (frequency / relatedness) + (dispersion / relatedness)
        )
    return scores, stats, dict(cooccur)


def _phrase_score(
    terms: Sequence[str],
    occurrences: int,
    scores: dict[str, float],
    stats: dict[str, _TermStats],
    cooccur: dict[tuple[str, str], int],
) -> float:
    prod = 1.0
    total = 0.0
    for i, term in enumerate(terms):
        if stats[term].stopword:
            prev_t, next_t = terms[i - 1], terms[i + 1]
            p_left = cooccur.get((prev_t, term), 0) / stats[prev_t].tf
            p_right = cooccur.get((term, next_t), 0) / stats[next_t].tf
            prob = p_left * p_right
            prod *= 1.0 + (1.0 - prob)
            total -= 1.0 - prob
        else:
            prod *= scores[term]
            total += scores[term]
    return prod / (occurrences * (1.0 + total))


def extract_keywords(
    text: str,
    max_ngram: int = 3,
    top_n: int = 10,
    stopwords: frozenset[str] | None = None,
    dedup_threshold: float = 0.9,
) -> list[KeywordCandidate]:
    """Ranked keyword candidates, ascending score (best first).

    Candidates never start or end on a stopword; all-stopword input yields an
    empty list.
    """
    if stopwords is None:
        stopwords = default_stopwords()

    sentences = split_sentences(text)
    tokens = tokenize(text)

    # token stream annotated with sentence ids; punctuation breaks chunks
    chunks: list[list[tuple[str, str, int, int]]] = []
    current: list[tuple[str, str, int, int]] = []
    sent_idx = 0
    for tok_idx, tok in enumerate(tokens):
        while sent_idx < len(sentences) and tok.start >= sentences[sent_idx].end:
            sent_idx += 1
        sid = min(sent_idx, max(len(sentences) - 1, 0))
        if tok.is_word and _is_candidate_term(tok.surface):
            current.append((tok.surface.lower(), tok.surface, sid, tok_idx))
        else:
            if current:
                chunks.append(current)
            current = []
    if current:
        chunks.append(current)
    if not chunks:
        return []

    scores, stats, cooccur = _term_scores(chunks, max(len(sentences), 1), stopwords)

    phrases: dict[tuple[str, ...], dict] = {}
    for chunk in chunks:
        for n in range(1, max_ngram + 1):
            for i in range(len(chunk) - n + 1):
                window = chunk[i : i + n]
                terms = tuple(t[0] for t in window)
                if terms[0] in stopwords or terms[-1] in stopwords:
                    continue
                entry = phrases.setdefault(terms, {"count": 0, "positions": []})
                entry["count"] += 1
                entry["positions"].append(window[0][3])

    if not phrases:
        return []

    ranked = []
    for terms, entry in phrases.items():
        score = _phrase_score(terms, entry["count"], scores, stats, cooccur)
        ranked.append(
            KeywordCandidate(" ".join(terms), score, tuple(entry["positions"]))
        )
    ranked.sort(key=lambda c: (c.score, c.positions[0], c.phrase))

    kept: list[KeywordCandidate] = []
    for cand in ranked:
        if len(kept) >= top_n:
            break
        if any(levenshtein_ratio(cand.phrase, k.phrase) >= dedup_threshold for k in kept):
            continue
        kept.append(cand)
    return kept
