"""Automatic evaluation metrics over infilled spans.

All scores are computed on the generated/reference spans only, never on the
surrounding context. BLEU-style scores live in [0, 100]; bigram-overlap
fractions in [0, 1].
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .scoring import SimilarityScorer
from .tags import TagKind
from .tokens import tokenize

__all__ = [
    "SpanEvalRecord",
    "MetricsReport",
    "bleu_n",
    "corpus_bleu",
    "rouge2",
    "self_bleu",
    "ibleu",
    "unigram_prf",
    "evaluate_dataset",
]

_EPSILON = 1e-9


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _clipped_counts(candidate: Sequence[str], references: Sequence[Sequence[str]], n: int) -> tuple[int, int]:
    cand = _ngrams(candidate, n)
    if not cand:
        return 0, 0
    best: Counter = Counter()
    for ref in references:
        for gram, count in _ngrams(ref, n).items():
            if count > best[gram]:
                best[gram] = count
    clipped = sum(min(count, best[gram]) for gram, count in cand.items())
    return clipped, sum(cand.values())


def _closest_ref_len(cand_len: int, references: Sequence[Sequence[str]]) -> int:
    return min((abs(len(r) - cand_len), len(r)) for r in references)[1]


def _geometric_bleu(stats: list[tuple[int, int]], cand_len: int, ref_len: int) -> float:
    """stats: per-order (clipped, total); add-epsilon smoothing above order 1."""
    if not stats or stats[0][1] == 0 or stats[0][0] == 0:
        return 0.0
    log_sum = 0.0
    for clipped, total in stats:
        if total == 0:
            return 0.0
        p = clipped / total if clipped > 0 else _EPSILON / total
        log_sum += math.log(p)
    precision = math.exp(log_sum / len(stats))
    bp = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / max(cand_len, 1))
    return bp * precision * 100.0


def bleu_n(candidate: Sequence[str], references: Sequence[Sequence[str]], n: int = 2) -> float:
    """Sentence BLEU with up-to-n-gram precisions and brevity penalty.

    Zero higher-order counts are smoothed with a small epsilon; no unigram
    overlap at all scores 0. Empty candidates score 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not references:
        raise ValueError("at least one reference required")
    candidate = list(candidate)
    if not candidate:
        return 0.0
    n_eff = min(n, len(candidate))
    stats = [_clipped_counts(candidate, references, i) for i in range(1, n_eff + 1)]
    return _geometric_bleu(stats, len(candidate), _closest_ref_len(len(candidate), references))


def corpus_bleu(
    candidates: Sequence[Sequence[str]],
    references_list: Sequence[Sequence[Sequence[str]]],
    n: int = 2,
) -> float:
    """Corpus-level BLEU: n-gram counts pooled across all records."""
    if len(candidates) != len(references_list):
        raise ValueError("candidates and references must align")
    if not candidates:
        return 0.0
    stats = [(0, 0)] * n
    cand_len = 0
    ref_len = 0
    for candidate, references in zip(candidates, references_list):
        candidate = list(candidate)
        if not candidate:
            continue
        cand_len += len(candidate)
        ref_len += _closest_ref_len(len(candidate), references)
        for i in range(1, min(n, len(candidate)) + 1):
            clipped, total = _clipped_counts(candidate, references, i)
            stats[i - 1] = (stats[i - 1][0] + clipped, stats[i - 1][1] + total)
    stats = [s for s in stats if s[1] > 0]
    return _geometric_bleu(stats, cand_len, ref_len)


def rouge2(candidate: Sequence[str], reference: Sequence[str]) -> dict:
    """Bigram overlap with clipping; F1 is the headline number.

    References shorter than two tokens leave recall undefined; it reports 0
    and the result is flagged.
    """
    cand = _ngrams(list(candidate), 2)
    ref = _ngrams(list(reference), 2)
    overlap = sum((cand & ref).values())
    flagged = not ref
    precision = overlap / sum(cand.values()) if cand else 0.0
    recall = overlap / sum(ref.values()) if ref else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision and recall) else 0.0
    out = {"precision": precision, "recall": recall, "f1": f1}
    if flagged:
        out["flagged"] = True
    return out


def self_bleu(samples: Sequence[Sequence[str]], n: int = 2) -> float:
    """Mean BLEU of each sample against the remaining samples."""
    if len(samples) < 2:
        raise ValueError("self-BLEU needs at least two samples")
    scores = []
    for i, sample in enumerate(samples):
        others = [list(s) for j, s in enumerate(samples) if j != i]
        scores.append(bleu_n(sample, others, n=n))
    return sum(scores) / len(scores)


def ibleu(
    candidate: Sequence[str],
    reference: Sequence[str],
    source: Sequence[str],
    alpha: float = 0.8,
    n: int = 4,
) -> float:
    """alpha * BLEU(candidate, reference) - (1-alpha) * BLEU(candidate, source)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * bleu_n(candidate, [reference], n=n) - (1 - alpha) * bleu_n(
        candidate, [source], n=n
    )


def unigram_prf(model_tokens: Sequence[str], final_tokens: Sequence[str]) -> dict:
    """Multiset unigram precision/recall/F1 in [0, 100].

    Precision drops when the author deletes model tokens; recall drops when
    the author inserts new ones.
    """
    model = Counter(model_tokens)
    final = Counter(final_tokens)
    overlap = sum((model & final).values())
    if not model and not final:
        return {"precision": 0.0, "recall": 0.0, "f1": 0.0, "flagged": True}
    precision = 100.0 * overlap / sum(model.values()) if model else 0.0
    recall = 100.0 * overlap / sum(final.values()) if final else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision and recall) else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}


# --- dataset-level evaluation ---------------------------------------------------


@dataclass(frozen=True)
class SpanEvalRecord:
    example_id: str
    tag: TagKind
    generated_spans: tuple[str, ...]
    reference_spans: tuple[str, ...]
    source_spans: tuple[str, ...] | None = None
    truncated: bool = False

    def to_dict(self) -> dict:
        out = {
            "example_id": self.example_id,
            "tag": self.tag.value,
            "generated_spans": list(self.generated_spans),
            "reference_spans": list(self.reference_spans),
        }
        if self.source_spans is not None:
            out["source_spans"] = list(self.source_spans)
        if self.truncated:
            out["truncated"] = True
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SpanEvalRecord":
        source = data.get("source_spans")
        return cls(
            example_id=str(data.get("example_id") or data.get("id")),
            tag=TagKind(data["tag"]),
            generated_spans=tuple(data.get("generated_spans") or data.get("spans") or ()),
            reference_spans=tuple(data.get("reference_spans") or ()),
            source_spans=tuple(source) if source is not None else None,
            truncated=bool(data.get("truncated", False)),
        )


@dataclass(frozen=True)
class MetricsReport:
    per_tag: dict
    totals: dict
    excluded: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"per_tag": self.per_tag, "totals": self.totals, "excluded": self.excluded}


def _span_tokens(spans: Iterable[str], lowercase: bool) -> list[str]:
    text = " ".join(spans)
    return [t.surface.lower() if lowercase else t.surface for t in tokenize(text)]


def _round(value: float | None, digits: int = 4) -> float | None:
    return None if value is None else round(value, digits)


def evaluate_dataset(
    records: Sequence[SpanEvalRecord],
    scorer: SimilarityScorer | None = None,
    lowercase: bool = True,
) -> MetricsReport:
    """Per-tag and corpus metric rows.

    Records whose generated/reference span counts disagree are excluded from
    aggregates; exclusion counts are reported. Rephrase rows additionally
    report iBLEU against the source and, when a scorer is supplied, its
    similarity proxy.
    """
    by_tag: dict[str, list[SpanEvalRecord]] = {}
    excluded: dict[str, int] = {}
    for record in records:
        if len(record.generated_spans) != len(record.reference_spans) or record.truncated:
            excluded[record.tag.value] = excluded.get(record.tag.value, 0) + 1
            continue
        by_tag.setdefault(record.tag.value, []).append(record)

    per_tag: dict[str, dict] = {}
    all_cands: list[list[str]] = []
    all_refs: list[list[list[str]]] = []
    all_rouge: list[float] = []
    all_lengths: list[int] = []

    for tag in sorted(by_tag):
        rows = by_tag[tag]
        cands = [_span_tokens(r.generated_spans, lowercase) for r in rows]
        refs = [_span_tokens(r.reference_spans, lowercase) for r in rows]
        rouge_f1 = [rouge2(c, r)["f1"] for c, r in zip(cands, refs)]
        lengths = [len(c) for c in cands]
        row = {
            "records": len(rows),
            "rouge2": _round(sum(rouge_f1) / len(rouge_f1)),
            "bleu2": _round(corpus_bleu(cands, [[r] for r in refs], n=2)),
            "self_bleu": _round(self_bleu(cands, n=2)) if len(cands) >= 2 else None,
            "mean_infilled_length": _round(sum(lengths) / len(lengths), 2),
        }
        ibleu_rows = [
            (c, r, _span_tokens(rec.source_spans, lowercase))
            for c, r, rec in zip(cands, refs, rows)
            if rec.source_spans is not None
        ]
        if ibleu_rows:
            row["ibleu"] = _round(
                sum(ibleu(c, r, s) for c, r, s in ibleu_rows) / len(ibleu_rows)
            )
            row["bleu"] = _round(
                corpus_bleu([c for c, _, _ in ibleu_rows], [[r] for _, r, _ in ibleu_rows], n=4)
            )
        if scorer is not None and ibleu_rows:
            sims = [
                scorer.score(" ".join(rec.generated_spans), " ".join(rec.reference_spans))
                for rec in rows
                if rec.source_spans is not None
            ]
            row["similarity"] = _round(sum(sims) / len(sims))
        per_tag[tag] = row
        all_cands.extend(cands)
        all_refs.extend([[r] for r in refs])
        all_rouge.extend(rouge_f1)
        all_lengths.extend(lengths)

    totals: dict = {"records": len(all_cands)}
    if all_cands:
        totals.update(
            {
                "rouge2": _round(sum(all_rouge) / len(all_rouge)),
                "bleu2": _round(corpus_bleu(all_cands, all_refs, n=2)),
                "self_bleu": _round(self_bleu(all_cands, n=2)) if len(all_cands) >= 2 else None,
                "mean_infilled_length": _round(sum(all_lengths) / len(all_lengths), 2),
            }
        )
    return MetricsReport(per_tag=per_tag, totals=totals, excluded=dict(sorted(excluded.items())))
