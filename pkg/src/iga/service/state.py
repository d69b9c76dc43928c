"""Session state reconstruction and report computation.

State is a pure function of the event log: replaying the same log always
produces the same main text, the same re-anchored spans, and byte-identical
report JSON. Accepted spans are re-anchored through a word-level minimal
edit script on every edit event; insertions strictly inside a span are
absorbed (they count as novel tokens), insertions at either boundary are
not.
"""
from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

from collections import Counter

from ..align import edit_script
from ..sentences import split_sentences
from ..tokens import tokenize

__all__ = [
    "AcceptedSpan",
    "SessionState",
    "ReplayError",
    "replay_events",
    "build_report",
    "canonical_report_json",
    "token_diff",
]

MODES = ("BASE", "ILM", "IGA")


class ReplayError(ValueError):
    pass


@dataclass
class AcceptedSpan:
    candidate_id: str
    tag: str
    start: int
    end: int
    model_tokens: list[str]


@dataclass
class SessionState:
    session_id: str
    mode: str
    main_text: str = ""
    accepted_spans: list[AcceptedSpan] = field(default_factory=list)
    requests: dict[str, dict] = field(default_factory=dict)  # request_id -> candidates
    generate_clicks: int = 0
    add_clicks: int = 0
    edits: int = 0
    submitted: bool = False
    seq: int = 0


def token_diff(old: str, new: str) -> list[list]:
    """Word-level minimal edit script with character ranges.

    Ops are ``[op, old_start, old_end, new_start, new_end]`` over character
    offsets, derived from the token-level script.
    """
    old_tokens = tokenize(old)
    new_tokens = tokenize(new)
    ops = edit_script([t.surface for t in old_tokens], [t.surface for t in new_tokens])

    def old_pos(i: int) -> int:
        return old_tokens[i].start if i < len(old_tokens) else len(old)

    def new_pos(i: int) -> int:
        return new_tokens[i].start if i < len(new_tokens) else len(new)

    out = []
    for op, ai, aj, bi, bj in ops:
        oa = old_pos(ai)
        ob = old_tokens[aj - 1].end if aj > ai else oa
        na = new_pos(bi)
        nb = new_tokens[bj - 1].end if bj > bi else na
        out.append([op, oa, ob, na, nb])
    return out


class _Anchor:
    """Maps old-text character offsets to new-text offsets through matched tokens."""

    def __init__(self, old: str, new: str):
        old_tokens = tokenize(old)
        new_tokens = tokenize(new)
        ops = edit_script([t.surface for t in old_tokens], [t.surface for t in new_tokens])
        self.pairs: list[tuple[int, int, int, int]] = []  # (a_start, a_end, b_start, b_end)
        for op, ai, aj, bi, bj in ops:
            if op != "equal":
                continue
            for k in range(aj - ai):
                a_tok = old_tokens[ai + k]
                b_tok = new_tokens[bi + k]
                self.pairs.append((a_tok.start, a_tok.end, b_tok.start, b_tok.end))
        self._starts = [p[0] for p in self.pairs]
        self._ends = [p[1] for p in self.pairs]
        self.new_len = len(new)

    def map_start(self, pos: int) -> int:
        """Right-biased: insertions at the boundary stay outside the span."""
        idx = bisect_right(self._ends, pos)
        if idx >= len(self.pairs):
            return self.new_len
        a_start, _, b_start, _ = self.pairs[idx]
        if pos >= a_start:
            return b_start + (pos - a_start)
        return b_start

    def map_end(self, pos: int) -> int:
        """Left-biased: insertions at the boundary stay outside the span."""
        idx = bisect_left(self._starts, pos) - 1
        if idx < 0:
            return 0
        a_start, a_end, b_start, b_end = self.pairs[idx]
        if pos <= a_end:
            return b_start + (pos - a_start)
        return b_end


def _append_text(base: str, addition: str) -> tuple[str, int]:
    """Join candidate text onto the document; returns (new_text, span_start)."""
    if not base:
        return addition, 0
    if base.endswith((" ", "\n", "\t")):
        return base + addition, len(base)
    return base + " " + addition, len(base) + 1


def _apply_generate(state: SessionState, payload: dict):
    request_id = payload["request_id"]
    state.requests[request_id] = {
        cand["candidate_id"]: cand for cand in payload["candidates"]
    }
    state.generate_clicks += 1


def _apply_accept(state: SessionState, payload: dict):
    request_id = payload["request_id"]
    candidate_id = payload["candidate_id"]
    candidates = state.requests.get(request_id)
    if candidates is None or candidate_id not in candidates:
        raise ReplayError(f"accept references unknown candidate {candidate_id!r}")
    candidate = candidates[candidate_id]
    assembled = candidate["assembled"]
    state.main_text, start = _append_text(state.main_text, assembled)
    state.accepted_spans.append(
        AcceptedSpan(
            candidate_id=candidate_id,
            tag=candidate["tag"],
            start=start,
            end=start + len(assembled),
            model_tokens=[t.surface for t in tokenize(assembled)],
        )
    )
    state.add_clicks += 1


def _apply_edit(state: SessionState, payload: dict):
    new_text = payload["main_text"]
    anchor = _Anchor(state.main_text, new_text)
    for span in state.accepted_spans:
        start = anchor.map_start(span.start)
        end = anchor.map_end(span.end)
        span.start = start
        span.end = max(end, start)
    state.main_text = new_text
    state.edits += 1


def replay_events(header: dict, events: list[dict]) -> SessionState:
    """Rebuild session state from a log; raises ReplayError naming the seq."""
    mode = header.get("mode")
    if mode not in MODES:
        raise ReplayError(f"unknown mode {mode!r}")
    state = SessionState(session_id=header["session_id"], mode=mode)
    for event in events:
        seq, kind, payload = event["seq"], event["kind"], event["payload"]
        try:
            if kind == "generate_click":
                _apply_generate(state, payload)
            elif kind == "add_click":
                _apply_accept(state, payload)
            elif kind == "edit":
                _apply_edit(state, payload)
            elif kind == "submit":
                state.submitted = True
            else:
                raise ReplayError(f"unknown event kind {kind!r}")
        except (KeyError, ReplayError) as exc:
            raise ReplayError(f"seq {seq}: {exc}") from exc
        state.seq = seq
    return state


def _rate(count: int, denominator: int) -> float:
    return round(count / denominator, 4) if denominator else 0.0


def build_report(state: SessionState) -> dict:
    """Session report: volume, click, edit and per-tag agreement metrics."""
    final_text = state.main_text
    tokens = tokenize(final_text)
    sentences = split_sentences(final_text)

    live_spans = [s for s in state.accepted_spans if s.end > s.start]
    ai_sentences = 0
    for sent in sentences:
        if any(span.start < sent.end and sent.start < span.end for span in live_spans):
            ai_sentences += 1

    per_tag: dict[str, dict] = {}
    histogram: dict[str, int] = {}
    novel_inserted = 0
    deleted_model = 0
    kept_model = 0
    for span in state.accepted_spans:
        histogram[span.tag] = histogram.get(span.tag, 0) + 1
        final_tokens = [t.surface for t in tokenize(final_text[span.start : span.end])]
        row = per_tag.setdefault(
            span.tag,
            {"intersection": 0, "model": 0, "final": 0, "candidates": 0, "fully_deleted": 0},
        )
        overlap = sum((Counter(span.model_tokens) & Counter(final_tokens)).values())
        row["intersection"] += overlap
        row["model"] += len(span.model_tokens)
        row["final"] += len(final_tokens)
        row["candidates"] += 1
        if not final_tokens:
            row["fully_deleted"] += 1
        kept_model += overlap
        deleted_model += len(span.model_tokens) - overlap
        novel_inserted += len(final_tokens) - overlap

    tag_rows = {}
    for tag in sorted(per_tag):
        row = per_tag[tag]
        precision = 100.0 * row["intersection"] / row["model"] if row["model"] else 0.0
        recall = 100.0 * row["intersection"] / row["final"] if row["final"] else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision and recall) else 0.0
        tag_rows[tag] = {
            "precision": round(precision, 2),
            "recall": round(recall, 2),
            "f1": round(f1, 2),
            "candidates": row["candidates"],
            "fully_deleted": row["fully_deleted"],
        }

    return {
        "session_id": state.session_id,
        "mode": state.mode,
        "tokens": len(tokens),
        "sentences": len(sentences),
        "ai_assisted_sentences": ai_sentences,
        "generate_clicks": state.generate_clicks,
        "add_clicks": state.add_clicks,
        "gen_per_sentence": _rate(state.generate_clicks, len(sentences)),
        "add_per_sentence": _rate(state.add_clicks, len(sentences)),
        "per_tag_unigram": tag_rows,
        "novel_tokens_inserted": novel_inserted,
        "deleted_model_tokens": deleted_model,
        "kept_model_tokens": kept_model,
        "tag_usage_histogram": dict(sorted(histogram.items())),
        "edits": state.edits,
        "submitted": state.submitted,
    }


def canonical_report_json(report: dict) -> str:
    """Stable byte representation used by both the live service and replay."""
    return json.dumps(report, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
