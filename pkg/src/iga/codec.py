"""Tag markup parsing, training-line encoding, prompt building and decoding.

Training lines have the shape::

    [context] tagged-text <sep> span1 <answer> span2 <answer>

Every ground-truth span is terminated by the answer token, including the
last, which doubles as the generation stop condition. Decoding splits a raw
continuation on the answer token and substitutes the spans back into the
tagged input.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import re
from typing import Sequence

from .tags import TagKind, TAG_ALIASES, UnknownTagError, find_tag_tokens, surface_token
from .tokens import tokenize

__all__ = [
    "SEP_TOKEN",
    "ANSWER_TOKEN",
    "LiteralText",
    "TagSlot",
    "TaggedInput",
    "EncodedPrompt",
    "Completion",
    "MarkupError",
    "CodecError",
    "parse_markup",
    "encode_training",
    "encode_inference",
    "decode_output",
    "assemble",
    "substitute",
]

SEP_TOKEN = "<sep>"
ANSWER_TOKEN = "<answer>"
RESERVED_TOKENS = frozenset({"sep", "answer"})


class MarkupError(ValueError):
    """Raised for unparseable tag markup."""


class CodecError(ValueError):
    """Raised for encode/decode contract violations."""


@dataclass(frozen=True)
class LiteralText:
    text: str


@dataclass(frozen=True)
class TagSlot:
    kind: TagKind
    slot_index: int


@dataclass(frozen=True)
class TaggedInput:
    segments: tuple  # LiteralText | TagSlot entries in document order
    para_region: tuple[int, int] | None = None
    source_text: str = ""

    @property
    def slot_count(self) -> int:
        indices = {seg.slot_index for seg in self.segments if isinstance(seg, TagSlot)}
        return len(indices)

    @property
    def slot_kinds(self) -> tuple[TagKind, ...]:
        seen: dict[int, TagKind] = {}
        for seg in self.segments:
            if isinstance(seg, TagSlot) and seg.slot_index not in seen:
                seen[seg.slot_index] = seg.kind
        return tuple(kind for _, kind in sorted(seen.items()))

    def render(self) -> str:
        """Canonical text form: literals and canonical tag tokens, space-joined."""
        pieces = []
        for seg in self.segments:
            if isinstance(seg, LiteralText):
                if seg.text:
                    pieces.append(seg.text)
            else:
                pieces.append(surface_token(seg.kind))
        return " ".join(pieces)


@dataclass(frozen=True)
class EncodedPrompt:
    text: str
    token_budget_used: int
    slot_count: int = 0
    slot_kinds: tuple[TagKind, ...] = ()
    tagged_text: str = ""  # the tag-bearing sentence without context


@dataclass(frozen=True)
class Completion:
    spans: tuple[str, ...]
    assembled: str
    truncated: bool
    warnings: tuple[str, ...] = ()


def parse_markup(text: str, aliases: dict[str, TagKind] | None = None) -> TaggedInput:
    """Parse author markup into literal segments and tag slots.

    Rejects unknown tag names, reserved codec tokens in literal positions,
    unbalanced rephrase delimiters, and tags nested inside a rephrase region.
    """
    alias_table = TAG_ALIASES if aliases is None else aliases
    segments: list = []
    para_open: int | None = None  # segment index of the opening delimiter
    para_region: tuple[int, int] | None = None
    slot_index = 0
    cursor = 0

    for start, end, name in find_tag_tokens(text):
        lowered = name.lower()
        if lowered in RESERVED_TOKENS:
            raise MarkupError(f"reserved token <{name}> not allowed in markup")
        kind = alias_table.get(lowered)
        if kind is None:
            raise UnknownTagError(f"unknown tag <{name}>")
        literal = text[cursor:start].strip()
        if literal:
            segments.append(LiteralText(literal))
        cursor = end

        if kind.is_paired:
            if para_open is None:
                if para_region is not None:
                    raise MarkupError("at most one rephrase region is allowed")
                para_open = len(segments)
                segments.append(TagSlot(kind, slot_index))
                slot_index += 1
            else:
                segments.append(TagSlot(kind, segments[para_open].slot_index))
                para_region = (para_open, len(segments) - 1)
                para_open = None
        else:
            if para_open is not None:
                raise MarkupError("tags may not appear inside a rephrase region")
            segments.append(TagSlot(kind, slot_index))
            slot_index += 1

    if para_open is not None:
        raise MarkupError("unbalanced rephrase delimiters")
    literal = text[cursor:].strip()
    if literal:
        segments.append(LiteralText(literal))
    return TaggedInput(tuple(segments), para_region, source_text=text)


def encode_training(example, sep_token: str = SEP_TOKEN, answer_token: str = ANSWER_TOKEN) -> str:
    """One training line for a mined example.

    ``example`` provides ``context`` (optional), ``tagged_text`` and
    ``answer_spans``. The tagged text is preserved verbatim; spans follow the
    separator, each terminated by the answer token.
    """
    parsed = parse_markup(example.tagged_text)
    spans = list(example.answer_spans)
    if parsed.slot_count != len(spans):
        raise CodecError(
            f"slot/span mismatch: {parsed.slot_count} slots vs {len(spans)} spans"
        )
    parts = []
    if getattr(example, "context", None):
        parts.append(example.context)
    parts.append(example.tagged_text)
    parts.append(sep_token)
    for span in spans:
        parts.append(span)
        parts.append(answer_token)
    return " ".join(parts)


def prompt_token_count(text: str) -> int:
    """Token count where ``<name>`` tag tokens count as single tokens."""
    count = 0
    cursor = 0
    for start, end, _ in find_tag_tokens(text):
        count += len(tokenize(text[cursor:start])) + 1
        cursor = end
    count += len(tokenize(text[cursor:]))
    return count


def encode_inference(
    context: str, tagged: TaggedInput, budget: int = 300, sep_token: str = SEP_TOKEN
) -> EncodedPrompt:
    """Prompt = truncated context + tagged text + separator.

    Truncation drops the oldest context tokens first and never touches the
    tagged sentence; the separator does not count against the budget.
    """
    if tagged.slot_count < 1:
        raise CodecError("tagged input has no slots")
    rendered = tagged.render()
    tagged_tokens = prompt_token_count(rendered)
    if tagged_tokens > budget:
        raise CodecError(
            f"tagged sentence ({tagged_tokens} tokens) exceeds the {budget}-token budget"
        )
    keep = budget - tagged_tokens
    context = context or ""
    ctx_tokens = tokenize(context)
    if len(ctx_tokens) > keep:
        context = context[ctx_tokens[len(ctx_tokens) - keep].start :] if keep > 0 else ""
        used_ctx = keep
    else:
        used_ctx = len(ctx_tokens)
    context = context.strip()
    text = (context + " " if context else "") + rendered + " " + sep_token
    return EncodedPrompt(
        text=text,
        token_budget_used=tagged_tokens + used_ctx,
        slot_count=tagged.slot_count,
        slot_kinds=tagged.slot_kinds,
        tagged_text=rendered,
    )


def decode_output(tagged: TaggedInput, raw: str, answer_token: str = ANSWER_TOKEN) -> Completion:
    """Split a raw continuation into spans and assemble the final text.

    Robust: missing spans mark the completion truncated and render empty;
    surplus spans are discarded with a warning.
    """
    slots = tagged.slot_count
    pieces = raw.split(answer_token)
    spans = [p.strip() for p in pieces[:-1]]
    tail = pieces[-1].strip()
    warnings: list[str] = []
    truncated = False
    if tail:
        if len(spans) < slots:
            spans.append(tail)
            truncated = True
        else:
            warnings.append("unterminated trailing text discarded")
    if len(spans) > slots:
        warnings.append(f"{len(spans) - slots} extra span(s) discarded")
        spans = spans[:slots]
    if len(spans) < slots:
        truncated = True
    return Completion(
        spans=tuple(spans),
        assembled=assemble(tagged, spans),
        truncated=truncated,
        warnings=tuple(warnings),
    )


def _pieces(tagged: TaggedInput, spans: Sequence[str]) -> list[str]:
    if len(spans) > tagged.slot_count:
        raise CodecError("more spans than slots")
    lookup = {i: spans[i] for i in range(len(spans))}
    pieces: list[str] = []
    idx = 0
    segs = tagged.segments
    while idx < len(segs):
        if tagged.para_region and idx == tagged.para_region[0]:
            slot = segs[idx]
            pieces.append(lookup.get(slot.slot_index, ""))
            idx = tagged.para_region[1] + 1
            continue
        seg = segs[idx]
        if isinstance(seg, LiteralText):
            pieces.append(seg.text)
        else:
            pieces.append(lookup.get(seg.slot_index, ""))
        idx += 1
    return [p for p in pieces if p]


_SPACE_BEFORE_PUNCT = re.compile(r"\s+([,.!?;:%)\]])")
_SPACE_AFTER_OPEN = re.compile(r"([(\[])\s+")
_SPACE_BEFORE_CLITIC = re.compile(r"\s+('s|'re|'ve|'ll|'d|'m|n't)\b", re.IGNORECASE)
_SPACE_AFTER_BACKTICKS = re.compile(r"(``)\s+")
_SPACE_BEFORE_ENDQUOTES = re.compile(r"\s+('')")


def prettify(text: str) -> str:
    """Display detokenization: collapse seams, reattach punctuation."""
    text = " ".join(text.split())
    text = _SPACE_BEFORE_PUNCT.sub(r"\1", text)
    text = _SPACE_AFTER_OPEN.sub(r"\1", text)
    text = _SPACE_BEFORE_CLITIC.sub(r"\1", text)
    text = _SPACE_AFTER_BACKTICKS.sub(r"\1", text)
    text = _SPACE_BEFORE_ENDQUOTES.sub(r"\1", text)
    return text


def substitute(tagged: TaggedInput, spans: Sequence[str]) -> str:
    """Raw substitution: spans at slots, single spaces at seams, no prettify."""
    return " ".join(" ".join(_pieces(tagged, spans)).split())


def assemble(tagged: TaggedInput, spans: Sequence[str]) -> str:
    """Substitute spans into the input and prettify for display."""
    return prettify(" ".join(_pieces(tagged, spans)))
