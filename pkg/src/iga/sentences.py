"""Sentence segmentation with an abbreviation guard.

A sentence boundary is a run of terminal punctuation (``. ! ?``), optionally
followed by closing quotes/brackets, then whitespace, then an uppercase letter
or digit. Periods after known abbreviations or single-letter initials do not
split. Blank lines always split.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .resources import default_abbreviations

__all__ = ["Sentence", "split_sentences"]


@dataclass(frozen=True)
class Sentence:
    text: str
    start: int
    end: int

    @property
    def char_span(self) -> tuple[int, int]:
        return (self.start, self.end)


_BOUNDARY = re.compile(r"[.!?]+['\"’”)\]]*")
_PARAGRAPH = re.compile(r"\n[ \t]*\n+")
_OPENERS = "\"'“‘(`["


def _word_before(text: str, pos: int) -> str:
    i = pos
    while i > 0 and (text[i - 1].isalnum() or text[i - 1] in ".'’-"):
        i -= 1
    return text[i:pos]


def _boundaries(block: str, abbreviations: frozenset[str]) -> list[int]:
    """End offsets (exclusive) of sentence boundaries inside one block."""
    ends = []
    for m in _BOUNDARY.finditer(block):
        tail = m.end()
        if tail < len(block) and not block[tail].isspace():
            continue
        j = tail
        while j < len(block) and block[j].isspace():
            j += 1
        if j >= len(block):
            continue  # final boundary handled by the block end
        nxt = block[j]
        while j < len(block) and nxt in _OPENERS:
            j += 1
            if j < len(block):
                nxt = block[j]
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        core = m.group().rstrip("'\"’”)]")
        if core == ".":
            word = _word_before(block, m.start())
            if word and not word.endswith("."):
                if (word + ".").lower() in abbreviations:
                    continue
                if len(word) == 1 and word.isalpha() and word.isupper():
                    continue  # initials: "John F. Kennedy"
            elif word.endswith("."):
                # the period belongs to a dotted token ("U.S.", "e.g.")
                if word.lower() in abbreviations or (word + ".").lower() in abbreviations:
                    continue
        ends.append(m.end())
    return ends


def _trimmed(text: str, start: int, end: int) -> Sentence | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start >= end:
        return None
    return Sentence(text[start:end], start, end)


def split_sentences(text: str, abbreviations=None) -> list[Sentence]:
    """Split ``text`` into sentences; spans cover all non-whitespace content."""
    if abbreviations is None:
        abbr = default_abbreviations()
    else:
        abbr = frozenset(a.lower() if a.endswith(".") else a.lower() + "." for a in abbreviations)

    sentences: list[Sentence] = []
    block_start = 0
    blocks: list[tuple[int, str]] = []
    for m in _PARAGRAPH.finditer(text):
        blocks.append((block_start, text[block_start:m.start()]))
        block_start = m.end()
    blocks.append((block_start, text[block_start:]))

    for offset, block in blocks:
        prev = 0
        for end in _boundaries(block, abbr):
            sent = _trimmed(text, offset + prev, offset + end)
            if sent is not None:
                sentences.append(sent)
            prev = end
        sent = _trimmed(text, offset + prev, offset + len(block))
        if sent is not None:
            sentences.append(sent)
    return sentences
