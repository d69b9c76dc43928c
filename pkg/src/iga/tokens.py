"""Deterministic rule-based word tokenizer with character spans.

The tokenizer is self-contained so that mined datasets and golden files are
stable across platforms:

* whitespace separates tokens,
* punctuation is detached from words,
* clitics split at the apostrophe ("don't" -> "do", "n't"; "one's" -> "one", "'s"),
* numbers ("1,234.5") and dotted acronyms ("U.S.") stay whole.

Every token records its character span in the source string, so the exact
input can always be reconstructed from spans plus the original whitespace.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = ["Token", "tokenize", "word_surfaces"]


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int
    is_word: bool

    @property
    def char_span(self) -> tuple[int, int]:
        return (self.start, self.end)


# Order matters: numbers and acronyms take precedence over plain word runs,
# multi-character punctuation over single characters.
_SCANNER = re.compile(
    r"""
      [0-9]+(?:[.,][0-9]+)*                 # 1,234.5
    | [A-Za-z](?:\.[A-Za-z])+\.?            # U.S. / p.m.
    | [A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*   # words, hyphens, clitic runs
    | ['’](?:s|m|d|ll|re|ve|em|t)(?![A-Za-z0-9])  # standalone clitics
    | \.\.\. | `` | '' | --
    | \S                                    # any other single character
    """,
    re.VERBOSE | re.IGNORECASE,
)

_NT_SPLIT = re.compile(r"n['’]t$", re.IGNORECASE)
_CLITIC_SPLIT = re.compile(r"['’](?:s|m|d|ll|re|ve)$", re.IGNORECASE)


def _is_word(surface: str) -> bool:
    return any(ch.isalnum() for ch in surface)


def _split_clitic(surface: str, start: int) -> list[tuple[str, int, int]]:
    """Split one trailing clitic off a word run, if present."""
    m = _NT_SPLIT.search(surface)
    if m and m.start() > 0:
        cut = m.start()
        return [(surface[:cut], start, start + cut),
                (surface[cut:], start + cut, start + len(surface))]
    m = _CLITIC_SPLIT.search(surface)
    if m and m.start() > 0:
        cut = m.start()
        return [(surface[:cut], start, start + cut),
                (surface[cut:], start + cut, start + len(surface))]
    return [(surface, start, start + len(surface))]


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; empty input yields an empty list."""
    tokens: list[Token] = []
    for m in _SCANNER.finditer(text):
        for surface, start, end in _split_clitic(m.group(), m.start()):
            tokens.append(Token(surface, start, end, _is_word(surface)))
    return tokens


def word_surfaces(text: str) -> list[str]:
    """Surfaces of word tokens only (punctuation dropped)."""
    return [t.surface for t in tokenize(text) if t.is_word]
