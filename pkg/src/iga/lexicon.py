"""Word frequency lexicon: rank lookups and low-frequency counting.

File format: UTF-8 lines ``word<TAB>count`` in descending count order. Words
absent from the lexicon rank as infinity, i.e. maximally low-frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .resources import resource_path
from .tokens import Token

__all__ = ["FrequencyLexicon", "count_low_frequency_words", "load_default_lexicon"]


@dataclass(frozen=True)
class FrequencyLexicon:
    entries: tuple[tuple[str, int], ...]
    _rank: dict[str, int] = field(repr=False, default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "FrequencyLexicon":
        ordered = sorted(
            ((w.lower(), int(c)) for w, c in pairs), key=lambda wc: -wc[1]
        )
        ranks: dict[str, int] = {}
        for i, (word, _) in enumerate(ordered, start=1):
            ranks.setdefault(word, i)
        lex = cls(entries=tuple(ordered))
        lex._rank.update(ranks)
        return lex

    @classmethod
    def load(cls, path: str | Path) -> "FrequencyLexicon":
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                try:
                    word, count = line.split("\t")
                    pairs.append((word, int(count)))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: expected 'word<TAB>count'") from exc
        return cls.from_pairs(pairs)

    def rank(self, word: str) -> float:
        """1-based rank by descending count; absent words rank as inf."""
        return self._rank.get(word.lower(), math.inf)

    def count(self, word: str) -> int:
        r = self._rank.get(word.lower())
        return self.entries[r - 1][1] if r is not None else 0

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._rank

    def __len__(self) -> int:
        return len(self.entries)


def count_low_frequency_words(
    tokens: Sequence[Token] | Sequence[str],
    lexicon: FrequencyLexicon,
    rank_threshold: int,
) -> int:
    """Number of word tokens ranked strictly below ``rank_threshold``.

    Absent words count: their rank is infinite.
    """
    if rank_threshold < 1:
        raise ValueError("rank_threshold must be >= 1")
    total = 0
    for tok in tokens:
        if isinstance(tok, Token):
            if not tok.is_word:
                continue
            surface = tok.surface
        else:
            surface = tok
        if lexicon.rank(surface) > rank_threshold:
            total += 1
    return total


_default_lexicon: FrequencyLexicon | None = None


def load_default_lexicon() -> FrequencyLexicon:
    global _default_lexicon
    if _default_lexicon is None:
        _default_lexicon = FrequencyLexicon.load(resource_path("frequency_lexicon.tsv"))
    return _default_lexicon
