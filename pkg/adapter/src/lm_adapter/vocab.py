"""Word-level vocabulary over exported training lines.

Lines are already space-tokenized by the exporter, so every
whitespace-delimited token (including the separator, answer and tag tokens)
is a single atomic vocabulary item. That makes the special-token invariant
trivial to uphold and easy to verify.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

PAD = "<pad>"
UNK = "<unk>"
EOL = "<eol>"

_TAG_SHAPED = re.compile(r"<[A-Za-z][A-Za-z0-9_-]*>")


class TrainingDataError(ValueError):
    pass


@dataclass
class WordVocab:
    tokens: list[str]
    index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.index:
            self.index = {tok: i for i, tok in enumerate(self.tokens)}

    @classmethod
    def build(cls, lines: Iterable[str], special_tokens: Iterable[str]) -> "WordVocab":
        seen: dict[str, None] = {}
        for tok in (PAD, UNK, EOL, *special_tokens):
            if " " in tok or not tok:
                raise ValueError(f"special token {tok!r} must be a single word")
            seen.setdefault(tok)
        for line in lines:
            for tok in line.split():
                seen.setdefault(tok)
        return cls(list(seen))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return self.index[PAD]

    @property
    def eol_id(self) -> int:
        return self.index[EOL]

    def encode(self, text: str) -> list[int]:
        unk = self.index[UNK]
        return [self.index.get(tok, unk) for tok in text.split()]

    def decode(self, ids: Iterable[int]) -> str:
        skip = {self.pad_id, self.eol_id}
        return " ".join(self.tokens[i] for i in ids if i not in skip)

    def token_id(self, token: str) -> int | None:
        return self.index.get(token)


def validate_tags(lines: Iterable[str], registered: Iterable[str]):
    """Reject lines carrying tag-shaped tokens outside the registered set."""
    allowed = set(registered)
    for lineno, line in enumerate(lines, start=1):
        for tok in line.split():
            if _TAG_SHAPED.fullmatch(tok) and tok not in allowed:
                raise TrainingDataError(f"line {lineno}: unregistered tag token {tok!r}")
