"""Writing-intent tags: canonical surface tokens and alias resolution.

Each kind has exactly one canonical surface token used when emitting training
data; the alias table additionally accepts the alternate spellings that occur
in authored markup. The rephrase kind uses a paired delimiter that wraps the
text to rewrite, so its two surface occurrences count as a single slot.
"""
from __future__ import annotations

import enum
import re

__all__ = ["TagKind", "TAG_ALIASES", "UnknownTagError", "resolve_tag", "surface_token", "find_tag_tokens"]


class TagKind(enum.Enum):
    PARA = "PARA"
    BIO = "BIO"
    CAUSE = "CAUSE"
    EFFECT = "EFFECT"
    CNTRA = "CNTRA"
    DESCP = "DESCP"
    IDIOM = "IDIOM"
    MASK = "MASK"

    @property
    def is_paired(self) -> bool:
        return self is TagKind.PARA


_CANONICAL: dict[TagKind, str] = {
    TagKind.PARA: "<sub>",
    TagKind.BIO: "<biography>",
    TagKind.CAUSE: "<cause>",
    TagKind.EFFECT: "<effect>",
    TagKind.CNTRA: "<contrast>",
    TagKind.DESCP: "<description>",
    TagKind.IDIOM: "<idiom>",
    TagKind.MASK: "<mask>",
}

TAG_ALIASES: dict[str, TagKind] = {
    "sub": TagKind.PARA,
    "paraphrase": TagKind.PARA,
    "para": TagKind.PARA,
    "rephrase": TagKind.PARA,
    "biography": TagKind.BIO,
    "bio": TagKind.BIO,
    "cause": TagKind.CAUSE,
    "effect": TagKind.EFFECT,
    "contrast": TagKind.CNTRA,
    "concession": TagKind.CNTRA,
    "comparison": TagKind.CNTRA,
    "cntra": TagKind.CNTRA,
    "description": TagKind.DESCP,
    "descp": TagKind.DESCP,
    "describe": TagKind.DESCP,
    "idiom": TagKind.IDIOM,
    "mask": TagKind.MASK,
}


class UnknownTagError(ValueError):
    """Raised when markup contains a tag token outside the alias table."""


_TAG_TOKEN = re.compile(r"<([A-Za-z][A-Za-z0-9_-]*)>")


def surface_token(kind: TagKind) -> str:
    return _CANONICAL[kind]


def resolve_tag(name: str) -> TagKind:
    kind = TAG_ALIASES.get(name.lower())
    if kind is None:
        raise UnknownTagError(f"unknown tag <{name}>")
    return kind


def find_tag_tokens(text: str) -> list[tuple[int, int, str]]:
    """All ``<name>`` occurrences as (start, end, name); names not resolved."""
    return [(m.start(), m.end(), m.group(1)) for m in _TAG_TOKEN.finditer(text)]
