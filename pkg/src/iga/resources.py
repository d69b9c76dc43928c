"""Loaders for the bundled resource files.

All resources are plain UTF-8 text, one entry per line; blank lines and lines
starting with ``#`` are ignored. Loaders cache, and every returned container
is immutable so resources are safe to share across threads.
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources as _ilr
from pathlib import Path

__all__ = [
    "read_lines",
    "resource_path",
    "default_stopwords",
    "default_abbreviations",
    "default_idioms",
    "marker_lines",
]


def _read_resource(name: str) -> str:
    return _ilr.files("iga").joinpath("data", name).read_text(encoding="utf-8")


def resource_path(name: str) -> Path:
    """Filesystem path of a bundled resource (resources ship as real files)."""
    return Path(str(_ilr.files("iga").joinpath("data", name)))


def read_lines(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return frozenset(w.lower() for w in read_lines(_read_resource("stopwords.txt")))


@lru_cache(maxsize=None)
def default_abbreviations() -> frozenset[str]:
    return frozenset(w.lower() for w in read_lines(_read_resource("abbreviations.txt")))


@lru_cache(maxsize=None)
def default_idioms() -> tuple[str, ...]:
    return tuple(read_lines(_read_resource("idioms.txt")))


@lru_cache(maxsize=None)
def marker_lines(name: str) -> tuple[str, ...]:
    """Markers from a bundled table: one of cause/effect/concession/comparison."""
    return tuple(w.lower() for w in read_lines(_read_resource(f"markers_{name}.txt")))
