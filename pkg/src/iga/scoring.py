"""Pluggable sentence-similarity scorers for paraphrase-pair filtering.

The pair filter needs a semantic similarity score in [0, 1]. Two
implementations ship: a lexical F1 proxy (self-contained), and a pass-through
that reads precomputed scores supplied alongside the pair (for pipelines that
run a learned scorer out of band).
"""
from __future__ import annotations

from collections import Counter
from typing import Protocol

from .tokens import word_surfaces

__all__ = ["SimilarityScorer", "LexicalF1Scorer", "SidecarScorer", "make_scorer"]


class SimilarityScorer(Protocol):
    name: str

    def score(self, source: str, target: str, sidecar: float | None = None) -> float: ...


class LexicalF1Scorer:
    """Unigram F1 over lowercased word tokens; a cheap stand-in for a learned
    similarity model."""

    name = "lexical-f1"

    def score(self, source: str, target: str, sidecar: float | None = None) -> float:
        src = Counter(w.lower() for w in word_surfaces(source))
        tgt = Counter(w.lower() for w in word_surfaces(target))
        overlap = sum((src & tgt).values())
        if not overlap:
            return 0.0
        precision = overlap / sum(tgt.values())
        recall = overlap / sum(src.values())
        return 2 * precision * recall / (precision + recall)


class SidecarScorer:
    """Uses scores precomputed by an external model and carried with the pair."""

    name = "sidecar"

    def score(self, source: str, target: str, sidecar: float | None = None) -> float:
        if sidecar is None:
            raise ValueError("sidecar scorer requires a precomputed score column")
        return float(sidecar)


def make_scorer(name: str) -> SimilarityScorer:
    if name == "lexical-f1":
        return LexicalF1Scorer()
    if name == "sidecar":
        return SidecarScorer()
    raise ValueError(f"unknown scorer {name!r} (expected lexical-f1 or sidecar)")
