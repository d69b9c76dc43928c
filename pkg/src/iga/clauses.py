"""Clause extraction: bracketed-parse driven when a tree is supplied,
heuristic otherwise.

The heuristic splits a sentence at commas, semicolons, dashes and
coordinating conjunctions, keeps segments that contain a finite-verb
candidate, and folds verbless segments into their neighbor, so that
"He 's intelligent , perceptive and witty" stays one clause.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .tokens import Token, tokenize

__all__ = ["Clause", "ClauseError", "extract_clauses", "parse_bracketed"]


class ClauseError(ValueError):
    """Raised for malformed bracketed parse input."""


@dataclass(frozen=True)
class Clause:
    text: str
    start: int
    end: int
    leading_marker: str | None = None

    @property
    def char_span(self) -> tuple[int, int]:
        return (self.start, self.end)


# Coordinators open a new segment and stay attached to it, so that clauses
# beginning with "but"/"yet" can still match contrast markers.
_COORDINATORS = frozenset({"and", "but", "or", "nor", "so", "yet"})
_SEGMENT_BREAKS = frozenset({",", ";", ":", "--", "—", "–"})
_TERMINALS = frozenset({".", "!", "?", "''", '"', "'", ")", "]", "”", "’"})

# Auxiliaries, modals and frequent irregular finite forms; regular past tense
# is caught by the -ed suffix rule.
_VERB_HINTS = frozenset(
    """
    is am are was were be been being has have had do does did will would
    shall should can could may might must need dare get gets got go goes went
    gone make makes made take takes took taken come comes came see sees saw
    seen know knows knew think thinks thought say says said tell tells told
    find finds found give gives gave use uses work works call calls try tries
    ask asks feel feels felt seem seems leave leaves left put puts keep keeps
    kept let lets begin begins began begun show shows hear hears heard play
    plays run runs ran move moves live lives believe believes bring brings
    brought write writes wrote written sit sits sat stand stands stood lose
    loses lost pay pays paid meet meets met include includes continue
    continues set sets learn learns lead leads led understand understands
    understood watch watches follow follows stop stops speak speaks spoke
    spoken read reads grow grows grew grown open opens walk walks win wins won
    offer offers remember remembers appear appears buy buys bought wait waits
    serve serves die dies send sends sent build builds built stay stays fall
    falls fell fallen cut cuts reach reaches kill kills remain remains insist
    insists recommend recommends look looks want wants becomes become became
    holds hold held turn turns start starts help helps talk talks provide
    provides mean means meant rain rains rained snow snows howl howls howled
    's 're 've 'm 'd 'll n't
    """.split()
)

_ED_SUFFIX = re.compile(r"[a-z]{2,}ed$")


def _is_finite_verb(surface: str) -> bool:
    low = surface.lower()
    if low in _VERB_HINTS:
        return True
    if low.endswith("s") and (low[:-1] in _VERB_HINTS or low[:-2] in _VERB_HINTS):
        return True
    return bool(_ED_SUFFIX.match(low))


def _match_leading_marker(clause_tokens: Sequence[Token], markers: Sequence[str] | None) -> str | None:
    if not markers:
        return None
    surfaces = [t.surface.lower() for t in clause_tokens]
    best = None
    for marker in markers:
        parts = [t.surface.lower() for t in tokenize(marker)]
        if surfaces[: len(parts)] == parts:
            if best is None or len(parts) > len(best):
                best = parts
    return " ".join(best) if best else None


def _heuristic_clauses(sentence: str, markers: Sequence[str] | None) -> list[Clause]:
    tokens = tokenize(sentence)
    end = len(tokens)
    while end > 0 and tokens[end - 1].surface in _TERMINALS:
        end -= 1
    tokens = tokens[:end]
    if not tokens:
        return []

    segments: list[tuple[int, int]] = []  # token index ranges
    seg_start = 0
    i = 0
    while i < len(tokens):
        surface = tokens[i].surface
        if surface in _SEGMENT_BREAKS:
            if i > seg_start:
                segments.append((seg_start, i))
            seg_start = i + 1
        elif surface.lower() in _COORDINATORS and i > seg_start:
            segments.append((seg_start, i))
            seg_start = i
        i += 1
    if seg_start < len(tokens):
        segments.append((seg_start, len(tokens)))
    if not segments:
        return []

    has_verb = [any(_is_finite_verb(tokens[k].surface) for k in range(a, b)) for a, b in segments]

    clause_ranges: list[list[int]] = []  # [start_tok, end_tok]
    pending: tuple[int, int] | None = None
    for (a, b), verb in zip(segments, has_verb):
        if verb:
            if pending is not None:
                clause_ranges.append([pending[0], b])
                pending = None
            else:
                clause_ranges.append([a, b])
        else:
            if clause_ranges:
                clause_ranges[-1][1] = b
            elif pending is None:
                pending = (a, b)
            else:
                pending = (pending[0], b)
    if pending is not None and not clause_ranges:
        return []

    clauses = []
    for a, b in clause_ranges:
        start = tokens[a].start
        stop = tokens[b - 1].end
        marker = _match_leading_marker(tokens[a:b], markers)
        clauses.append(Clause(sentence[start:stop], start, stop, marker))
    return clauses


# --- bracketed parse path ---------------------------------------------------


class _Node:
    __slots__ = ("label", "children", "leaf")

    def __init__(self, label: str):
        self.label = label
        self.children: list[_Node] = []
        self.leaf: str | None = None


def parse_bracketed(source: str) -> _Node:
    """Parse one Penn-style ``(LABEL ...)`` tree; raise ClauseError if malformed."""
    pos = 0
    n = len(source)

    def skip_ws():
        nonlocal pos
        while pos < n and source[pos].isspace():
            pos += 1

    def parse_node() -> _Node:
        nonlocal pos
        skip_ws()
        if pos >= n or source[pos] != "(":
            raise ClauseError(f"malformed parse: expected '(' at offset {pos}")
        pos += 1
        skip_ws()
        label_start = pos
        while pos < n and not source[pos].isspace() and source[pos] not in "()":
            pos += 1
        label = source[label_start:pos]
        if not label:
            raise ClauseError(f"malformed parse: missing label at offset {label_start}")
        node = _Node(label)
        while True:
            skip_ws()
            if pos >= n:
                raise ClauseError("malformed parse: unbalanced brackets")
            if source[pos] == ")":
                pos += 1
                return node
            if source[pos] == "(":
                node.children.append(parse_node())
            else:
                word_start = pos
                while pos < n and not source[pos].isspace() and source[pos] not in "()":
                    pos += 1
                leaf = _Node("")
                leaf.leaf = source[word_start:pos]
                node.children.append(leaf)

    root = parse_node()
    skip_ws()
    if pos != n:
        raise ClauseError(f"malformed parse: trailing input at offset {pos}")
    return root


def _leaves(node: _Node, out: list[tuple[str, _Node]]):
    if node.leaf is not None:
        out.append((node.leaf, node))
        return
    for child in node.children:
        _leaves(child, out)


def _has_s_descendant(node: _Node) -> bool:
    for child in node.children:
        if child.leaf is None and (child.label == "S" or _has_s_descendant(child)):
            return True
    return False


def _collect_simple_s(node: _Node, out: list[_Node]):
    if node.leaf is not None:
        return
    if node.label == "S" and not _has_s_descendant(node):
        out.append(node)
        return
    for child in node.children:
        _collect_simple_s(child, out)


def _tree_clauses(sentence: str, parse: str, markers: Sequence[str] | None) -> list[Clause]:
    root = parse_bracketed(parse)
    all_leaves: list[tuple[str, _Node]] = []
    _leaves(root, all_leaves)
    # align leaves to the sentence left to right
    spans: dict[int, tuple[int, int]] = {}
    cursor = 0
    for idx, (leaf, _) in enumerate(all_leaves):
        found = sentence.find(leaf, cursor)
        if found < 0:
            raise ClauseError(f"malformed parse: leaf {leaf!r} not found in sentence")
        spans[idx] = (found, found + len(leaf))
        cursor = found + len(leaf)

    simple: list[_Node] = []
    _collect_simple_s(root, simple)
    leaf_index = {id(node): i for i, (_, node) in enumerate(all_leaves)}

    clauses = []
    for s_node in simple:
        node_leaves: list[tuple[str, _Node]] = []
        _leaves(s_node, node_leaves)
        if not node_leaves:
            continue
        first = leaf_index[id(node_leaves[0][1])]
        last = leaf_index[id(node_leaves[-1][1])]
        start = spans[first][0]
        stop = spans[last][1]
        marker = _match_leading_marker(tokenize(sentence[start:stop]), markers)
        clauses.append(Clause(sentence[start:stop], start, stop, marker))
    clauses.sort(key=lambda c: c.start)
    return clauses


def extract_clauses(
    sentence: str,
    parse: str | None = None,
    markers: Sequence[str] | None = None,
) -> list[Clause]:
    """Clauses of a single sentence, ordered and non-overlapping.

    ``leading_marker`` is filled when the clause begins with one of
    ``markers`` (longest match, case-insensitive).
    """
    if parse is not None:
        return _tree_clauses(sentence, parse, markers)
    return _heuristic_clauses(sentence, markers)
