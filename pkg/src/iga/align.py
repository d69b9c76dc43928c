"""Word-level Levenshtein distance and minimal edit scripts.

The same dynamic program backs paraphrase-pair filtering, keyword
deduplication (at the character level), and the session diff that re-anchors
accepted spans after user edits.
"""
from __future__ import annotations

from typing import Sequence

__all__ = ["edit_distance", "edit_script", "levenshtein_ratio", "word_edit_distance"]


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, y in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (x != y),
            )
        prev = cur
    return prev[-1]


def word_edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Edit distance over word token sequences."""
    return edit_distance(list(a), list(b))


def levenshtein_ratio(a: str, b: str) -> float:
    """Normalized similarity in [0, 1]; 1.0 for identical strings."""
    if not a and not b:
        return 1.0
    return 1.0 - edit_distance(a, b) / max(len(a), len(b))


def edit_script(a: Sequence, b: Sequence) -> list[tuple[str, int, int, int, int]]:
    """Minimal edit script as merged opcodes.

    Returns ``(op, ai, aj, bi, bj)`` tuples covering both sequences in order,
    with ``op`` one of ``equal``/``replace``/``delete``/``insert``. Ties are
    broken deterministically (diagonal, then delete, then insert) so the same
    inputs always yield the same script.
    """
    n, m = len(a), len(b)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        ai = a[i - 1]
        row = dist[i]
        prev = dist[i - 1]
        for j in range(1, m + 1):
            row[j] = min(prev[j - 1] + (ai != b[j - 1]), prev[j] + 1, row[j - 1] + 1)

    ops: list[tuple[str, int, int, int, int]] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (a[i - 1] != b[j - 1]):
            op = "equal" if a[i - 1] == b[j - 1] else "replace"
            ops.append((op, i - 1, i, j - 1, j))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            ops.append(("delete", i - 1, i, j, j))
            i -= 1
        else:
            ops.append(("insert", i, i, j - 1, j))
            j -= 1
    ops.reverse()

    merged: list[tuple[str, int, int, int, int]] = []
    for op in ops:
        if merged and merged[-1][0] == op[0] and merged[-1][2] == op[1] and merged[-1][4] == op[3]:
            last = merged[-1]
            merged[-1] = (op[0], last[1], op[2], last[3], op[4])
        else:
            merged.append(op)
    return merged
