"""Canonical name normalization used for headers, type names and tokens.

Real-world headers mix conventions (``TotalRevenue``, ``total_revenue``,
``Total-Revenue``); everything is reduced to one lowercase space-separated
form before any matching happens.
"""

from __future__ import annotations

import re

_CAMEL_LOWER_UPPER = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_CAMEL_ACRONYM = re.compile(r"(?<=[A-Z])(?=[A-Z][a-z])")
_SEPARATORS = re.compile(r"[_\-.\s]+")


def normalize_name(raw: str) -> str:
    """Lowercase, split camelCase, collapse ``_ - .`` and whitespace runs."""
    s = _CAMEL_LOWER_UPPER.sub(" ", raw)
    s = _CAMEL_ACRONYM.sub(" ", s)
    s = s.lower()
    s = _SEPARATORS.sub(" ", s)
    return s.strip()


def tokenize(raw: str) -> list[str]:
    """Normalized tokens of a name; empty list for blank input."""
    norm = normalize_name(raw)
    return norm.split() if norm else []


def levenshtein(a: str, b: str) -> int:
    """Plain single-character edit distance (insert/delete/substitute)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> float:
    """Normalized edit similarity ``1 - dist / max(len)`` in [0, 1]."""
    if not a and not b:
        return 1.0
    longest = max(len(a), len(b))
    return 1.0 - levenshtein(a, b) / longest
