"""Shared name/word normalization used across ingestion, models, and mapping."""

from __future__ import annotations

import re

_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")
_NON_WORD_RE = re.compile(r"[^0-9a-z]+")
_PUNCT_EDGE_RE = re.compile(r"^\W+|\W+$")


def split_identifier(name: str) -> list[str]:
    """Split a CamelCase / snake_case / kebab-case identifier into words.

    "MissionElement" -> ["mission", "element"], "UIMiddleware" -> ["ui", "middleware"],
    "takeoff_command" -> ["takeoff", "command"].
    """
    parts: list[str] = []
    for chunk in re.split(r"[\s_\-]+", name):
        if not chunk:
            continue
        parts.extend(p for p in _CAMEL_RE.split(chunk) if p)
    return [p.lower() for p in parts]


def normalize_label(name: str) -> str:
    """Canonical space-joined lower-case form of an entity or term name."""
    return " ".join(split_identifier(name))


def normalize_word(surface: str) -> str:
    """Lower-case a token and strip leading/trailing punctuation."""
    return _PUNCT_EDGE_RE.sub("", surface.lower())


def slug(text: str) -> str:
    """Stable hyphenated identifier for use in file names and API routes."""
    return _NON_WORD_RE.sub("-", text.lower()).strip("-")


def simple_word_tokens(text: str) -> list[str]:
    """Whitespace tokenization keeping the raw surface forms."""
    return [t for t in text.split() if normalize_word(t)]
