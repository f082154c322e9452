"""Requirement ingestion: loading, tokenization with POS tags, and seeded splits.

Requirement statements arrive as UTF-8 text, one statement per line or as a
numbered list (``<n>. text``). Tokens are annotated with a coarse POS tag from
a plain-text lexicon plus suffix heuristics; unknown words default to NOUN so
that noun-phrase term extraction errs toward recall.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .text import normalize_word

POS_TAGS = ("NOUN", "VERB", "ADJ", "DET", "PREP", "CONJ", "OTHER")

_NUMBERED_RE = re.compile(r"^\s*(\d+)[.)]\s+(.*\S)\s*$")
_NUMERIC_RE = re.compile(r"^\d+(\.\d+)?$")


class IngestError(ValueError):
    """Unreadable, empty, or malformed requirement input."""


@dataclass(frozen=True)
class Token:
    surface: str
    norm: str
    pos: str


@dataclass(frozen=True)
class Requirement:
    id: str
    text: str
    tokens: tuple[Token, ...] = ()

    def normalized_words(self) -> list[str]:
        return [t.norm for t in self.tokens]


@dataclass(frozen=True)
class RequirementSet:
    name: str
    requirements: tuple[Requirement, ...]
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.requirements)

    def ids(self) -> list[str]:
        return [r.id for r in self.requirements]


@dataclass(frozen=True)
class SplitSpec:
    ratio: float = 0.7
    seed: int = 0
    run_index: int = 0


@dataclass(frozen=True)
class PosLexicon:
    """word -> tag table with suffix fallbacks for out-of-lexicon words."""

    entries: dict[str, str] = field(default_factory=dict)

    def tag(self, norm: str) -> str:
        if not norm:
            return "OTHER"
        if norm in self.entries:
            return self.entries[norm]
        if _NUMERIC_RE.match(norm):
            return "OTHER"
        if norm.endswith(("tion", "sion", "ment", "ness", "ance", "ence", "ity")):
            return "NOUN"
        if norm.endswith("ly"):
            return "OTHER"
        if norm.endswith(("ous", "ful", "ible", "able", "ive", "ical")):
            return "ADJ"
        return "NOUN"


def load_pos_lexicon(path: str | Path | None = None) -> PosLexicon:
    """Load a ``word<TAB>TAG`` lexicon; defaults to the bundled one."""
    if path is None:
        text = resources.files("reqplumb.data").joinpath("pos_lexicon.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            word, tag = line.split("\t")
        except ValueError as exc:
            raise IngestError(f"malformed lexicon line {lineno}: {line!r}") from exc
        tag = tag.strip().upper()
        if tag not in POS_TAGS:
            raise IngestError(f"unknown POS tag {tag!r} on lexicon line {lineno}")
        entries[word.strip().lower()] = tag
    return PosLexicon(entries)


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    if path is None:
        text = resources.files("reqplumb.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def load_requirements(path: str | Path, format: str = "one-per-line") -> RequirementSet:
    """Read one requirement per logical statement; ids are ``<setname>-<ordinal>``."""
    path = Path(path)
    if format not in ("one-per-line", "numbered-list"):
        raise IngestError(f"unknown format {format!r}")
    try:
        raw = path.read_text("utf-8")
    except FileNotFoundError as exc:
        raise IngestError(f"unreadable file: {path}") from exc
    except UnicodeDecodeError as exc:
        raise IngestError(f"not valid UTF-8: {path}") from exc

    setname = path.stem
    statements: list[str] = []
    if format == "one-per-line":
        statements = [line.strip() for line in raw.splitlines() if line.strip()]
    else:
        expected = 1
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            m = _NUMBERED_RE.match(line)
            if m is None:
                raise IngestError(f"line {lineno} is not a numbered item: {line.strip()!r}")
            if int(m.group(1)) != expected:
                raise IngestError(
                    f"line {lineno}: expected item {expected}, found {m.group(1)}"
                )
            statements.append(m.group(2))
            expected += 1
    if not statements:
        raise IngestError(f"no requirements found in {path}")

    reqs = tuple(
        Requirement(id=f"{setname}-{i}", text=text) for i, text in enumerate(statements, 1)
    )
    return RequirementSet(name=setname, requirements=reqs, provenance=str(path))


def tokenize_and_tag(req: Requirement, lexicon: PosLexicon) -> Requirement:
    """Annotate a requirement; idempotent on already-annotated input."""
    if not req.text.strip():
        raise IngestError(f"requirement {req.id} has empty text")
    tokens = []
    for surface in req.text.split():
        norm = normalize_word(surface)
        if not norm:
            continue
        tokens.append(Token(surface=surface, norm=norm, pos=lexicon.tag(norm)))
    return replace(req, tokens=tuple(tokens))


def annotate_set(reqs: RequirementSet, lexicon: PosLexicon) -> RequirementSet:
    return replace(
        reqs, requirements=tuple(tokenize_and_tag(r, lexicon) for r in reqs.requirements)
    )


def split_requirements(
    reqs: RequirementSet, spec: SplitSpec
) -> tuple[RequirementSet, RequirementSet]:
    """Deterministic (seed, run_index) partition into known and holdout sets.

    The known size is ceil(ratio * n): 99 requirements at 0.7 give (70, 29)
    and 456 give (320, 136).
    """
    if not 0.0 < spec.ratio < 1.0:
        raise IngestError(f"split ratio must be in (0,1), got {spec.ratio}")
    n = len(reqs)
    n_known = math.ceil(spec.ratio * n)
    if n_known < 1:
        raise IngestError("split would leave an empty known set")
    rng = np.random.default_rng((spec.seed, spec.run_index))
    order = rng.permutation(n)
    known_idx = sorted(int(i) for i in order[:n_known])
    holdout_idx = sorted(int(i) for i in order[n_known:])
    known = tuple(reqs.requirements[i] for i in known_idx)
    holdout = tuple(reqs.requirements[i] for i in holdout_idx)
    return (
        RequirementSet(name=f"{reqs.name}-known", requirements=known, provenance=reqs.provenance),
        RequirementSet(
            name=f"{reqs.name}-holdout", requirements=holdout, provenance=reqs.provenance
        ),
    )


def requirement_to_dict(req: Requirement) -> dict:
    return {
        "id": req.id,
        "text": req.text,
        "tokens": [[t.surface, t.norm, t.pos] for t in req.tokens],
    }


def requirement_from_dict(obj: dict) -> Requirement:
    return Requirement(
        id=obj["id"],
        text=obj["text"],
        tokens=tuple(Token(*triple) for triple in obj.get("tokens", [])),
    )
