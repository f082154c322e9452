"""Multi-word term candidates and C-Value termhood ranking.

Candidates are contiguous subsequences of adjective/noun runs that match
ADJ* NOUN+ (1 to 6 words, no stop-words). The score for a candidate ``a`` is

    cvalue(a) = weight(a) * f(a)                        if nothing longer contains it
    cvalue(a) = weight(a) * (f(a) - mean_b f(b))        otherwise, b over the longer
                                                        candidates containing a

with weight(a) = log2 |a| for multi-word candidates and 1 + log2 |a| for
single words, so single-word terms are not zeroed out.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .corpus_ingest import Requirement, RequirementSet

MAX_TERM_WORDS = 6

_CANDIDATE_POS = {"ADJ", "NOUN"}


@dataclass(frozen=True)
class TermCandidate:
    words: tuple[str, ...]
    frequency: int
    nested_in: frozenset[tuple[str, ...]] = frozenset()
    cvalue: float = 0.0
    status: str = "Auto"

    @property
    def label(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class TermSet:
    terms: tuple[TermCandidate, ...]
    source: str

    def __len__(self) -> int:
        return len(self.terms)

    def labels(self) -> list[str]:
        return [t.label for t in self.terms]

    def word_tuples(self) -> set[tuple[str, ...]]:
        return {t.words for t in self.terms}


def _is_subsequence(short: Sequence[str], long: Sequence[str]) -> bool:
    n, m = len(short), len(long)
    return any(tuple(long[i : i + n]) == tuple(short) for i in range(m - n + 1))


def noun_runs(req: Requirement, stopwords: frozenset[str]) -> list[list[tuple[str, str]]]:
    """Maximal runs of (norm, pos) tokens that are ADJ/NOUN and not stop-words."""
    runs: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    for tok in req.tokens:
        if tok.pos in _CANDIDATE_POS and tok.norm not in stopwords:
            current.append((tok.norm, tok.pos))
        else:
            if current:
                runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def _pattern_ok(pos_seq: Sequence[str]) -> bool:
    # ADJ* NOUN+: all adjectives strictly before the first noun
    try:
        first_noun = pos_seq.index("NOUN")
    except ValueError:
        return False
    return all(p == "NOUN" for p in pos_seq[first_noun:])


def extract_candidates(
    reqs: RequirementSet | Iterable[Requirement],
    stopwords: frozenset[str],
) -> list[TermCandidate]:
    """Collect every pattern-matching subsequence with corpus frequencies and nesting."""
    requirements = reqs.requirements if isinstance(reqs, RequirementSet) else tuple(reqs)
    freq: dict[tuple[str, ...], int] = {}
    for req in requirements:
        for run in noun_runs(req, stopwords):
            n = len(run)
            for i in range(n):
                for j in range(i + 1, min(i + MAX_TERM_WORDS, n) + 1):
                    window = run[i:j]
                    if _pattern_ok([p for _, p in window]):
                        words = tuple(w for w, _ in window)
                        freq[words] = freq.get(words, 0) + 1

    candidates = []
    all_words = sorted(freq)
    for words in all_words:
        longer = frozenset(
            other for other in all_words if len(other) > len(words) and _is_subsequence(words, other)
        )
        candidates.append(
            TermCandidate(words=words, frequency=freq[words], nested_in=longer)
        )
    return candidates


def cvalue_score(candidate: TermCandidate, freq_of: dict[tuple[str, ...], int]) -> float:
    length = len(candidate.words)
    weight = 1.0 + math.log2(length) if length == 1 else math.log2(length)
    if not candidate.nested_in:
        return weight * candidate.frequency
    nested_sum = sum(freq_of[b] for b in candidate.nested_in)
    return weight * (candidate.frequency - nested_sum / len(candidate.nested_in))


def cvalue_rank(candidates: list[TermCandidate]) -> list[TermCandidate]:
    """Score all candidates and sort by (cvalue desc, words asc); stable."""
    freq_of = {c.words: c.frequency for c in candidates}
    scored = [replace(c, cvalue=cvalue_score(c, freq_of)) for c in candidates]
    return sorted(scored, key=lambda c: (-c.cvalue, c.words))


def select_terms(
    ranked: list[TermCandidate],
    threshold: float = 1.0,
    curation: dict[str, str] | None = None,
    source: str = "requirements-70",
) -> TermSet:
    """Threshold cut plus manual accept/reject decisions keyed by term label."""
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    curation = curation or {}
    selected: dict[tuple[str, ...], TermCandidate] = {}
    for cand in ranked:
        decision = curation.get(cand.label)
        if decision == "Rejected":
            continue
        if cand.cvalue >= threshold:
            status = "Accepted" if decision == "Accepted" else cand.status
            selected[cand.words] = replace(cand, status=status)
        elif decision == "Accepted":
            selected[cand.words] = replace(cand, status="Accepted")
    for label, decision in sorted(curation.items()):
        words = tuple(label.split())
        if decision == "Accepted" and words not in selected:
            selected[words] = TermCandidate(words=words, frequency=1, status="Accepted")
    terms = tuple(sorted(selected.values(), key=lambda c: c.words))
    if not terms:
        logging.getLogger(__name__).warning("no terms above threshold %.3f", threshold)
    return TermSet(terms=terms, source=source)


def extract_nouns_and_phrases(
    reqs: RequirementSet, stopwords: frozenset[str]
) -> set[tuple[str, ...]]:
    """Naive baseline vocabulary: every noun plus every maximal NOUN+ phrase."""
    out: set[tuple[str, ...]] = set()
    for req in reqs.requirements:
        for run in noun_runs(req, stopwords):
            current: list[str] = []
            for w, p in run:
                if p == "NOUN":
                    out.add((w,))
                    current.append(w)
                else:
                    if len(current) > 1:
                        out.add(tuple(current))
                    current = []
            if len(current) > 1:
                out.add(tuple(current))
    return out


def term_to_dict(c: TermCandidate) -> dict:
    return {
        "words": list(c.words),
        "frequency": c.frequency,
        "nested_in": sorted(" ".join(w) for w in c.nested_in),
        "cvalue": c.cvalue,
        "status": c.status,
    }


def term_from_dict(obj: dict) -> TermCandidate:
    return TermCandidate(
        words=tuple(obj["words"]),
        frequency=obj["frequency"],
        nested_in=frozenset(tuple(s.split()) for s in obj.get("nested_in", [])),
        cvalue=obj.get("cvalue", 0.0),
        status=obj.get("status", "Auto"),
    )
