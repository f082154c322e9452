"""Term-to-entity mapping from name equality and accepted synonym pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus_ingest import RequirementSet
from .domain_model import DomainModel
from .synonym_detection import SynonymPair
from .term_extraction import TermSet, extract_nouns_and_phrases


@dataclass(frozen=True)
class MappingPair:
    term: str
    entity_iri: str
    entity_label: str
    kind: str  # Direct | Synonym


@dataclass(frozen=True)
class MappingSet:
    pairs: tuple[MappingPair, ...]
    rt_size: int

    @property
    def mapped_terms(self) -> int:
        return len({p.term for p in self.pairs})

    @property
    def rate(self) -> float:
        return self.mapped_terms / self.rt_size if self.rt_size else 0.0

    def mapped_term_labels(self) -> set[str]:
        return {p.term for p in self.pairs}

    def mapped_entity_iris(self) -> set[str]:
        return {p.entity_iri for p in self.pairs}


def build_mapping(
    rt: TermSet,
    model: DomainModel,
    synonyms: Iterable[SynonymPair] = (),
    restrict: set[str] | None = None,
) -> MappingSet:
    """Direct matches by normalized name plus synonym-mediated matches.

    ``restrict`` limits the entity side to the given categories (e.g.
    {"Classes"}); by default every entity category may be mapped, matching how
    the headline mapping rate counts Named Individual hits too.
    """
    if len(rt) == 0:
        raise ValueError("empty requirement term set")
    by_label: dict[str, list] = {}
    for e in model.entities.values():
        if restrict is not None and e.category not in restrict:
            continue
        by_label.setdefault(e.label, []).append(e)

    synonym_of: dict[str, set[str]] = {}
    for p in synonyms:
        synonym_of.setdefault(p.a, set()).add(p.b)
        synonym_of.setdefault(p.b, set()).add(p.a)

    pairs: list[MappingPair] = []
    for term in sorted(rt.labels()):
        for e in by_label.get(term, []):
            pairs.append(MappingPair(term=term, entity_iri=e.iri,
                                     entity_label=e.label, kind="Direct"))
        for other in sorted(synonym_of.get(term, ())):
            for e in by_label.get(other, []):
                pairs.append(MappingPair(term=term, entity_iri=e.iri,
                                         entity_label=e.label, kind="Synonym"))
    # a term that matches the same entity both ways counts once, as Direct
    dedup: dict[tuple[str, str], MappingPair] = {}
    for p in pairs:
        key = (p.term, p.entity_iri)
        if key not in dedup or (dedup[key].kind == "Synonym" and p.kind == "Direct"):
            dedup[key] = p
    ordered = tuple(sorted(dedup.values(), key=lambda p: (p.term, p.entity_iri)))
    return MappingSet(pairs=ordered, rt_size=len(rt))


def compare_mapping_methods(
    reqs: RequirementSet,
    model: DomainModel,
    rt: TermSet,
    synonyms: Iterable[SynonymPair],
    stopwords: frozenset[str],
    restrict: set[str] | None = None,
    gold_row: dict | None = None,
) -> list[dict]:
    """Mapping-rate comparison across extraction strategies.

    Rows: naive nouns/noun-phrases with direct matching, the curated term set
    with direct matching, and the same term set with synonym supplements. An
    optional human gold row is appended verbatim when provided.
    """
    rows: list[dict] = []

    naive_terms = sorted(" ".join(w) for w in extract_nouns_and_phrases(reqs, stopwords))
    by_label = {e.label for e in model.entities.values()
                if restrict is None or e.category in restrict}
    naive_mapped = [t for t in naive_terms if t in by_label]
    rows.append(_row("NNs/NPs", len(naive_terms), len(naive_mapped)))

    direct_only = build_mapping(rt, model, synonyms=(), restrict=restrict)
    rows.append(_row("C-Value", direct_only.rt_size, direct_only.mapped_terms))

    with_syn = build_mapping(rt, model, synonyms=synonyms, restrict=restrict)
    rows.append(_row("C-Value+Synonym", with_syn.rt_size, with_syn.mapped_terms))

    if gold_row is not None:
        rows.append(_row("Manual", gold_row["n_terms"], gold_row["n_mapped"]))
    return rows


def _row(method: str, n_terms: int, n_mapped: int) -> dict:
    return {
        "method": method,
        "n_terms": n_terms,
        "n_mapped": n_mapped,
        "rate": n_mapped / n_terms if n_terms else 0.0,
    }


def mapping_to_dict(m: MappingSet) -> dict:
    return {
        "schema": 1,
        "pairs": [
            {"term": p.term, "entity": p.entity_iri, "label": p.entity_label, "kind": p.kind}
            for p in m.pairs
        ],
        "rt_size": m.rt_size,
        "mapped_terms": m.mapped_terms,
        "rate": m.rate,
    }


def mapping_from_dict(obj: dict) -> MappingSet:
    pairs = tuple(
        MappingPair(term=p["term"], entity_iri=p["entity"],
                    entity_label=p["label"], kind=p["kind"])
        for p in obj["pairs"]
    )
    return MappingSet(pairs=pairs, rt_size=obj["rt_size"])
