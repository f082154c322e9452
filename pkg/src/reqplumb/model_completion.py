"""Domain model completion from embedding geometry.

Unmapped requirement concepts become new hierarchy nodes: a candidate link is
accepted when the cosine between the two vectors deviates from the mean
parent-child cosine of the original tree by at most tau standard deviations.
Plain cosine carries no direction, so the orientation of an accepted link is
resolved with the mean hierarchy translation offset (child - parent); ties
make the requirement concept the child. Restructuring then guarantees every
added node ends up below an original model entity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .domain_model import DomainModel, Entity, FactTriple, HierarchyTree, build_hierarchy
from .joint_embedding import EmbeddingSpace
from .synonym_detection import cosine
from .text import slug

logger = logging.getLogger(__name__)

Node = tuple[str, str]  # ("entity", iri) | ("term", label)


@dataclass(frozen=True)
class CosineStats:
    mean: float
    stddev: float
    translation: np.ndarray  # mean of (child_vec - parent_vec) over original edges
    n_edges: int


@dataclass(frozen=True)
class ProposedLink:
    parent: Node
    child: Node
    cosine: float
    deviation: float  # |cos - mean| in stddev units


@dataclass(frozen=True)
class CompletedModel:
    base: DomainModel
    model: DomainModel  # base plus added entities and hierarchy links
    added_entities: tuple[str, ...]  # new entity IRIs
    added_links: tuple[FactTriple, ...]
    tree: HierarchyTree
    unplaced_terms: tuple[str, ...] = ()


def reference_cosine_stats(space: EmbeddingSpace, tree: HierarchyTree) -> CosineStats:
    """Mean/stddev of cos(parent, child) plus the mean translation offset."""
    edges = sorted(tree.parent_of.items())  # (child, parent)
    cosines = []
    offsets = []
    for child, parent in edges:
        if child not in space.entity_index or parent not in space.entity_index:
            continue
        pv, cv = space.entity_vec(parent), space.entity_vec(child)
        cosines.append(cosine(pv, cv))
        offsets.append(cv - pv)
    if len(cosines) < 2:
        raise ValueError(f"cannot calibrate: {len(cosines)} hierarchy pairs (need >= 2)")
    arr = np.array(cosines)
    return CosineStats(
        mean=float(arr.mean()),
        stddev=float(arr.std()),
        translation=np.mean(offsets, axis=0),
        n_edges=len(cosines),
    )


def _direction(u: Node, c: Node, u_vec: np.ndarray, c_vec: np.ndarray,
               stats: CosineStats) -> tuple[Node, Node]:
    """Orient an accepted pair as (parent, child) via the translation offset."""
    res_u_parent = float(np.linalg.norm(u_vec + stats.translation - c_vec))
    res_c_parent = float(np.linalg.norm(c_vec + stats.translation - u_vec))
    if abs(res_u_parent - res_c_parent) < 1e-12:
        if u[0] == "term" and c[0] == "entity":
            return c, u
        if c[0] == "term" and u[0] == "entity":
            return u, c
        return (u, c) if u[1] < c[1] else (c, u)
    return (u, c) if res_u_parent < res_c_parent else (c, u)


def propose_links(
    unmapped_terms: list[str],
    space: EmbeddingSpace,
    stats: CosineStats,
    tau: float,
    entity_candidates: list[str],
) -> list[ProposedLink]:
    """Scan term-entity and term-term pairs; keep links within tau stddevs.

    Terms with no accepted link stay unadded and are reported by restructure.
    """
    terms = [t for t in sorted(set(unmapped_terms)) if t in space.term_index]
    entities = [e for e in sorted(set(entity_candidates)) if e in space.entity_index]
    out: list[ProposedLink] = []

    def consider(u: Node, c: Node, u_vec, c_vec):
        cos = cosine(u_vec, c_vec)
        dev_raw = abs(cos - stats.mean)
        if dev_raw > tau * stats.stddev:
            return
        deviation = dev_raw / stats.stddev if stats.stddev > 0 else 0.0
        parent, child = _direction(u, c, u_vec, c_vec, stats)
        out.append(ProposedLink(parent=parent, child=child, cosine=cos, deviation=deviation))

    for t in terms:
        tv = space.term_vec(t)
        for e in entities:
            consider(("term", t), ("entity", e), tv, space.entity_vec(e))
    for t1, t2 in combinations(terms, 2):
        consider(("term", t1), ("term", t2), space.term_vec(t1), space.term_vec(t2))

    out.sort(key=lambda link: (link.deviation, link.parent, link.child))
    return out


def _find_term_cycle(edges: dict[tuple[str, str], float]) -> list[str] | None:
    children: dict[str, list[str]] = {}
    for (p, c) in sorted(edges):
        children.setdefault(p, []).append(c)
    state: dict[str, int] = {}
    for start in sorted(children):
        if state.get(start, 0) != 0:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        path: list[str] = []
        while stack:
            node, child_pos = stack.pop()
            if child_pos == 0:
                state[node] = 1
                path.append(node)
            kids = children.get(node, ())
            advanced = False
            for k in range(child_pos, len(kids)):
                nxt = kids[k]
                if state.get(nxt, 0) == 1:
                    return path[path.index(nxt):] + [nxt]
                if state.get(nxt, 0) == 0:
                    stack.append((node, k + 1))
                    stack.append((nxt, 0))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                path.pop()
    return None


def _drop_cycles(edges: dict[tuple[str, str], float]) -> dict[tuple[str, str], float]:
    """Remove term-term cycles, dropping the least-confident edge of each."""
    while True:
        cycle = _find_term_cycle(edges)
        if cycle is None:
            return edges
        cycle_edges = list(zip(cycle, cycle[1:]))
        worst = max(cycle_edges, key=lambda e: (edges[e], e))
        logger.warning("cycle %s; dropping edge %s -> %s", " -> ".join(cycle), *worst)
        edges = {e: d for e, d in edges.items() if e != worst}


def restructure(
    model: DomainModel, tree: HierarchyTree, proposals: list[ProposedLink]
) -> CompletedModel:
    """Apply the two adjustment rules and rebuild the tree.

    Rule 2 first: a term proposed as parent of model entity De, that is also
    parent of a term child of De, is spliced in between (De -> Re -> Re').
    Rule 1 then turns any remaining term-above-model link into a child link.
    Added nodes unreachable from an original entity are left out.
    """
    term_parent_of_model: list[ProposedLink] = []
    model_parent_of_term: dict[tuple[str, str], float] = {}
    term_parent_of_term: dict[tuple[str, str], float] = {}
    for link in proposals:
        pk, ck = link.parent[0], link.child[0]
        if pk == "term" and ck == "entity":
            term_parent_of_model.append(link)
        elif pk == "entity" and ck == "term":
            key = (link.parent[1], link.child[1])
            model_parent_of_term[key] = min(
                model_parent_of_term.get(key, np.inf), link.deviation)
        elif pk == "term" and ck == "term":
            key = (link.parent[1], link.child[1])
            term_parent_of_term[key] = min(
                term_parent_of_term.get(key, np.inf), link.deviation)

    for link in term_parent_of_model:
        re_, de = link.parent[1], link.child[1]
        spliced = False
        for (p, c) in sorted(term_parent_of_term):
            if p == re_ and (de, c) in model_parent_of_term:
                del model_parent_of_term[(de, c)]  # Re' now hangs under Re
                spliced = True
        model_parent_of_term[(de, re_)] = min(
            model_parent_of_term.get((de, re_), np.inf), link.deviation)
        if spliced:
            logger.info("spliced %s between %s and its children", re_, de)

    edges_tt = _drop_cycles(term_parent_of_term)

    anchored = {c for (_, c) in model_parent_of_term}
    changed = True
    while changed:
        changed = False
        for (p, c) in sorted(edges_tt):
            if p in anchored and c not in anchored:
                anchored.add(c)
                changed = True

    all_terms = ({c for (_, c) in model_parent_of_term}
                 | {x for e in edges_tt for x in e}
                 | {l.parent[1] for l in term_parent_of_model})
    unplaced = tuple(sorted(all_terms - anchored))
    if unplaced:
        logger.warning("%d terms had no anchored link and were not added", len(unplaced))

    term_iri = {t: f"urn:req:{slug(t)}" for t in anchored}
    hier_rel = model.hierarchy_relation_name()
    child_to_parent = dict(model.hierarchy_predicates)[hier_rel]

    def hierarchy_triple(parent_iri: str, child_iri: str) -> FactTriple:
        if child_to_parent:
            return FactTriple(h=child_iri, r=hier_rel, t=parent_iri)
        return FactTriple(h=parent_iri, r=hier_rel, t=child_iri)

    added_links = []
    for (p, c) in sorted(model_parent_of_term):
        if c in anchored:
            added_links.append(hierarchy_triple(p, term_iri[c]))
    for (p, c) in sorted(edges_tt):
        if p in anchored and c in anchored:
            added_links.append(hierarchy_triple(term_iri[p], term_iri[c]))

    entities = dict(model.entities)
    for t in sorted(anchored):
        entities[term_iri[t]] = Entity(iri=term_iri[t], label=t, category="Classes")
    completed = DomainModel(
        entities=entities,
        triples=model.triples + tuple(added_links),
        hierarchy_predicates=model.hierarchy_predicates,
    )
    new_tree = build_hierarchy(completed)
    return CompletedModel(
        base=model,
        model=completed,
        added_entities=tuple(sorted(term_iri[t] for t in anchored)),
        added_links=tuple(added_links),
        tree=new_tree,
        unplaced_terms=unplaced,
    )


def complete_model(
    model: DomainModel,
    tree: HierarchyTree,
    space: EmbeddingSpace,
    unmapped_terms: list[str],
    tau: float = 1.0,
    entity_candidates: list[str] | None = None,
) -> CompletedModel:
    """Calibrate, propose, and restructure in one call."""
    stats = reference_cosine_stats(space, tree)
    if entity_candidates is None:
        entity_candidates = [e.iri for e in model.classes()]
    proposals = propose_links(unmapped_terms, space, stats, tau, entity_candidates)
    return restructure(model, tree, proposals)


def completion_report(cm: CompletedModel, rt, synonyms) -> dict:
    """Added-link counts and the known-term mapping rate on the completed model.

    A term counts as mapped iff it names a node of the completed model,
    whether original (by name or synonym) or added during completion.
    """
    from .mapping import build_mapping

    hier_rel = cm.base.hierarchy_relation_name()
    original_hier = sum(1 for t in cm.base.triples if t.r == hier_rel)
    mapping = build_mapping(rt, cm.model, synonyms)
    return {
        "schema": 1,
        "hierarchy_relation": hier_rel,
        "added_entities": len(cm.added_entities),
        "added_links": len(cm.added_links),
        "total_hierarchy_links": original_hier + len(cm.added_links),
        "rt_size": mapping.rt_size,
        "mapped_terms": mapping.mapped_terms,
        "rate": mapping.rate,
        "unplaced_terms": list(cm.unplaced_terms),
    }


def completed_to_dict(cm: CompletedModel) -> dict:
    return {
        "schema": 1,
        "added_entities": [
            {"iri": iri, "label": cm.model.entities[iri].label}
            for iri in cm.added_entities
        ],
        "added_links": sorted([t.h, t.r, t.t] for t in cm.added_links),
        "unplaced_terms": list(cm.unplaced_terms),
    }
