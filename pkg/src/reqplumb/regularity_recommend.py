"""Distribution regularities of mapped entities, family selection, and the
recommendation/evaluation harness.

The family locator scores every class node with

    ahme(node) = |mapped descendants of node| / |all mapped entities| * level(node)

(descendants exclude the node itself) and takes the subtrees under the
top-scoring nodes as the search scope for missing concepts. Evaluation treats
the holdout split's concepts as the missing gold set and reports Recall,
Precision, and the recall-weighted F2 = 5PR / (4P + R).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .corpus_ingest import Requirement, RequirementSet, SplitSpec, split_requirements
from .domain_model import DomainModel, HierarchyTree, build_hierarchy
from .joint_embedding import TrainConfig, term_vocabulary, train_joint
from .mapping import MappingSet, build_mapping
from .model_completion import complete_model
from .synonym_detection import (
    SynonymLexicon,
    SynonymPair,
    WordEmbeddings,
    accepted_synonyms,
    detect_synonyms,
    resolve_synonym_statuses,
)
from .term_extraction import TermSet, cvalue_rank, extract_candidates, select_terms

logger = logging.getLogger(__name__)

STRATEGIES = ("None", "EntityType", "NodeType", "FamilyBelonging", "Combination")

POSITIONS = ("Root", "Intermediate", "Leaf")


@dataclass(frozen=True)
class FamilySelection:
    roots: tuple[dict, ...]  # {"node", "label", "ahme", "level", "mapped_descendants"}
    scope: frozenset[str]
    scope_fraction: float


@dataclass(frozen=True)
class Recommendation:
    strategy: str
    entities: tuple[tuple[str, str], ...]  # (iri, label), ranked

    def labels(self) -> list[str]:
        return [label for _, label in self.entities]

    def iris(self) -> set[str]:
        return {iri for iri, _ in self.entities}


def entity_type_distribution(mapping: MappingSet, model: DomainModel) -> dict:
    """Category counts and fractions among mapped entities."""
    mapped = sorted(mapping.mapped_entity_iris())
    if not mapped:
        logger.warning("no mapped entities; type distribution is empty")
        return {}
    counts: dict[str, int] = {}
    for iri in mapped:
        cat = model.entities[iri].category if iri in model.entities else "Other"
        counts[cat] = counts.get(cat, 0) + 1
    total = len(mapped)
    return {cat: {"count": n, "fraction": n / total} for cat, n in sorted(counts.items())}


def node_position_distribution(mapping: MappingSet, tree: HierarchyTree) -> dict:
    """Root/Intermediate/Leaf counts over mapped entities; off-tree ones are 'untracked'."""
    counts = {"Root": 0, "Intermediate": 0, "Leaf": 0, "untracked": 0}
    mapped = mapping.mapped_entity_iris()
    for iri in sorted(mapped):
        counts[tree.position.get(iri, "untracked")] += 1
    total = len(mapped)
    counts["leaf_fraction"] = counts["Leaf"] / total if total else 0.0
    return counts


def ahme(tree: HierarchyTree, mapped: set[str], node: str) -> float:
    """(mapped descendants / all mapped) * level. The node itself is not counted."""
    if node not in tree.level:
        raise KeyError(f"node {node!r} not in hierarchy")
    me = len(mapped)
    if me == 0:
        raise ValueError("AHME undefined with zero mapped entities")
    med = len(tree.descendants(node) & mapped)
    return (med / me) * tree.level[node]


def select_families(
    tree: HierarchyTree,
    mapped: set[str],
    rule: tuple[str, float] = ("relative", 0.5),
    labels: dict[str, str] | None = None,
) -> FamilySelection:
    """Family roots by AHME; scope is every node under a selected root.

    ``rule`` is ("top_k", k) or ("relative", alpha); the default keeps every
    node scoring at least alpha * max. Ties break by (ahme desc, label asc).
    Candidates nested inside (or above) an already-selected root are skipped:
    every ancestor of a family root inherits its mapped descendants, so
    without the filter the chain above the best family would crowd out every
    other family.
    """
    labels = labels or {}
    scored = []
    for node in tree.nodes():
        value = ahme(tree, mapped, node)
        if value > 0:
            scored.append((node, value))
    scored.sort(key=lambda nv: (-nv[1], labels.get(nv[0], nv[0])))

    kind, param = rule
    if kind == "top_k":
        budget = int(param)
        cutoff = None
    elif kind == "relative":
        budget = len(scored)
        cutoff = param * scored[0][1] if scored else 0.0
    else:
        raise ValueError(f"unknown family rule {kind!r}")

    chosen: list[tuple[str, float]] = []
    for node, value in scored:
        if len(chosen) >= budget or (cutoff is not None and value < cutoff):
            break
        nested = any(
            node in tree.descendants(prev) or prev in tree.descendants(node)
            for prev, _ in chosen
        )
        if not nested:
            chosen.append((node, value))

    scope: set[str] = set()
    roots = []
    for node, value in chosen:
        descendants = tree.descendants(node)
        scope |= {node} | descendants
        roots.append({
            "node": node,
            "label": labels.get(node, node),
            "ahme": value,
            "level": tree.level[node],
            "mapped_descendants": len(descendants & mapped),
        })
    n_nodes = len(tree.level)
    return FamilySelection(
        roots=tuple(roots),
        scope=frozenset(scope),
        scope_fraction=len(scope) / n_nodes if n_nodes else 0.0,
    )


def _mapped_term_occurrences(req: Requirement, mapped_terms: set[str]) -> list[tuple[int, int]]:
    """(start, end) token spans of mapped-term occurrences, longest match first."""
    norms = [t.norm for t in req.tokens]
    term_tuples = {tuple(t.split()) for t in mapped_terms}
    lengths = sorted({len(t) for t in term_tuples}, reverse=True)
    spans = []
    i = 0
    while i < len(norms):
        hit = None
        for L in lengths:
            if i + L <= len(norms) and tuple(norms[i : i + L]) in term_tuples:
                hit = (i, i + L)
                break
        if hit:
            spans.append(hit)
            i = hit[1]
        else:
            i += 1
    return spans


def requirement_side_stats(
    reqs: RequirementSet, mapping: MappingSet
) -> dict:
    """How mapped concepts show up inside requirement statements.

    Reports the fraction of requirements containing a mapped term, the
    fraction of those containing two or more, and the fraction of the latter
    where two mapped terms are joined by a coordinating conjunction.
    """
    mapped_terms = mapping.mapped_term_labels()
    n_total = len(reqs)
    with_mapped = 0
    with_two_plus = 0
    with_juxtaposition = 0
    for req in reqs.requirements:
        spans = _mapped_term_occurrences(req, mapped_terms)
        if not spans:
            continue
        with_mapped += 1
        if len(spans) < 2:
            continue
        with_two_plus += 1
        for (s1, e1), (s2, _) in zip(spans, spans[1:]):
            gap = req.tokens[e1:s2]
            if 1 <= len(gap) <= 2 and gap[0].pos == "CONJ" and all(
                t.pos in ("CONJ", "DET") for t in gap
            ):
                with_juxtaposition += 1
                break
    return {
        "requirements": n_total,
        "with_mapped": with_mapped,
        "req_with_mapped": with_mapped / n_total if n_total else 0.0,
        "with_two_plus": with_two_plus,
        "req_with_2plus": with_two_plus / with_mapped if with_mapped else 0.0,
        "juxtaposition": with_juxtaposition,
        "juxtaposition_fraction": with_juxtaposition / with_two_plus if with_two_plus else 0.0,
    }


def recommend(
    model: DomainModel,
    tree: HierarchyTree,
    mapping: MappingSet,
    strategy: str,
    families: FamilySelection | None = None,
) -> Recommendation:
    """Candidate missing entities under one regularity strategy.

    Entities mapped by the known requirements are never candidates (they are
    present already). Candidates are ordered by label for determinism.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    mapped = mapping.mapped_entity_iris()
    pool = [e for e in model.entities.values() if e.iri not in mapped]
    if strategy in ("EntityType", "NodeType", "Combination"):
        pool = [e for e in pool if e.category == "Classes"]
    if strategy in ("NodeType", "Combination"):
        pool = [e for e in pool if tree.position.get(e.iri) == "Leaf"]
    if strategy in ("FamilyBelonging", "Combination"):
        if families is None:
            raise ValueError(f"strategy {strategy} requires a family selection")
        pool = [e for e in pool if e.iri in families.scope]
    ordered = tuple(sorted(((e.iri, e.label) for e in pool), key=lambda p: (p[1], p[0])))
    return Recommendation(strategy=strategy, entities=ordered)


def f2_score(recall: float, precision: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 5 * precision * recall / (4 * precision + recall)


def evaluate(
    rec: Recommendation,
    gold: TermSet,
    synonyms: list[SynonymPair],
    covered_labels: set[str] = frozenset(),
) -> tuple[float, float, float]:
    """Recall/Precision/F2 of a recommendation against holdout gold concepts.

    A recommended entity hits when its label equals, or is an accepted synonym
    of, a gold concept. Gold concepts already covered by the known mapping
    (equal or synonymous to a covered label) are not missing and are dropped
    before scoring; if nothing is left, recall is vacuously 1.
    """
    if len(gold) == 0:
        raise ValueError("empty gold term set")
    syn_of: dict[str, set[str]] = {}
    for p in synonyms:
        syn_of.setdefault(p.a, set()).add(p.b)
        syn_of.setdefault(p.b, set()).add(p.a)

    def matches(x: str, y: str) -> bool:
        return x == y or y in syn_of.get(x, ())

    gold_labels = [
        g for g in sorted(gold.labels())
        if not any(matches(g, c) for c in covered_labels)
    ]
    if not gold_labels:
        return 1.0, 0.0, 0.0
    rec_labels = rec.labels()
    gold_hit = sum(1 for g in gold_labels if any(matches(g, r) for r in set(rec_labels)))
    rec_hit = sum(1 for r in rec_labels if any(matches(r, g) for g in gold_labels))
    recall = gold_hit / len(gold_labels)
    precision = rec_hit / len(rec_labels) if rec_labels else 0.0
    return recall, precision, f2_score(recall, precision)


@dataclass
class ExperimentConfig:
    ratio: float = 0.7
    seed: int = 0
    n_runs: int = 30
    cvalue_threshold: float = 1.0
    sim_threshold: float = 0.6
    tau: float = 1.0
    family_rule: tuple[str, float] = ("relative", 0.5)
    train: TrainConfig = None  # type: ignore[assignment]
    run_completion: bool = True
    restrict_categories: set[str] | None = None
    term_curation: dict[str, str] | None = None
    synonym_curation: dict[str, str] | None = None

    def __post_init__(self):
        if self.train is None:
            self.train = TrainConfig()


def run_pipeline_once(
    model: DomainModel,
    reqs: RequirementSet,
    embeddings: WordEmbeddings,
    lexicon: SynonymLexicon,
    stopwords: frozenset[str],
    cfg: ExperimentConfig,
    run_index: int = 0,
    gold_override: TermSet | None = None,
) -> dict:
    """One split -> extract -> map -> (embed -> complete) -> recommend -> evaluate run."""
    known, holdout = split_requirements(
        reqs, SplitSpec(ratio=cfg.ratio, seed=cfg.seed, run_index=run_index)
    )
    ranked = cvalue_rank(extract_candidates(known, stopwords))
    rt = select_terms(ranked, cfg.cvalue_threshold, cfg.term_curation)
    tree = build_hierarchy(model)
    ct_labels = [e.label for e in model.classes()]
    pairs = detect_synonyms(rt, ct_labels, embeddings, lexicon, cfg.sim_threshold)
    pairs = resolve_synonym_statuses(pairs, cfg.synonym_curation)
    accepted = accepted_synonyms(pairs)
    mapping = build_mapping(rt, model, accepted, restrict=cfg.restrict_categories)
    labels = {e.iri: e.label for e in model.entities.values()}

    if gold_override is not None:
        gold = gold_override
    else:
        gold_ranked = cvalue_rank(extract_candidates(holdout, stopwords))
        gold = select_terms(gold_ranked, cfg.cvalue_threshold, source="holdout-30")
    covered = {labels[iri] for iri in mapping.mapped_entity_iris()}

    result: dict = {
        "run_index": run_index,
        "mapping_rate": mapping.rate,
        "mapped_terms": mapping.mapped_terms,
        "rt_size": mapping.rt_size,
        "gold_size": len(gold),
        "original": {},
        "completed": {},
    }

    families = select_families(tree, mapping.mapped_entity_iris(), cfg.family_rule, labels)
    for strategy in STRATEGIES:
        rec = recommend(model, tree, mapping, strategy, families)
        r, p, f2 = evaluate(rec, gold, accepted, covered)
        result["original"][strategy] = {"recall": r, "precision": p, "f2": f2}

    if cfg.run_completion:
        train_cfg = TrainConfig(
            dim=cfg.train.dim, epochs=cfg.train.epochs,
            learning_rate=cfg.train.learning_rate, batch_size=cfg.train.batch_size,
            seed=cfg.train.seed + run_index, bias=cfg.train.bias,
            softmax_mode=cfg.train.softmax_mode, sample_k=cfg.train.sample_k,
            init_mode=cfg.train.init_mode,
        )
        space, _ = train_joint(model, known, rt, mapping, train_cfg, stopwords)
        vocabulary, _ = term_vocabulary(known, rt, stopwords)
        entity_labels = {e.label for e in model.entities.values()}
        mapped_terms = mapping.mapped_term_labels()
        unmapped = [v for v in vocabulary
                    if v not in mapped_terms and v not in entity_labels]
        cm = complete_model(model, tree, space, unmapped, cfg.tau)
        mapping_completed = build_mapping(rt, cm.model, accepted,
                                          restrict=cfg.restrict_categories)
        labels_c = {e.iri: e.label for e in cm.model.entities.values()}
        families_c = select_families(
            cm.tree, mapping_completed.mapped_entity_iris(), cfg.family_rule, labels_c)
        result["completed_mapping_rate"] = mapping_completed.rate
        result["added_entities"] = len(cm.added_entities)
        for strategy in STRATEGIES:
            rec = recommend(cm.model, cm.tree, mapping, strategy, families_c)
            r, p, f2 = evaluate(rec, gold, accepted, covered)
            result["completed"][strategy] = {"recall": r, "precision": p, "f2": f2}
    return result


def run_experiment(
    model: DomainModel,
    reqs: RequirementSet,
    embeddings: WordEmbeddings,
    lexicon: SynonymLexicon,
    stopwords: frozenset[str],
    cfg: ExperimentConfig,
    gold_override: TermSet | None = None,
) -> dict:
    """Repeat the pipeline n_runs times and average every metric.

    The report carries per-run rows, per-strategy averages for the original
    and completed models, and relative gains (completed vs original) for
    recall and F2.
    """
    runs = []
    failures = []
    for run_index in range(cfg.n_runs):
        try:
            runs.append(run_pipeline_once(
                model, reqs, embeddings, lexicon, stopwords, cfg,
                run_index=run_index, gold_override=gold_override,
            ))
        except Exception as exc:  # noqa: BLE001 - a failed run is reported, not fatal
            logger.error("run %d failed: %s", run_index, exc)
            failures.append({"run_index": run_index, "error": str(exc)})

    def average(kind: str, strategy: str, metric: str) -> float:
        values = [r[kind][strategy][metric] for r in runs if r[kind]]
        return sum(values) / len(values) if values else 0.0

    averages: dict = {"original": {}, "completed": {}, "gain": {}}
    for strategy in STRATEGIES:
        averages["original"][strategy] = {
            m: average("original", strategy, m) for m in ("recall", "precision", "f2")
        }
        if cfg.run_completion:
            averages["completed"][strategy] = {
                m: average("completed", strategy, m) for m in ("recall", "precision", "f2")
            }
            gains = {}
            for m in ("recall", "f2"):
                old = averages["original"][strategy][m]
                new = averages["completed"][strategy][m]
                gains[m] = (new - old) / old if old else 0.0
            averages["gain"][strategy] = gains

    report = {
        "schema": 1,
        "n_runs": cfg.n_runs,
        "completed_runs": len(runs),
        "failures": failures,
        "mapping_rate_avg": (sum(r["mapping_rate"] for r in runs) / len(runs)) if runs else 0.0,
        "runs": runs,
        "averages": averages,
    }
    if cfg.run_completion and runs:
        completed_rates = [r.get("completed_mapping_rate", 0.0) for r in runs]
        report["completed_mapping_rate_avg"] = sum(completed_rates) / len(completed_rates)
    return report
