"""Staged execution over a workspace: each stage persists one inspectable
artifact set, records it in the manifest, and is skipped when nothing it
consumes has changed."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from pathlib import Path

from ..corpus_ingest import (
    Requirement,
    RequirementSet,
    SplitSpec,
    annotate_set,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
    requirement_from_dict,
    requirement_to_dict,
    split_requirements,
)
from ..domain_model import (
    build_hierarchy,
    model_from_dict,
    model_to_dict,
    parse_rdf,
    tree_to_dict,
)
from ..joint_embedding import space_from_dict, space_to_dict, term_vocabulary, train_joint
from ..mapping import build_mapping, compare_mapping_methods, mapping_from_dict, mapping_to_dict
from ..model_completion import complete_model, completed_to_dict, completion_report
from ..regularity_recommend import (
    STRATEGIES,
    ExperimentConfig,
    entity_type_distribution,
    node_position_distribution,
    recommend,
    requirement_side_stats,
    run_experiment,
    select_families,
)
from ..synonym_detection import (
    accepted_synonyms,
    build_corpus_embeddings,
    detect_synonyms,
    load_synonym_lexicon,
    pair_from_dict,
    pair_to_dict,
    resolve_synonym_statuses,
)
from ..term_extraction import (
    TermSet,
    cvalue_rank,
    extract_candidates,
    select_terms,
    term_from_dict,
    term_to_dict,
)
from .config import PipelineConfig
from .workspace import Workspace

logger = logging.getLogger(__name__)

STAGES = (
    "ingest", "extract", "synonyms", "map", "embed",
    "complete", "analyze", "recommend", "evaluate",
)

PRIMARY_ARTIFACT = {
    "ingest": "requirements.jsonl",
    "extract": "terms_requirements-70.json",
    "synonyms": "synonyms.json",
    "map": "mapping.json",
    "embed": "embeddings.json",
    "complete": "completed_model.json",
    "analyze": "families.json",
    "recommend": "recommendations_FamilyBelonging.json",
    "evaluate": "evaluation_report.json",
}

_CURATION_INPUTS = {"extract": "terms", "synonyms": "synonyms"}


class StageError(RuntimeError):
    pass


def _input_hash(stage: str, cfg: PipelineConfig, ws: Workspace) -> str:
    h = hashlib.sha256()
    h.update(cfg.canonical_json().encode())
    manifest = ws.manifest()["stages"]
    for dep in STAGES[: STAGES.index(stage)]:
        entry = manifest.get(dep, {})
        h.update(json.dumps(entry.get("files", {}), sort_keys=True).encode())
    kind = _CURATION_INPUTS.get(stage)
    if kind is not None:
        h.update(json.dumps(ws.curation_decisions(kind), sort_keys=True).encode())
    return h.hexdigest()[:16]


def _check_deps(stage: str, ws: Workspace) -> None:
    manifest = ws.manifest()["stages"]
    for dep in STAGES[: STAGES.index(stage)]:
        if dep not in manifest:
            raise StageError(f"requires {PRIMARY_ARTIFACT[dep]} (run: {dep})")


# --- artifact loading helpers (hash-verified through the manifest) -----------

def _load_requirements(ws: Workspace) -> tuple[RequirementSet, RequirementSet, RequirementSet]:
    path = ws.verified_path("ingest", "requirements.jsonl")
    known, holdout, everything = [], [], []
    for line in path.read_text("utf-8").splitlines():
        obj = json.loads(line)
        req = requirement_from_dict(obj)
        everything.append(req)
        (known if obj["split"] == "known" else holdout).append(req)
    return (
        RequirementSet("known", tuple(known)),
        RequirementSet("holdout", tuple(holdout)),
        RequirementSet("all", tuple(everything)),
    )


def _load_model(ws: Workspace):
    return model_from_dict(json.loads(ws.verified_path("ingest", "model.json").read_text("utf-8")))


def _load_terms(ws: Workspace, name: str, source: str) -> TermSet:
    obj = json.loads(ws.verified_path("extract", name).read_text("utf-8"))
    terms = tuple(term_from_dict(t) for t in obj["terms"]
                  if t.get("status") != "Rejected")
    return TermSet(terms=terms, source=source)


def _load_synonyms(ws: Workspace):
    obj = json.loads(ws.verified_path("synonyms", "synonyms.json").read_text("utf-8"))
    return [pair_from_dict(p) for p in obj["pairs"]]


def _load_mapping(ws: Workspace):
    return mapping_from_dict(json.loads(ws.verified_path("map", "mapping.json").read_text("utf-8")))


def _stopwords(cfg: PipelineConfig):
    return load_stopwords(cfg.stopwords_path)


def _experiment_config(cfg: PipelineConfig, n_runs: int | None = None) -> ExperimentConfig:
    return ExperimentConfig(
        ratio=cfg.ratio,
        seed=cfg.seed,
        n_runs=cfg.n_runs if n_runs is None else n_runs,
        cvalue_threshold=cfg.cvalue_threshold,
        sim_threshold=cfg.sim_threshold,
        tau=cfg.tau,
        family_rule=(cfg.family_rule, cfg.family_param),
        train=cfg.train,
        restrict_categories=set(cfg.restrict_categories) if cfg.restrict_categories else None,
        term_curation=None,
        synonym_curation=None,
    )


# --- stages -------------------------------------------------------------------

def _stage_ingest(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    lexicon = load_pos_lexicon(cfg.pos_lexicon_path)
    reqs = annotate_set(
        load_requirements(cfg.requirements_path, cfg.requirements_format), lexicon
    )
    known, holdout = split_requirements(reqs, SplitSpec(cfg.ratio, cfg.seed, run_index=0))
    known_ids = set(known.ids())
    lines = []
    for req in reqs.requirements:
        obj = requirement_to_dict(req)
        obj["split"] = "known" if req.id in known_ids else "holdout"
        lines.append(json.dumps(obj, sort_keys=True))
    files = [ws.write_text("requirements.jsonl", "\n".join(lines) + "\n")]
    files.append(ws.write_json("split.json", {
        "schema": 1, "ratio": cfg.ratio, "seed": cfg.seed, "run_index": 0,
        "known": sorted(known_ids), "holdout": sorted(holdout.ids()),
    }))
    model = parse_rdf(
        cfg.model_path, cfg.model_syntax,
        hierarchy_predicates=tuple((n, bool(d)) for n, d in cfg.hierarchy_predicates),
    )
    files.append(ws.write_json("model.json", model_to_dict(model)))
    files.append(ws.write_json("hierarchy.json", tree_to_dict(build_hierarchy(model))))
    return files


def _terms_file(ws: Workspace, name: str, term_set: TermSet, rejected: list) -> Path:
    payload = {
        "schema": 1,
        "source": term_set.source,
        "terms": [term_to_dict(t) for t in term_set.terms] + [term_to_dict(t) for t in rejected],
    }
    return ws.write_json(name, payload)


def _stage_extract(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    known, holdout, _ = _load_requirements(ws)
    stopwords = _stopwords(cfg)
    curation = ws.curation_decisions("terms")

    ranked = cvalue_rank(extract_candidates(known, stopwords))
    rt = select_terms(ranked, cfg.cvalue_threshold, curation)
    rejected = [
        c for c in ranked
        if c.cvalue >= cfg.cvalue_threshold and curation.get(c.label) == "Rejected"
    ]
    from dataclasses import replace
    rejected = [replace(c, status="Rejected") for c in rejected]
    files = [_terms_file(ws, "terms_requirements-70.json", rt, rejected)]

    gold_ranked = cvalue_rank(extract_candidates(holdout, stopwords))
    gold = select_terms(gold_ranked, cfg.cvalue_threshold, source="holdout-30")
    files.append(_terms_file(ws, "terms_holdout-30.json", gold, []))

    if cfg.corpus_dir:
        lexicon = load_pos_lexicon(cfg.pos_lexicon_path)
        corpus_reqs = []
        for doc in sorted(Path(cfg.corpus_dir).glob("*.txt")):
            for j, line in enumerate(doc.read_text("utf-8").splitlines(), 1):
                if line.strip():
                    corpus_reqs.append(Requirement(id=f"{doc.stem}-{j}", text=line))
        corpus_set = annotate_set(RequirementSet("corpus", tuple(corpus_reqs)), lexicon)
        corpus_ranked = cvalue_rank(extract_candidates(corpus_set, stopwords))
        corpus_terms = select_terms(corpus_ranked, cfg.cvalue_threshold,
                                    source="domain-corpus")
        files.append(_terms_file(ws, "terms_domain-corpus.json", corpus_terms, []))
    return files


def _stage_synonyms(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    rt = _load_terms(ws, "terms_requirements-70.json", "requirements-70")
    model = _load_model(ws)
    lexicon = load_synonym_lexicon(cfg.synonym_lexicon_path)
    curation = ws.curation_decisions("synonyms")
    if cfg.corpus_dir:
        embeddings = build_corpus_embeddings(
            cfg.corpus_dir, dim=cfg.word_dim, seed=cfg.word_seed,
            window=cfg.word_window, min_count=cfg.word_min_count,
            epochs=cfg.word_epochs, lr=cfg.word_lr,
        )
        ct_labels = [e.label for e in model.classes()]
        pairs = resolve_synonym_statuses(
            detect_synonyms(rt, ct_labels, embeddings, lexicon, cfg.sim_threshold),
            curation,
        )
    else:
        logger.warning("no corpus_dir configured; synonym detection skipped")
        pairs = []
    files = [ws.write_json("synonyms.json", {
        "schema": 1, "pairs": [pair_to_dict(p) for p in pairs],
    })]
    return files


def _stage_map(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    rt = _load_terms(ws, "terms_requirements-70.json", "requirements-70")
    model = _load_model(ws)
    accepted = accepted_synonyms(_load_synonyms(ws))
    restrict = set(cfg.restrict_categories) if cfg.restrict_categories else None
    mapping = build_mapping(rt, model, accepted, restrict=restrict)
    files = [ws.write_json("mapping.json", mapping_to_dict(mapping))]
    known, _, _ = _load_requirements(ws)
    rows = compare_mapping_methods(known, model, rt, accepted, _stopwords(cfg), restrict)
    files.append(ws.write_json("mapping_comparison.json", {"schema": 1, "rows": rows}))
    return files


def _stage_embed(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    known, _, _ = _load_requirements(ws)
    model = _load_model(ws)
    rt = _load_terms(ws, "terms_requirements-70.json", "requirements-70")
    mapping = _load_mapping(ws)
    space, log = train_joint(model, known, rt, mapping, cfg.train, _stopwords(cfg))
    files = [ws.write_json("embeddings.json", space_to_dict(space))]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["epoch", "L", "L_K", "L_R", "L_A"])
    for row in log:
        writer.writerow([row.epoch, f"{row.loss:.6f}", f"{row.loss_k:.6f}",
                         f"{row.loss_r:.6f}", f"{row.loss_a:.6f}"])
    files.append(ws.write_text("training_log.csv", buf.getvalue()))
    return files


def _stage_complete(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    model = _load_model(ws)
    tree = build_hierarchy(model)
    space = space_from_dict(json.loads(
        ws.verified_path("embed", "embeddings.json").read_text("utf-8")))
    known, _, _ = _load_requirements(ws)
    rt = _load_terms(ws, "terms_requirements-70.json", "requirements-70")
    mapping = _load_mapping(ws)
    vocabulary, _ = term_vocabulary(known, rt, _stopwords(cfg))
    entity_labels = {e.label for e in model.entities.values()}
    mapped_terms = mapping.mapped_term_labels()
    unmapped = [v for v in vocabulary if v not in mapped_terms and v not in entity_labels]
    cm = complete_model(model, tree, space, unmapped, cfg.tau)
    accepted = accepted_synonyms(_load_synonyms(ws))
    files = [
        ws.write_json("completed_model.json", completed_to_dict(cm)),
        ws.write_json("completion_report.json", completion_report(cm, rt, accepted)),
    ]
    return files


def _completed_model(ws: Workspace):
    """Rebuild the completed model from the base model plus recorded additions."""
    from ..domain_model import DomainModel, Entity, FactTriple

    model = _load_model(ws)
    obj = json.loads(ws.verified_path("complete", "completed_model.json").read_text("utf-8"))
    entities = dict(model.entities)
    for added in obj["added_entities"]:
        entities[added["iri"]] = Entity(iri=added["iri"], label=added["label"],
                                        category="Classes")
    triples = model.triples + tuple(FactTriple(h, r, t) for h, r, t in obj["added_links"])
    return DomainModel(entities=entities, triples=triples,
                       hierarchy_predicates=model.hierarchy_predicates)


def _stage_analyze(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    model = _load_model(ws)
    tree = build_hierarchy(model)
    mapping = _load_mapping(ws)
    known, _, _ = _load_requirements(ws)
    rt = _load_terms(ws, "terms_requirements-70.json", "requirements-70")
    accepted = accepted_synonyms(_load_synonyms(ws))

    completed = _completed_model(ws)
    completed_tree = build_hierarchy(completed)
    mapping_completed = build_mapping(
        rt, completed, accepted,
        restrict=set(cfg.restrict_categories) if cfg.restrict_categories else None,
    )

    regularities = {
        "schema": 1,
        "original": {
            "entity_types": entity_type_distribution(mapping, model),
            "node_positions": node_position_distribution(mapping, tree),
            "requirement_side": requirement_side_stats(known, mapping),
        },
        "completed": {
            "entity_types": entity_type_distribution(mapping_completed, completed),
            "node_positions": node_position_distribution(mapping_completed, completed_tree),
        },
    }
    files = [ws.write_json("regularities.json", regularities)]

    labels = {e.iri: e.label for e in model.entities.values()}
    labels_c = {e.iri: e.label for e in completed.entities.values()}
    fam = select_families(tree, mapping.mapped_entity_iris(),
                          (cfg.family_rule, cfg.family_param), labels)
    fam_c = select_families(completed_tree, mapping_completed.mapped_entity_iris(),
                            (cfg.family_rule, cfg.family_param), labels_c)

    def fam_dict(f):
        return {
            "roots": list(f.roots),
            "scope": sorted(f.scope),
            "scope_fraction": f.scope_fraction,
        }

    files.append(ws.write_json("families.json", {
        "schema": 1, "original": fam_dict(fam), "completed": fam_dict(fam_c),
    }))
    return files


def _stage_recommend(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    model = _load_model(ws)
    tree = build_hierarchy(model)
    mapping = _load_mapping(ws)
    fam_obj = json.loads(ws.verified_path("analyze", "families.json").read_text("utf-8"))

    from ..regularity_recommend import FamilySelection

    def fam_from(obj):
        return FamilySelection(
            roots=tuple(obj["roots"]),
            scope=frozenset(obj["scope"]),
            scope_fraction=obj["scope_fraction"],
        )

    completed = _completed_model(ws)
    completed_tree = build_hierarchy(completed)

    files = []
    for strategy in STRATEGIES:
        rec = recommend(model, tree, mapping, strategy, fam_from(fam_obj["original"]))
        files.append(ws.write_json(f"recommendations_{strategy}.json", {
            "schema": 1, "strategy": strategy, "model": "original",
            "entities": [[iri, label] for iri, label in rec.entities],
        }))
        rec_c = recommend(completed, completed_tree, mapping, strategy,
                          fam_from(fam_obj["completed"]))
        files.append(ws.write_json(f"recommendations_completed_{strategy}.json", {
            "schema": 1, "strategy": strategy, "model": "completed",
            "entities": [[iri, label] for iri, label in rec_c.entities],
        }))
    return files


def _gold_override(cfg: PipelineConfig) -> TermSet | None:
    if not cfg.gold_terms_path:
        return None
    from ..term_extraction import TermCandidate

    labels = [line.strip().lower() for line in
              Path(cfg.gold_terms_path).read_text("utf-8").splitlines() if line.strip()]
    return TermSet(
        terms=tuple(TermCandidate(words=tuple(l.split()), frequency=1, status="Accepted")
                    for l in sorted(set(labels))),
        source="holdout-30",
    )


def _stage_evaluate(cfg: PipelineConfig, ws: Workspace) -> list[Path]:
    _, _, everything = _load_requirements(ws)
    model = _load_model(ws)
    lexicon = load_synonym_lexicon(cfg.synonym_lexicon_path)
    stopwords = _stopwords(cfg)
    if not cfg.corpus_dir:
        raise StageError("evaluate requires corpus_dir for synonym embeddings")
    embeddings = build_corpus_embeddings(
        cfg.corpus_dir, dim=cfg.word_dim, seed=cfg.word_seed,
        window=cfg.word_window, min_count=cfg.word_min_count,
        epochs=cfg.word_epochs, lr=cfg.word_lr,
    )
    exp_cfg = _experiment_config(cfg)
    exp_cfg.term_curation = ws.curation_decisions("terms") or None
    exp_cfg.synonym_curation = ws.curation_decisions("synonyms") or None
    report = run_experiment(model, everything, embeddings, lexicon, stopwords, exp_cfg,
                            gold_override=_gold_override(cfg))
    files = [ws.write_json("evaluation_report.json", report)]

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["model", "strategy", "recall", "precision", "f2"])
    for kind in ("original", "completed"):
        for strategy, metrics in report["averages"][kind].items():
            writer.writerow([kind, strategy, f"{metrics['recall']:.4f}",
                             f"{metrics['precision']:.4f}", f"{metrics['f2']:.4f}"])
    for strategy, gains in report["averages"]["gain"].items():
        writer.writerow(["gain", strategy, f"{gains['recall']:.4f}", "",
                         f"{gains['f2']:.4f}"])
    files.append(ws.write_text("evaluation_report.csv", buf.getvalue()))
    return files


_STAGE_FUNCS = {
    "ingest": _stage_ingest,
    "extract": _stage_extract,
    "synonyms": _stage_synonyms,
    "map": _stage_map,
    "embed": _stage_embed,
    "complete": _stage_complete,
    "analyze": _stage_analyze,
    "recommend": _stage_recommend,
    "evaluate": _stage_evaluate,
}


def run_stage(stage: str, cfg: PipelineConfig, ws: Workspace, force: bool = False) -> list[Path]:
    """Run one stage; a stage whose inputs are unchanged is a no-op."""
    if stage not in STAGES:
        raise StageError(f"unknown stage {stage!r} (expected one of {', '.join(STAGES)})")
    _check_deps(stage, ws)
    input_hash = _input_hash(stage, cfg, ws)
    if not force and ws.stage_is_current(stage, input_hash):
        logger.info("stage %s is current; skipping", stage)
        entry = ws.stage_entry(stage)
        ws.set_status(stage, "done")
        return [ws.root / rel for rel in entry["files"]]
    logger.info("running stage %s", stage)
    files = _STAGE_FUNCS[stage](cfg, ws)
    ws.record_stage(stage, files, input_hash)
    ws.set_status(stage, "done")
    return files


def _curation_pending(stage: str, cfg: PipelineConfig, ws: Workspace) -> bool:
    if cfg.curation_mode != "interactive":
        return False
    kind = {"extract": "terms", "synonyms": "synonyms"}.get(stage)
    if kind is None:
        return False
    return not ws.has(f"curation/{kind}.json")


def run_all(cfg: PipelineConfig, ws: Workspace) -> dict:
    """Execute every stage in order; interactive mode pauses for curation.

    Returns {"status": "complete", "report": ...} or
    {"status": "awaiting-curation", "stage": <stage>}.
    """
    for stage in STAGES:
        run_stage(stage, cfg, ws)
        if _curation_pending(stage, cfg, ws):
            ws.set_status(stage, "awaiting-curation")
            logger.info("pausing after %s: curation decisions not recorded yet", stage)
            return {"status": "awaiting-curation", "stage": stage}
    report = ws.read_json("evaluation_report.json")
    return {"status": "complete", "report": report}
