"""Complete the domain model with unmapped requirement concepts."""

from pathlib import Path

from reqplumb import (
    SplitSpec,
    TrainConfig,
    annotate_set,
    build_hierarchy,
    build_mapping,
    complete_model,
    completion_report,
    cvalue_rank,
    extract_candidates,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
    parse_rdf,
    reference_cosine_stats,
    select_terms,
    split_requirements,
    train_joint,
)
from reqplumb.joint_embedding import term_vocabulary

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

stopwords = load_stopwords()
model = parse_rdf(FIXTURES / "uavmini_model.rdf")
tree = build_hierarchy(model)
reqs = annotate_set(load_requirements(FIXTURES / "uavmini_requirements.txt"),
                    load_pos_lexicon())
known, _ = split_requirements(reqs, SplitSpec(0.7, seed=11))
rt = select_terms(cvalue_rank(extract_candidates(known, stopwords)), threshold=1.0)
mapping = build_mapping(rt, model, [])

cfg = TrainConfig(dim=16, epochs=60, learning_rate=0.02, seed=5)
space, _ = train_joint(model, known, rt, mapping, cfg, stopwords)

stats = reference_cosine_stats(space, tree)
print(f"reference parent-child cosine: mean {stats.mean:.3f}, "
      f"stddev {stats.stddev:.3f} over {stats.n_edges} edges")

vocabulary, _ = term_vocabulary(known, rt, stopwords)
entity_labels = {e.label for e in model.entities.values()}
unmapped = [v for v in vocabulary
            if v not in mapping.mapped_term_labels() and v not in entity_labels]
print(f"unmapped concepts eligible for insertion: {len(unmapped)}")

cm = complete_model(model, tree, space, unmapped, tau=1.0)
print(f"\nadded {len(cm.added_entities)} entities and {len(cm.added_links)} "
      f"{model.hierarchy_relation_name()} links")
for iri in cm.added_entities[:8]:
    parent = cm.tree.parent_of[iri]
    parent_label = cm.model.entities[parent].label
    print(f"  {cm.model.entities[iri].label!r} placed under {parent_label!r}")

report = completion_report(cm, rt, [])
print(f"\nmapping rate before: {mapping.rate:.1%}  after completion: {report['rate']:.1%}")
print(f"hierarchy links: {report['total_hierarchy_links']} total "
      f"({report['added_links']} added)")
