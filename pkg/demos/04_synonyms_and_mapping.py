"""Detect synonym pairs with corpus embeddings + slot rules, then map terms."""

from pathlib import Path

from reqplumb import (
    annotate_set,
    build_corpus_embeddings,
    build_mapping,
    compare_mapping_methods,
    cvalue_rank,
    detect_synonyms,
    extract_candidates,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
    load_synonym_lexicon,
    parse_rdf,
    select_terms,
)
from reqplumb.synonym_detection import accepted_synonyms

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

reqs = annotate_set(load_requirements(FIXTURES / "uavmini_requirements.txt"),
                    load_pos_lexicon())
stopwords = load_stopwords()
model = parse_rdf(FIXTURES / "uavmini_model.rdf")

rt = select_terms(cvalue_rank(extract_candidates(reqs, stopwords)), threshold=1.0)
print(f"requirement terms: {len(rt)}")

print("training word embeddings on the fixture corpus ...")
embeddings = build_corpus_embeddings(FIXTURES / "corpus", dim=50, seed=7,
                                     epochs=200, lr=0.1)
lexicon = load_synonym_lexicon()
ct_labels = [e.label for e in model.classes()]
pairs = detect_synonyms(rt, ct_labels, embeddings, lexicon, sim_threshold=0.6)

print(f"\n{len(pairs)} candidate pairs above the similarity threshold:")
for p in pairs:
    print(f"  {p.a!r:28s} ~ {p.b!r:22s} rule={p.rule:13s} cos={p.similarity:.2f}")

accepted = accepted_synonyms(pairs)
print(f"\n{len(accepted)} pairs usable without curation (rule-attested)")

mapping = build_mapping(rt, model, accepted)
print(f"mapping: {mapping.mapped_terms}/{mapping.rt_size} terms "
      f"-> rate {mapping.rate:.1%}")

print("\nmethod comparison:")
for row in compare_mapping_methods(reqs, model, rt, accepted, stopwords):
    print(f"  {row['method']:18s} terms={row['n_terms']:3d} "
          f"mapped={row['n_mapped']:3d} rate={row['rate']:.2%}")
