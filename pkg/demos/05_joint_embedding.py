"""Jointly embed model entities, relations, and requirement terms."""

from pathlib import Path

from reqplumb import (
    SplitSpec,
    TrainConfig,
    annotate_set,
    build_mapping,
    cvalue_rank,
    extract_candidates,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
    parse_rdf,
    select_terms,
    split_requirements,
    train_joint,
)
from reqplumb.joint_embedding import alignment_triplets, requirement_cooccurrence, term_vocabulary

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

stopwords = load_stopwords()
model = parse_rdf(FIXTURES / "uavmini_model.rdf")
reqs = annotate_set(load_requirements(FIXTURES / "uavmini_requirements.txt"),
                    load_pos_lexicon())
known, _ = split_requirements(reqs, SplitSpec(0.7, seed=11))

rt = select_terms(cvalue_rank(extract_candidates(known, stopwords)), threshold=1.0)
mapping = build_mapping(rt, model, [])
vocabulary, per_req = term_vocabulary(known, rt, stopwords)
pairs = requirement_cooccurrence(known, rt, stopwords)
align = alignment_triplets(model.triples, mapping, set(vocabulary))

print(f"term vocabulary |V| = {len(vocabulary)}")
print(f"co-occurrence pairs: {len(pairs)}")
print(f"alignment triplets: {len(align)}")

cfg = TrainConfig(dim=16, epochs=60, learning_rate=0.02, seed=5)
space, log = train_joint(model, known, rt, mapping, cfg, stopwords)

print("\nepoch     L        L_K      L_R      L_A")
for row in log[:: max(1, len(log) // 8)]:
    print(f"{row.epoch:5d} {row.loss:9.2f} {row.loss_k:8.2f} "
          f"{row.loss_r:8.2f} {row.loss_a:8.2f}")
print(f"\nloss went {log[0].loss:.2f} -> {log[-1].loss:.2f} over {len(log)} epochs")
