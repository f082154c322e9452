"""Distribution regularities, AHME families, and the strategy evaluation."""

from pathlib import Path

from reqplumb import (
    ExperimentConfig,
    TrainConfig,
    annotate_set,
    build_corpus_embeddings,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
    load_synonym_lexicon,
    parse_rdf,
    run_experiment,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

model = parse_rdf(FIXTURES / "uavmini_model.rdf")
reqs = annotate_set(load_requirements(FIXTURES / "uavmini_requirements.txt"),
                    load_pos_lexicon())
print("training word embeddings ...")
embeddings = build_corpus_embeddings(FIXTURES / "corpus", dim=50, seed=7,
                                     epochs=200, lr=0.1)

cfg = ExperimentConfig(
    ratio=0.7, seed=11, n_runs=3,
    train=TrainConfig(dim=16, epochs=40, learning_rate=0.02, seed=5),
)
print(f"running the pipeline {cfg.n_runs} times (split -> extract -> map -> "
      f"embed -> complete -> recommend -> evaluate) ...")
report = run_experiment(model, reqs, embeddings, load_synonym_lexicon(),
                        load_stopwords(), cfg)

print(f"\naverage mapping rate: {report['mapping_rate_avg']:.1%}"
      f" -> completed: {report['completed_mapping_rate_avg']:.1%}")

print(f"\n{'strategy':18s} {'R':>6s} {'P':>6s} {'F2':>6s}   (original model)")
for strategy, m in report["averages"]["original"].items():
    print(f"{strategy:18s} {m['recall']:6.3f} {m['precision']:6.3f} {m['f2']:6.3f}")

print(f"\n{'strategy':18s} {'R':>6s} {'P':>6s} {'F2':>6s}   (completed model)")
for strategy, m in report["averages"]["completed"].items():
    print(f"{strategy:18s} {m['recall']:6.3f} {m['precision']:6.3f} {m['f2']:6.3f}")

gain = report["averages"]["gain"]["FamilyBelonging"]
print(f"\nFamilyBelonging gains from completion: recall {gain['recall']:+.0%}, "
      f"F2 {gain['f2']:+.0%}")
