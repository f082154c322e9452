"""Extract multi-word term candidates and rank them by C-Value termhood."""

from pathlib import Path

from reqplumb import (
    annotate_set,
    cvalue_rank,
    extract_candidates,
    load_pos_lexicon,
    load_requirements,
    load_stopwords,
    select_terms,
)

FIXTURES = Path(__file__).parent.parent / "tests" / "fixtures"

reqs = annotate_set(load_requirements(FIXTURES / "uavmini_requirements.txt"),
                    load_pos_lexicon())
stopwords = load_stopwords()

candidates = extract_candidates(reqs, stopwords)
ranked = cvalue_rank(candidates)

print(f"{len(ranked)} candidates; top 12 by C-Value:")
print(f"{'term':35s} {'freq':>4s} {'nested-in':>9s} {'cvalue':>8s}")
for cand in ranked[:12]:
    print(f"{cand.label:35s} {cand.frequency:4d} {len(cand.nested_in):9d} {cand.cvalue:8.3f}")

terms = select_terms(ranked, threshold=1.0)
print(f"\nselected {len(terms)} terms at threshold 1.0")

# a fully nested candidate is worth nothing: all its occurrences are inside
# one longer term
nested = [c for c in ranked if c.nested_in and c.cvalue == 0.0]
if nested:
    print("zero-scored fully-nested candidates:", ", ".join(c.label for c in nested[:5]))
