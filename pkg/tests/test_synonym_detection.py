from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqplumb.corpus_ingest import normalize_word
from reqplumb.synonym_detection import (
    SynonymLexicon,
    WordEmbeddings,
    accepted_synonyms,
    apply_rules,
    build_corpus_embeddings,
    cosine,
    decompose_mwt,
    detect_synonyms,
    resolve_synonym_statuses,
)
from reqplumb.term_extraction import TermCandidate, TermSet


def _lex(*pairs: tuple[str, str]) -> SynonymLexicon:
    return SynonymLexicon(pairs=frozenset(pairs))


def _terms(*labels: str) -> TermSet:
    return TermSet(
        terms=tuple(TermCandidate(words=tuple(l.split()), frequency=1) for l in labels),
        source="requirements-70",
    )


class TestDecompose:
    def test_three_words(self):
        m = decompose_mwt(["object", "avoidance", "system"])
        assert (m.head, m.middle, m.tail) == ("object", ("avoidance",), "system")

    def test_two_words(self):
        m = decompose_mwt(["flight", "pattern"])
        assert (m.head, m.middle, m.tail) == ("flight", (), "pattern")

    def test_single_word(self):
        m = decompose_mwt(["alarm"])
        assert (m.head, m.middle, m.tail) == ("alarm", (), "")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            decompose_mwt([])


class TestRules:
    def test_r1_takeoff_home_altitude(self):
        lex = _lex(("takeoff", "home"))
        pair = apply_rules(
            decompose_mwt(["takeoff", "altitude"]), decompose_mwt(["home", "altitude"]), lex
        )
        assert pair is not None and pair.rule == "R1"

    def test_r2_flight_pattern_phase(self):
        lex = _lex(("pattern", "phase"))
        pair = apply_rules(
            decompose_mwt(["flight", "pattern"]), decompose_mwt(["flight", "phase"]), lex
        )
        assert pair is not None and pair.rule == "R2"

    def test_no_lexicon_entry_no_pair(self):
        lex = _lex(("pattern", "phase"))
        assert apply_rules(
            decompose_mwt(["alarm", "panel"]), decompose_mwt(["door", "panel"]), lex
        ) is None

    def test_r3_crossed_slots(self):
        # a = (control, system): head "control" equals b's tail; tails/heads synonymous
        lex = _lex(("system", "panel"))
        pair = apply_rules(
            decompose_mwt(["control", "system"]), decompose_mwt(["panel", "control"]), lex
        )
        assert pair is not None and pair.rule == "R3"

    def test_r4_is_mirror_of_r3(self):
        lex = _lex(("system", "panel"))
        pair = apply_rules(
            decompose_mwt(["panel", "control"]), decompose_mwt(["control", "system"]), lex
        )
        assert pair is not None and pair.rule == "R4"

    def test_middle_must_match(self):
        lex = _lex(("takeoff", "home"))
        assert apply_rules(
            decompose_mwt(["takeoff", "cruise", "altitude"]),
            decompose_mwt(["home", "descent", "altitude"]),
            lex,
        ) is None

    def test_single_words_never_match_r1_to_r4(self):
        lex = _lex(("alarm", "alert"))
        assert apply_rules(decompose_mwt(["alarm"]), decompose_mwt(["alert"]), lex) is None

    @settings(max_examples=200, deadline=None)
    @given(
        a=st.lists(st.sampled_from("abcdef"), min_size=1, max_size=4),
        b=st.lists(st.sampled_from("abcdef"), min_size=1, max_size=4),
        lex_pairs=st.sets(
            st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef")), max_size=6
        ),
    )
    def test_rule_symmetry(self, a, b, lex_pairs):
        lex = SynonymLexicon(frozenset((x, y) for x, y in lex_pairs if x != y))
        fwd = apply_rules(decompose_mwt(a), decompose_mwt(b), lex)
        rev = apply_rules(decompose_mwt(b), decompose_mwt(a), lex)
        assert (fwd is None) == (rev is None)
        if fwd is not None:
            mirror = {"R1": "R1", "R2": "R2", "R3": "R4", "R4": "R3"}
            assert rev.rule in (fwd.rule, mirror[fwd.rule])

    def test_lexicon_soundness_of_rule_pairs(self):
        lex = _lex(("takeoff", "home"), ("pattern", "phase"))
        cases = [
            (["takeoff", "altitude"], ["home", "altitude"]),
            (["flight", "pattern"], ["flight", "phase"]),
        ]
        for a, b in cases:
            pair = apply_rules(decompose_mwt(a), decompose_mwt(b), lex)
            assert pair is not None
            differing = set(a) ^ set(b)
            assert len(differing) == 2
            x, y = sorted(differing)
            assert lex.syn(x, y)


class TestEmbeddings:
    def test_vocabulary_covers_words_with_min_count(self, fixtures_dir, corpus_embeddings):
        counts: dict[str, int] = {}
        for doc in sorted((fixtures_dir / "corpus").glob("*.txt")):
            for line in doc.read_text("utf-8").splitlines():
                for w in line.split():
                    norm = normalize_word(w)
                    if norm:
                        counts[norm] = counts.get(norm, 0) + 1
        expected = {w for w, c in counts.items() if c >= 2}
        assert set(corpus_embeddings.vocabulary) == expected

    def test_deterministic_under_seed(self, fixtures_dir):
        a = build_corpus_embeddings(fixtures_dir / "corpus", dim=16, seed=3, epochs=5)
        b = build_corpus_embeddings(fixtures_dir / "corpus", dim=16, seed=3, epochs=5)
        assert a.vocabulary == b.vocabulary
        assert np.array_equal(a.vectors, b.vectors)

    def test_repeated_sentence_self_cosine(self, tmp_path):
        d = tmp_path / "corpus"
        d.mkdir()
        (d / "doc.txt").write_text("alpha beta gamma\n" * 8, "utf-8")
        emb = build_corpus_embeddings(d, dim=8, seed=0, epochs=3)
        for w in ("alpha", "beta", "gamma"):
            v = emb.vector(w)
            assert v is not None
            assert cosine(v, v) == pytest.approx(1.0)

    def test_empty_corpus_rejected(self, tmp_path):
        d = tmp_path / "corpus"
        d.mkdir()
        with pytest.raises(ValueError, match="empty corpus"):
            build_corpus_embeddings(d)


def _orthogonal_embeddings(words_axes: dict[str, int], dim: int = 8) -> WordEmbeddings:
    vocab = {w: i for i, w in enumerate(sorted(words_axes))}
    vectors = np.zeros((len(vocab), dim))
    for w, axis in words_axes.items():
        vectors[vocab[w], axis] = 1.0
    return WordEmbeddings(vocabulary=vocab, dim=dim, vectors=vectors)


class TestDetectSynonyms:
    def test_rule_tagging_and_threshold(self):
        # takeoff/home share an axis (similar); pattern far away
        emb = _orthogonal_embeddings(
            {"takeoff": 0, "home": 0, "altitude": 1, "flight": 2, "pattern": 3}
        )
        lex = _lex(("takeoff", "home"))
        rt = _terms("takeoff altitude")
        pairs = detect_synonyms(rt, ["home altitude", "flight pattern"], emb, lex, 0.6)
        assert [(p.a, p.b, p.rule) for p in pairs] == [
            ("takeoff altitude", "home altitude", "R1")
        ]
        assert pairs[0].similarity == pytest.approx(1.0)

    def test_identical_strings_excluded(self):
        emb = _orthogonal_embeddings({"flight": 0, "pattern": 1})
        pairs = detect_synonyms(_terms("flight pattern"), ["flight pattern"], emb, _lex(), 0.1)
        assert pairs == []

    def test_embedding_only_routed_not_rule_tagged(self):
        emb = _orthogonal_embeddings({"alpha": 0, "beta": 0})
        pairs = detect_synonyms(_terms("alpha"), ["beta"], emb, _lex(), 0.6)
        assert len(pairs) == 1
        assert pairs[0].rule == "EmbeddingOnly"
        assert accepted_synonyms(pairs) == []

    def test_lexicon_tag_for_single_words(self):
        emb = _orthogonal_embeddings({"route": 0, "path": 0})
        pairs = detect_synonyms(_terms("route"), ["path"], emb, _lex(("route", "path")), 0.6)
        assert pairs[0].rule == "Lexicon"

    def test_uncovered_term_skipped_with_warning(self, caplog):
        emb = _orthogonal_embeddings({"alpha": 0})
        with caplog.at_level("WARNING"):
            pairs = detect_synonyms(_terms("mystery"), ["alpha"], emb, _lex(), 0.5)
        assert pairs == []
        assert "not covered" in caplog.text

    def test_sorted_by_similarity_desc(self):
        vocab = {"a": 0, "b": 1, "c": 2}
        vectors = np.array([[1.0, 0.0], [0.9, 0.1], [0.7, 0.3]])
        emb = WordEmbeddings(vocabulary=vocab, dim=2, vectors=vectors)
        pairs = detect_synonyms(_terms("a"), ["b", "c"], emb, _lex(), 0.1)
        sims = [p.similarity for p in pairs]
        assert sims == sorted(sims, reverse=True)

    def test_fixture_recall_of_known_pairs_at_default_threshold(
        self, corpus_embeddings, syn_lexicon
    ):
        rt = _terms("takeoff altitude", "flight pattern")
        ct = ["home altitude", "flight phase", "battery level"]
        pairs = detect_synonyms(rt, ct, corpus_embeddings, syn_lexicon, 0.6)
        tagged = {(p.a, p.b): p.rule for p in pairs}
        assert tagged.get(("takeoff altitude", "home altitude")) == "R1"
        assert tagged.get(("flight pattern", "flight phase")) == "R2"


class TestCurationFlow:
    def test_resolve_and_accept(self):
        emb = _orthogonal_embeddings({"takeoff": 0, "home": 0, "altitude": 1, "weird": 0})
        lex = _lex(("takeoff", "home"))
        pairs = detect_synonyms(
            _terms("takeoff altitude", "weird"), ["home altitude"], emb, lex, 0.3
        )
        assert {p.rule for p in pairs} == {"R1", "EmbeddingOnly"}
        emb_only = next(p for p in pairs if p.rule == "EmbeddingOnly")
        decided = resolve_synonym_statuses(pairs, {emb_only.key(): "Accepted"})
        accepted = accepted_synonyms(decided)
        assert {p.rule for p in accepted} == {"R1", "EmbeddingOnly"}
        rejected = resolve_synonym_statuses(pairs, {p.key(): "Rejected" for p in pairs})
        assert accepted_synonyms(rejected) == []
