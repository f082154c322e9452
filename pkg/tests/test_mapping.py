from __future__ import annotations

import pytest

from reqplumb.corpus_ingest import SplitSpec, split_requirements
from reqplumb.mapping import build_mapping, compare_mapping_methods, mapping_from_dict, mapping_to_dict
from reqplumb.synonym_detection import SynonymPair
from reqplumb.term_extraction import TermCandidate, TermSet

UAV = "http://example.org/uavmini#"


def _terms(*labels: str) -> TermSet:
    return TermSet(
        terms=tuple(TermCandidate(words=tuple(l.split()), frequency=1) for l in labels),
        source="requirements-70",
    )


def _syn(a: str, b: str) -> SynonymPair:
    return SynonymPair(a=a, b=b, rule="R1", similarity=0.9, status="Accepted")


class TestBuildMapping:
    def test_direct_and_synonym(self, uav_model):
        rt = _terms("flight pattern", "takeoff altitude", "warp drive")
        syn = [_syn("takeoff altitude", "home altitude")]
        m = build_mapping(rt, uav_model, syn)
        kinds = {(p.term, p.kind) for p in m.pairs}
        assert ("flight pattern", "Direct") in kinds
        assert ("takeoff altitude", "Synonym") in kinds
        assert m.mapped_terms == 2
        assert m.rate == pytest.approx(2 / 3)

    def test_disjoint_terms_rate_zero(self, uav_model):
        m = build_mapping(_terms("warp drive", "chrono sync"), uav_model, [])
        assert m.mapped_terms == 0
        assert m.rate == 0.0

    def test_term_mapped_to_multiple_entities_counts_once(self, uav_model):
        rt = _terms("flight pattern")
        syn = [_syn("flight pattern", "flight phase")]
        m = build_mapping(rt, uav_model, syn)
        assert len(m.pairs) == 2  # FlightPattern directly, FlightPhase via synonym
        assert m.mapped_terms == 1

    def test_superset_property(self, uav_model):
        rt = _terms("flight pattern", "takeoff altitude", "ground station")
        without = build_mapping(rt, uav_model, [])
        with_syn = build_mapping(rt, uav_model, [_syn("takeoff altitude", "home altitude")])
        assert set(without.pairs) <= set(with_syn.pairs)
        direct_without = {p for p in without.pairs if p.kind == "Direct"}
        direct_with = {p for p in with_syn.pairs if p.kind == "Direct"}
        assert direct_without == direct_with

    def test_category_restriction(self, uav_model):
        rt = _terms("ground station one", "flight pattern")
        unrestricted = build_mapping(rt, uav_model, [])
        assert unrestricted.mapped_terms == 2  # one is a NamedIndividual
        restricted = build_mapping(rt, uav_model, [], restrict={"Classes"})
        assert restricted.mapped_terms == 1
        for p in restricted.pairs:
            assert uav_model.entities[p.entity_iri].category == "Classes"

    def test_rate_recount_invariant(self, uav_model):
        rt = _terms("flight pattern", "battery level", "warp drive", "signal strength")
        m = build_mapping(rt, uav_model, [])
        assert m.rate == pytest.approx(len({p.term for p in m.pairs}) / 4)

    def test_empty_rt_rejected(self, uav_model):
        with pytest.raises(ValueError):
            build_mapping(TermSet(terms=(), source="requirements-70"), uav_model, [])

    def test_round_trip(self, uav_model):
        m = build_mapping(_terms("flight pattern"), uav_model, [])
        again = mapping_from_dict(mapping_to_dict(m))
        assert again == m


class TestCompareMethods:
    def test_rows_and_monotonicity(self, uav_reqs, uav_model, stopwords):
        known, _ = split_requirements(uav_reqs, SplitSpec(0.7, seed=1))
        rt = _terms("flight pattern", "takeoff altitude", "ground station", "warp drive")
        syn = [_syn("takeoff altitude", "home altitude")]
        rows = compare_mapping_methods(known, uav_model, rt, syn, stopwords)
        by_method = {r["method"]: r for r in rows}
        assert set(by_method) == {"NNs/NPs", "C-Value", "C-Value+Synonym"}
        assert by_method["C-Value+Synonym"]["rate"] >= by_method["C-Value"]["rate"]
        assert by_method["C-Value"]["n_terms"] == by_method["C-Value+Synonym"]["n_terms"] == 4
        # naive extraction finds many more, lower-precision terms
        assert by_method["NNs/NPs"]["n_terms"] > 4

    def test_gold_row_appended(self, uav_reqs, uav_model, stopwords):
        rt = _terms("flight pattern")
        rows = compare_mapping_methods(
            uav_reqs, uav_model, rt, [], stopwords,
            gold_row={"n_terms": 56, "n_mapped": 27},
        )
        manual = rows[-1]
        assert manual["method"] == "Manual"
        assert manual["rate"] == pytest.approx(27 / 56)
