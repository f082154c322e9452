from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reqplumb.domain_model import (
    DomainModel,
    Entity,
    FactTriple,
    HierarchyCycleError,
    RdfSyntaxError,
    build_hierarchy,
    classes_of,
    model_from_dict,
    model_to_dict,
    parse_rdf,
)

UAV = "http://example.org/uavmini#"
BAS = "http://example.org/basmini#"


def _model_from_edges(edges: list[tuple[str, str]], extra_nodes: tuple[str, ...] = ()):
    """Tiny Classes-only model; edges are (child, parent) via subClassOf."""
    nodes = {n for e in edges for n in e} | set(extra_nodes)
    entities = {n: Entity(iri=n, label=n.lower(), category="Classes") for n in nodes}
    triples = tuple(FactTriple(h=c, r="subClassOf", t=p) for c, p in edges)
    return DomainModel(entities=entities, triples=triples)


class TestParseRdfXml:
    def test_counts(self, uav_model):
        assert len(uav_model.entities) == 20
        assert len(uav_model.classes()) == 17
        assert len(uav_model.triples) == 18

    def test_categories(self, uav_model):
        cats = {e.iri: e.category for e in uav_model.entities.values()}
        assert cats[UAV + "monitors"] == "ObjectProperty"
        assert cats[UAV + "DefaultCamera"] == "NamedIndividual"
        assert cats[UAV + "MissionElement"] == "Classes"

    def test_label_normalization(self, uav_model):
        assert uav_model.entities[UAV + "FlightPattern"].label == "flight pattern"
        assert uav_model.entities[UAV + "GroundStationOne"].label == "ground station one"

    def test_syntax_error_reports_position(self, tmp_path):
        p = tmp_path / "broken.rdf"
        p.write_text("<rdf:RDF><unclosed></rdf:RDF", "utf-8")
        with pytest.raises(RdfSyntaxError, match=r":\d+:"):
            parse_rdf(p, "rdf-xml")

    def test_single_triple_file(self, tmp_path):
        p = tmp_path / "tiny.rdf"
        p.write_text(
            """<?xml version="1.0"?>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
         xmlns:rdfs="http://www.w3.org/2000/01/rdf-schema#"
         xmlns:owl="http://www.w3.org/2002/07/owl#">
  <owl:Class rdf:about="http://x.org#A">
    <rdfs:subClassOf rdf:resource="http://x.org#B"/>
  </owl:Class>
</rdf:RDF>""",
            "utf-8",
        )
        m = parse_rdf(p, "rdf-xml")
        assert len(m.entities) == 2
        assert len(m.triples) == 1
        assert m.triples[0].r == "subClassOf"


class TestParseTurtle:
    def test_counts(self, bas_model):
        assert len(bas_model.entities) == 8
        assert all(e.category == "Classes" for e in bas_model.entities.values())
        assert len(bas_model.triples) == 7
        assert bas_model.relation_names() == ["subClassOf"]

    def test_explicit_label_wins(self, bas_model):
        assert bas_model.entities[BAS + "HeatingUnit"].label == "heating unit"

    def test_unknown_prefix(self, tmp_path):
        p = tmp_path / "bad.ttl"
        p.write_text("foo:A a owl:Class .\n", "utf-8")
        with pytest.raises(RdfSyntaxError, match="unknown prefix"):
            parse_rdf(p, "turtle")

    def test_round_trip(self, bas_model):
        again = model_from_dict(model_to_dict(bas_model))
        assert set(again.triples) == set(bas_model.triples)
        assert again.entities == bas_model.entities


class TestClassesOf:
    def test_uav(self, uav_model):
        assert len(classes_of(uav_model)) == 17

    def test_bas(self, bas_model):
        assert len(classes_of(bas_model)) == 8

    def test_no_classes_warns(self, caplog):
        m = DomainModel(
            entities={"x": Entity(iri="x", label="x", category="Other")}, triples=()
        )
        with caplog.at_level("WARNING"):
            assert classes_of(m) == set()
        assert "no Classes" in caplog.text


class TestHierarchy:
    def test_single_root_two_children(self):
        m = _model_from_edges([("C1", "R"), ("C2", "R")])
        tree = build_hierarchy(m)
        assert tree.level == {"R": 0, "C1": 1, "C2": 1}
        assert tree.position == {"R": "Root", "C1": "Leaf", "C2": "Leaf"}

    def test_chain_positions(self):
        tree = build_hierarchy(_model_from_edges([("B", "A"), ("C", "B")]))
        assert tree.position == {"A": "Root", "B": "Intermediate", "C": "Leaf"}

    def test_uav_levels(self, uav_model):
        tree = build_hierarchy(uav_model)
        assert tree.level[UAV + "UAVConcept"] == 0
        assert tree.level[UAV + "MissionElement"] == 1
        assert tree.level[UAV + "FlightPattern"] == 2
        assert set(tree.roots) == {UAV + "UAVConcept", UAV + "WeatherStation"}

    def test_hasSubClasses_direction(self, uav_model):
        tree = build_hierarchy(uav_model)
        assert tree.parent_of[UAV + "BatteryLevel"] == UAV + "RemoteParameter"

    def test_subclassof_direction(self, bas_model):
        tree = build_hierarchy(bas_model)
        assert tree.parent_of[BAS + "HeatingUnit"] == BAS + "AirConditioning"
        assert tree.roots == (BAS + "BuildingConcept",)

    def test_cycle_detected(self):
        with pytest.raises(HierarchyCycleError) as err:
            build_hierarchy(_model_from_edges([("B", "A"), ("C", "B"), ("A", "C")]))
        assert set(err.value.cycle) == {"A", "B", "C"}

    def test_multiple_parents_keeps_first_and_warns(self, caplog):
        m = _model_from_edges([("C", "A"), ("C", "B")])
        with caplog.at_level("WARNING"):
            tree = build_hierarchy(m)
        assert tree.parent_of["C"] == "A"
        assert "parents" in caplog.text

    def test_level_consistency_and_position_partition(self, uav_model):
        tree = build_hierarchy(uav_model)
        for node, parent in tree.parent_of.items():
            assert tree.level[node] == tree.level[parent] + 1
        assert set(tree.position) == set(tree.level)
        for node, pos in tree.position.items():
            has_parent = node in tree.parent_of
            has_children = bool(tree.children_of.get(node))
            if pos == "Leaf":
                assert has_parent and not has_children
            elif pos == "Intermediate":
                assert has_parent and has_children
            else:
                assert not has_parent

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 40), st.integers(0, 10_000))
    def test_random_tree_properties(self, n, seed):
        import random

        rng = random.Random(seed)
        edges = [(f"N{i}", f"N{rng.randrange(i)}") for i in range(1, n)]
        tree = build_hierarchy(_model_from_edges(edges, extra_nodes=("N0",)))
        assert tree.roots == ("N0",)
        for node, parent in tree.parent_of.items():
            assert tree.level[node] == tree.level[parent] + 1
        positions = [tree.position[f"N{i}"] for i in range(n)]
        assert len(positions) == n
